"""Figure rendering: exceedance curves with CI whiskers and fit overlays,
and variance-vs-size scaling plots with a 2/3-slope guide.

Output is deterministic for fixed inputs: the SVG hash salt is pinned and
creation dates are stripped, so reruns are byte-comparable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "lppplot"

import numpy as np
import matplotlib.pyplot as plt

from .csvio import TailCurveFile, VarianceFile, read_tail_file, read_variance_file

MODES = ("semilogy", "neglog")
_MARKERS = ("o", "s", "^", "D", "v", "P")


@dataclass
class FigureSpec:
    inputs: list
    output: str
    mode: str = "semilogy"
    guides: bool = True
    title: str | None = None

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ValueError(f"unknown axes mode {self.mode!r}; choose from {MODES}")
        if not self.inputs:
            raise ValueError("no input files given")


def _save(fig, output: str) -> None:
    fig.savefig(output, metadata={"Date": None})
    plt.close(fig)


def _fit_curve_points(fit: dict, t_lo: float, t_hi: float):
    try:
        kappa = float(fit["kappa_hat"])
        c = float(fit["c_hat"])
        log_c = float(fit["logC_hat"])
    except (KeyError, ValueError):
        return None
    if not (math.isfinite(kappa) and math.isfinite(c) and math.isfinite(log_c)):
        return None
    t = np.linspace(t_lo, t_hi, 200)
    p = np.minimum(1.0, np.exp(log_c - c * t**kappa))
    return t, p, kappa


def _neglog(p):
    p = np.asarray(p, dtype=float)
    out = np.full(p.shape, np.nan)
    good = (p > 0.0) & (p < 1.0)
    out[good] = np.log(-np.log(p[good]))
    return out


def render_tail(spec: FigureSpec) -> str:
    """Exceedance curves from one or more tail CSVs onto one figure."""
    curves = [f if isinstance(f, TailCurveFile) else read_tail_file(f) for f in spec.inputs]
    fig, ax = plt.subplots(figsize=(7.0, 5.0))
    for idx, curve in enumerate(curves):
        t = np.array([r.threshold for r in curve.rows])
        p = np.array([r.p_hat for r in curve.rows])
        lo = np.array([r.ci_lo for r in curve.rows])
        hi = np.array([r.ci_hi for r in curve.rows])
        marker = _MARKERS[idx % len(_MARKERS)]
        label = curve.label
        if curve.fit.get("kappa_hat"):
            label += f" (kappa_hat={float(curve.fit['kappa_hat']):.2f})"

        if spec.mode == "semilogy":
            keep = p > 0.0
            err = np.vstack([(p - lo)[keep], (hi - p)[keep]])
            eb = ax.errorbar(
                t[keep], p[keep], yerr=err, fmt=marker, ms=4, capsize=3, label=label
            )
            overlay = _fit_curve_points(curve.fit, t.min(), t.max())
            if overlay is not None:
                tt, pp, _ = overlay
                (ln,) = ax.plot(tt, pp, "-", lw=1.2)
                ln.set_gid(f"fit-curve-{idx}")
        else:
            y = _neglog(p)
            keep = np.isfinite(y)
            # transformed whiskers; a CI endpoint at 0 or 1 gives no whisker
            y_hi = _neglog(lo)   # smaller p -> larger ln(-ln p)
            y_lo = _neglog(hi)
            up = np.where(np.isfinite(y_hi), y_hi - y, 0.0)
            down = np.where(np.isfinite(y_lo), y - y_lo, 0.0)
            eb = ax.errorbar(
                np.log(t[keep]),
                y[keep],
                yerr=np.vstack([down[keep], up[keep]]),
                fmt=marker,
                ms=4,
                capsize=3,
                label=label,
            )
            overlay = _fit_curve_points(curve.fit, t.min(), t.max())
            if overlay is not None:
                tt, pp, _ = overlay
                yy = _neglog(pp)
                good = np.isfinite(yy)
                (ln,) = ax.plot(np.log(tt[good]), yy[good], "-", lw=1.2)
                ln.set_gid(f"fit-curve-{idx}")
        for part in eb[2]:
            part.set_gid(f"ci-whiskers-{idx}")

    if spec.mode == "semilogy":
        ax.set_yscale("log")
        ax.set_xlabel("threshold")
        ax.set_ylabel("exceedance probability")
    else:
        ax.set_xlabel("ln threshold")
        ax.set_ylabel("ln(-ln p)")
        if spec.guides:
            all_t = np.concatenate([[r.threshold for r in c.rows] for c in curves])
            all_p = np.concatenate([[r.p_hat for r in c.rows] for c in curves])
            y = _neglog(all_p)
            good = np.isfinite(y)
            if good.any():
                x0 = float(np.median(np.log(all_t[good])))
                y0 = float(np.median(y[good]))
                xs = np.array([np.log(all_t[good]).min(), np.log(all_t[good]).max()])
                for slope, style in ((1.5, "--"), (3.0, ":")):
                    (ln,) = ax.plot(
                        xs, y0 + slope * (xs - x0), style, lw=1.0, label=f"slope {slope}"
                    )
                    ln.set_gid(f"guide-slope-{slope}")
    ax.legend(fontsize=8)
    ax.grid(True, alpha=0.3)
    if spec.title:
        ax.set_title(spec.title)
    fig.tight_layout()
    _save(fig, spec.output)
    return spec.output


def render_variance(spec: FigureSpec) -> str:
    """Log-log variance vs size with a 2/3-slope guide line."""
    if len(spec.inputs) != 1:
        raise ValueError("variance figures take exactly one input CSV")
    table = (
        spec.inputs[0]
        if isinstance(spec.inputs[0], VarianceFile)
        else read_variance_file(spec.inputs[0])
    )
    n = np.array([r.n for r in table.rows], dtype=float)
    v = np.array([r.var_hat for r in table.rows])
    se = np.array([r.jk_se for r in table.rows])
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    eb = ax.errorbar(n, v, yerr=se, fmt="o", ms=5, capsize=3, label="sample variance")
    for part in eb[2]:
        part.set_gid("ci-whiskers-0")
    guide = v[0] * (n / n[0]) ** (2.0 / 3.0)
    (ln,) = ax.plot(n, guide, "--", lw=1.2, label="slope 2/3 guide")
    ln.set_gid("guide-slope-2-3")
    if "slope_hat" in table.fit:
        ax.annotate(
            f"measured slope {float(table.fit['slope_hat']):.3f}",
            xy=(0.05, 0.92),
            xycoords="axes fraction",
            fontsize=9,
        )
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("size")
    ax.set_ylabel("variance")
    ax.legend(fontsize=8)
    ax.grid(True, alpha=0.3, which="both")
    if spec.title:
        ax.set_title(spec.title)
    fig.tight_layout()
    _save(fig, spec.output)
    return spec.output
