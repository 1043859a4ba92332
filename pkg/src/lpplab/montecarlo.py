"""Replicated tail-probability experiments with confidence intervals,
exponent fits and a fixed CSV emission format.

Each replicate evaluates one scalar statistic on one fresh environment; all
thresholds are checked against that shared realization (the exceedance
events are nested, so one realization serves the whole grid).  Replicates
are keyed by ``replicate_index`` and assembled positionally, so results are
bit-identical for any worker count and scheduling order.

CSV schema (exact): header ``threshold,n_samples,n_exceed,p_hat,ci_lo,ci_hi``;
metadata comment lines ``#meta key=value`` precede the header; fit results
are appended as comment lines prefixed ``#fit`` (free-exponent fit) and
``#fit_model`` (fixed-exponent comparisons).
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.optimize import OptimizeWarning, curve_fit

from . import __version__
from .environment import (
    Density,
    Window,
    as_density,
    build_bulk,
    build_stationary_boundary,
    sample_exponential,
)
from .passage import _forward_value, exit_time, passage_stationary_boundary
from .rng import Seed
from .shape import CharacteristicSpec, limit_shape

__all__ = [
    "EXPERIMENT_KINDS",
    "ExperimentSpec",
    "TailRow",
    "TailCurve",
    "ExponentFit",
    "FixedKappaFit",
    "FitWindowError",
    "VarianceRow",
    "VarianceTable",
    "wilson_interval",
    "run_experiment",
    "run_exit_tail",
    "run_upper_tail",
    "run_lower_tail",
    "run_p2p_tail",
    "run_variance_scaling",
    "fit_exponent",
    "write_tail_csv",
    "write_variance_csv",
    "read_tail_csv",
    "append_fit_comments",
]

EXPERIMENT_KINDS = ("exit_tail", "upper_tail", "lower_tail", "p2p_tail", "variance_scaling")

_Z95 = 1.959963984540054  # normal 0.975 quantile


@dataclass(frozen=True)
class ExperimentSpec:
    """Parameters of one replicated experiment.

    Tail kinds use ``n`` and ``thresholds``; ``variance_scaling`` uses
    ``n_grid`` (at least two sizes spanning a factor >= 4) and ignores
    ``thresholds``.  ``statistic`` selects the variance target: the
    stationary passage time to the characteristic point, or the plain
    boundary sum to the far axis point (an i.i.d. control with slope 1).
    """

    kind: str
    rho: Density
    n: int
    thresholds: tuple[float, ...]
    replicates: int
    seed: Seed
    n_grid: tuple[int, ...] = ()
    statistic: str = "characteristic"

    def __post_init__(self) -> None:
        object.__setattr__(self, "rho", as_density(self.rho))
        object.__setattr__(self, "thresholds", tuple(float(t) for t in self.thresholds))
        if self.kind not in EXPERIMENT_KINDS:
            raise ValueError(f"unknown experiment kind {self.kind!r}")
        if self.replicates < 1:
            raise ValueError("replicates must be positive")
        if self.kind == "variance_scaling":
            grid = tuple(int(v) for v in self.n_grid)
            object.__setattr__(self, "n_grid", grid)
            if len(grid) < 2:
                raise ValueError("variance scaling needs at least two sizes")
            if any(g < 1 for g in grid) or sorted(grid) != list(grid):
                raise ValueError("size grid must be positive and ascending")
            if grid[-1] < 4 * grid[0]:
                raise ValueError("size grid must span at least a factor of 4")
            if self.statistic not in ("characteristic", "boundary_sum"):
                raise ValueError(f"unknown variance statistic {self.statistic!r}")
        else:
            if self.n < 1:
                raise ValueError("n must be positive")
            t = self.thresholds
            if not t or any(v <= 0.0 for v in t) or any(b <= a for a, b in zip(t, t[1:])):
                raise ValueError("thresholds must be nonempty, positive, strictly increasing")


# ---------------------------------------------------------------------------
# Replicate statistics (module-level so process pools can pickle the work)


def _one_statistic(kind: str, rho: float, n: int, seed: Seed) -> float:
    if kind == "exit_tail":
        spec = CharacteristicSpec(Density(rho), n)
        field = build_stationary_boundary(n, rho, seed)
        return abs(exit_time(field, spec).z) / n ** (2.0 / 3.0)
    if kind in ("upper_tail", "lower_tail"):
        spec = CharacteristicSpec(Density(rho), n)
        field = build_stationary_boundary(n, rho, seed)
        g = passage_stationary_boundary(field, spec.v)
        dev = (g - n) / n ** (1.0 / 3.0)
        return dev if kind == "upper_tail" else -dev
    if kind == "p2p_tail":
        cx, cy = CharacteristicSpec(Density(rho), n).v
        field = build_bulk(Window(0, 0, cx, cy), seed)
        return (_forward_value(field.weights) - limit_shape(cx, cy)) / n ** (1.0 / 3.0)
    raise ValueError(f"no scalar statistic for kind {kind!r}")


def _stat_chunk(args) -> tuple[int, np.ndarray]:
    kind, rho, n, base_seed, experiment_id, lo, hi = args
    out = np.empty(hi - lo)
    for i in range(lo, hi):
        out[i - lo] = _one_statistic(kind, rho, n, Seed(base_seed, experiment_id, i))
    return lo, out


def _variance_sample(rho: float, n: int, statistic: str, seed: Seed) -> float:
    if statistic == "boundary_sum":
        cx, _ = CharacteristicSpec(Density(rho), n).v
        draws = sample_exponential(1.0 - rho, seed.stream(), size=cx)
        return float(draws.sum())
    spec = CharacteristicSpec(Density(rho), n)
    field = build_stationary_boundary(n, rho, seed)
    return passage_stationary_boundary(field, spec.v)


def _variance_chunk(args) -> tuple[int, np.ndarray]:
    rho, n, statistic, base_seed, experiment_id, lo, hi = args
    out = np.empty(hi - lo)
    for i in range(lo, hi):
        out[i - lo] = _variance_sample(rho, n, statistic, Seed(base_seed, experiment_id, i))
    return lo, out


def _gather(worker, jobs, n_total: int, n_jobs: int) -> np.ndarray:
    out = np.empty(n_total)
    if n_jobs <= 1:
        for job in jobs:
            lo, vals = worker(job)
            out[lo : lo + vals.size] = vals
        return out
    with ProcessPoolExecutor(max_workers=n_jobs) as pool:
        for lo, vals in pool.map(worker, jobs):
            out[lo : lo + vals.size] = vals
    return out


def _chunk_ranges(total: int, n_jobs: int) -> list[tuple[int, int]]:
    per = max(1, math.ceil(total / max(1, n_jobs * 4)))
    return [(lo, min(lo + per, total)) for lo in range(0, total, per)]


# ---------------------------------------------------------------------------
# Tail curves


def wilson_interval(successes: int, total: int, z: float = _Z95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion (95% by default)."""
    if total <= 0:
        raise ValueError("total must be positive")
    p = successes / total
    denom = 1.0 + z * z / total
    center = (p + z * z / (2.0 * total)) / denom
    half = z * math.sqrt(p * (1.0 - p) / total + z * z / (4.0 * total * total)) / denom
    # the k=0 / k=total endpoints are exact; clamping avoids float residue
    # poking the interval off its own point estimate
    lo = 0.0 if successes == 0 else max(0.0, center - half)
    hi = 1.0 if successes == total else min(1.0, center + half)
    return min(lo, p), max(hi, p)


@dataclass(frozen=True)
class TailRow:
    threshold: float
    n_samples: int
    n_exceed: int
    p_hat: float
    ci_lo: float
    ci_hi: float


class FitWindowError(ValueError):
    """Raised when fewer than four usable rows remain in the fit window."""


@dataclass(frozen=True)
class FixedKappaFit:
    kappa: float
    c_hat: float
    log_c_hat: float
    rss: float


@dataclass(frozen=True)
class ExponentFit:
    """Free-exponent fit plus fixed-exponent model comparison.

    ``kappa_hat`` estimates the stretched-exponential exponent of
    ``p = C exp(-c t^kappa)`` by least squares of ``-ln p`` against
    ``a + c t^kappa`` (prefactor-aware; the plain log-log slope, which
    neglects C and is biased low at small thresholds, is kept as the
    ``kappa_loglog`` diagnostic and as the optimizer's starting point).
    ``ok`` is False (with ``error`` set) when the curve is degenerate,
    e.g. constant rows.
    """

    ok: bool
    error: str | None
    kappa_hat: float
    kappa_ci: tuple[float, float]
    c_hat: float
    log_c_hat: float
    window: tuple[float, float]
    rss: float
    n_rows_used: int
    excluded: tuple[tuple[float, str], ...]
    comparisons: tuple[FixedKappaFit, ...] = ()
    kappa_loglog: float = float("nan")
    method: str = "prefactor"


@dataclass(frozen=True)
class TailCurve:
    rows: tuple[TailRow, ...]
    meta: dict
    fit: ExponentFit | None = None


def _tail_rows(thresholds, stats: np.ndarray) -> tuple[TailRow, ...]:
    t = np.asarray(thresholds)
    counts = (stats[:, None] >= t[None, :]).sum(axis=0)
    rows = []
    for thr, k in zip(thresholds, counts):
        lo, hi = wilson_interval(int(k), stats.size)
        rows.append(
            TailRow(
                threshold=float(thr),
                n_samples=int(stats.size),
                n_exceed=int(k),
                p_hat=int(k) / stats.size,
                ci_lo=lo,
                ci_hi=hi,
            )
        )
    return tuple(rows)


def _linear_fit(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float]:
    """Least-squares slope/intercept/RSS of y on x."""
    a = np.vstack([x, np.ones_like(x)]).T
    coef, *_ = np.linalg.lstsq(a, y, rcond=None)
    resid = y - a @ coef
    return float(coef[0]), float(coef[1]), float(resid @ resid)


def _stretched_exp_fit(t: np.ndarray, neglog: np.ndarray) -> tuple[float, float, float, float] | None:
    """Fit -ln p = a + c t^kappa; returns (kappa, c, a, rss) or None on failure."""
    slope0, intercept0, _ = _linear_fit(np.log(t), np.log(neglog))
    p0 = [0.0, math.exp(intercept0), max(slope0, 0.3)]

    def model(tt, a, c, k):
        return a + c * tt**k

    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", OptimizeWarning)
            popt, _ = curve_fit(
                model,
                t,
                neglog,
                p0=p0,
                bounds=([-np.inf, 1e-12, 1e-6], [np.inf, np.inf, 50.0]),
                maxfev=20000,
            )
    except (RuntimeError, ValueError):
        return None
    a, c, kappa = (float(v) for v in popt)
    resid = neglog - model(t, a, c, kappa)
    return kappa, c, a, float(resid @ resid)


def _levels_from_rows(rows) -> tuple[int, np.ndarray]:
    """Reconstruct the per-replicate exceedance-level multiset from counts.

    Thresholds are nested per realization, so the number of replicates whose
    statistic exceeds exactly the first j thresholds is k_j - k_{j+1}; the
    multiset of levels is therefore fully determined by the counts.
    """
    n = rows[0].n_samples
    counts = [r.n_exceed for r in rows]
    if any(r.n_samples != n for r in rows):
        raise ValueError("rows disagree on n_samples; not a single-experiment curve")
    if any(a < b for a, b in zip(counts, counts[1:])):
        raise ValueError("exceedance counts are not nested (corrupted curve?)")
    levels = np.zeros(len(rows) + 1, dtype=np.int64)
    levels[0] = n - counts[0]
    for j in range(1, len(rows)):
        levels[j] = counts[j - 1] - counts[j]
    levels[len(rows)] = counts[-1]
    return n, levels


def fit_exponent(
    rows,
    window: tuple[float, float] | None = None,
    kappa_candidates=(1.5, 3.0),
    min_exceed: int = 10,
    max_p: float = 0.5,
    n_bootstrap: int = 1000,
    bootstrap_seed: Seed | None = None,
) -> ExponentFit:
    """Fit the stretched-exponential tail exponent of an exceedance curve.

    Parameters
    ----------
    rows : sequence of TailRow
        The full curve; rows outside the window or too noisy to use are
        excluded (and reported) but still inform the bootstrap reconstruction.
    window : (lo, hi), optional
        Threshold interval to fit over.  Independent of the window, rows with
        fewer than ``min_exceed`` exceedances or with ``p_hat`` above
        ``max_p`` (outside the tail regime) are dropped.
    kappa_candidates : iterable of float
        Fixed exponents for the model comparison: ln p is regressed on
        threshold^kappa and the residual sum of squares reported per
        candidate.  Robust to the unknown prefactor, hence the primary
        instrument for deciding between exponent regimes.
    n_bootstrap : int
        Nonparametric bootstrap resamples of the replicate exceedance levels
        for the free-exponent confidence interval.  The per-replicate levels
        are reconstructed exactly from the nested counts, so no raw samples
        are needed.

    Raises
    ------
    FitWindowError
        When fewer than four usable rows remain.
    """
    rows = list(rows)
    usable = []
    excluded = []
    for r in rows:
        if window is not None and not window[0] <= r.threshold <= window[1]:
            excluded.append((r.threshold, "outside_window"))
        elif r.n_exceed == 0:
            excluded.append((r.threshold, "zero_exceedances"))
        elif r.n_exceed < min_exceed:
            excluded.append((r.threshold, f"fewer_than_{min_exceed}_exceedances"))
        elif r.p_hat > max_p:
            excluded.append((r.threshold, "p_hat_above_tail_regime"))
        elif r.p_hat >= 1.0:
            excluded.append((r.threshold, "p_hat_is_one"))
        else:
            usable.append(r)
    if len(usable) < 4:
        raise FitWindowError(
            f"only {len(usable)} usable rows (need >= 4); excluded: {excluded}"
        )

    t = np.array([r.threshold for r in usable])
    p = np.array([r.p_hat for r in usable])
    used_window = (float(t[0]), float(t[-1]))
    neglog = -np.log(p)

    comparisons = tuple(
        FixedKappaFit(kappa=float(k), c_hat=-s, log_c_hat=b, rss=rss)
        for k in kappa_candidates
        for s, b, rss in [_linear_fit(t ** float(k), np.log(p))]
    )

    if np.ptp(neglog) == 0.0:
        return ExponentFit(
            ok=False,
            error="degenerate curve: identical exceedance probabilities across thresholds",
            kappa_hat=float("nan"),
            kappa_ci=(float("nan"), float("nan")),
            c_hat=float("nan"),
            log_c_hat=float("nan"),
            window=used_window,
            rss=float("nan"),
            n_rows_used=len(usable),
            excluded=tuple(excluded),
            comparisons=comparisons,
        )

    kappa_loglog, _, _ = _linear_fit(np.log(t), np.log(neglog))
    stretched = _stretched_exp_fit(t, neglog)
    if stretched is not None:
        kappa_hat, c_hat, a_hat, rss = stretched
        method = "prefactor"
    else:
        # optimizer failed; fall back to the log-log slope with a linear
        # prefactor stage at that exponent
        kappa_hat = kappa_loglog
        slope, intercept, rss = _linear_fit(t**kappa_hat, np.log(p))
        c_hat, a_hat = -slope, -intercept
        method = "loglog-fallback"
    fit_ok = math.isfinite(kappa_hat) and kappa_hat > 0.0
    error = None if fit_ok else f"non-physical fitted exponent {kappa_hat}"

    kappa_ci = (float("nan"), float("nan"))
    if fit_ok and n_bootstrap > 0:
        n, levels = _levels_from_rows(rows)
        thresholds_all = np.array([r.threshold for r in rows])
        used_mask = np.isin(thresholds_all, t)
        stream = (bootstrap_seed or Seed(0, "fit-bootstrap")).stream()
        probs = levels / n
        estimates = []
        for _ in range(n_bootstrap):
            m = stream.multinomial(n, probs)
            counts = np.cumsum(m[::-1])[::-1][1:]  # exceedance counts per threshold
            pb = counts[used_mask] / n
            keep = pb > 0.0
            if keep.sum() < 4:
                continue
            boot = _stretched_exp_fit(t[keep], -np.log(pb[keep]))
            if boot is not None:
                estimates.append(boot[0])
        if estimates:
            kappa_ci = (
                float(np.percentile(estimates, 2.5)),
                float(np.percentile(estimates, 97.5)),
            )

    return ExponentFit(
        ok=fit_ok,
        error=error,
        kappa_hat=float(kappa_hat),
        kappa_ci=kappa_ci,
        c_hat=float(c_hat),
        log_c_hat=float(-a_hat),
        window=used_window,
        rss=float(rss),
        n_rows_used=len(usable),
        excluded=tuple(excluded),
        comparisons=comparisons,
        kappa_loglog=float(kappa_loglog),
        method=method,
    )


def _run_tail(spec: ExperimentSpec, n_jobs: int, fit_kwargs) -> TailCurve:
    seed = spec.seed
    jobs = [
        (spec.kind, spec.rho.rho, spec.n, seed.base_seed, seed.experiment_id, lo, hi)
        for lo, hi in _chunk_ranges(spec.replicates, n_jobs)
    ]
    stats = _gather(_stat_chunk, jobs, spec.replicates, n_jobs)
    rows = _tail_rows(spec.thresholds, stats)
    meta = _experiment_meta(spec)
    fit = None
    kwargs = dict(fit_kwargs or {})
    kwargs.setdefault("bootstrap_seed", seed.child("fit"))
    try:
        fit = fit_exponent(rows, **kwargs)
    except FitWindowError:
        pass  # curve still reported; too few tail rows to fit
    return TailCurve(rows=rows, meta=meta, fit=fit)


def run_exit_tail(spec: ExperimentSpec, n_jobs: int = 1, fit_kwargs=None) -> TailCurve:
    """Exceedance curve of |exit coordinate| / n^(2/3) over the threshold grid."""
    if spec.kind != "exit_tail":
        raise ValueError(f"spec kind {spec.kind!r} is not exit_tail")
    return _run_tail(spec, n_jobs, fit_kwargs)


def run_upper_tail(spec: ExperimentSpec, n_jobs: int = 1, fit_kwargs=None) -> TailCurve:
    """Exceedance curve of (passage - n) / n^(1/3) above the threshold grid."""
    if spec.kind != "upper_tail":
        raise ValueError(f"spec kind {spec.kind!r} is not upper_tail")
    return _run_tail(spec, n_jobs, fit_kwargs)


def run_lower_tail(spec: ExperimentSpec, n_jobs: int = 1, fit_kwargs=None) -> TailCurve:
    """Exceedance curve of (n - passage) / n^(1/3) above the threshold grid."""
    if spec.kind != "lower_tail":
        raise ValueError(f"spec kind {spec.kind!r} is not lower_tail")
    return _run_tail(spec, n_jobs, fit_kwargs)


def run_p2p_tail(spec: ExperimentSpec, n_jobs: int = 1, fit_kwargs=None) -> TailCurve:
    """Upper-tail curve for the bulk (boundary-free) passage time."""
    if spec.kind != "p2p_tail":
        raise ValueError(f"spec kind {spec.kind!r} is not p2p_tail")
    return _run_tail(spec, n_jobs, fit_kwargs)


# ---------------------------------------------------------------------------
# Variance scaling


@dataclass(frozen=True)
class VarianceRow:
    n: int
    n_samples: int
    var_hat: float
    jk_se: float


@dataclass(frozen=True)
class VarianceTable:
    rows: tuple[VarianceRow, ...]
    slope: float
    meta: dict


def _jackknife_variance_se(x: np.ndarray) -> float:
    """Standard error of the sample variance by leave-one-out jackknife."""
    n = x.size
    if n < 3:
        raise ValueError("need at least 3 samples for a jackknife")
    s1 = x.sum()
    s2 = float(x @ x)
    mean_i = (s1 - x) / (n - 1)
    ss_i = s2 - x * x - (n - 1) * mean_i * mean_i
    var_i = ss_i / (n - 2)
    return float(math.sqrt((n - 1) / n * np.sum((var_i - var_i.mean()) ** 2)))


def run_variance_scaling(spec: ExperimentSpec, n_jobs: int = 1) -> VarianceTable:
    """Sample variance of the chosen statistic at each size, with a log-log slope."""
    if spec.kind != "variance_scaling":
        raise ValueError(f"spec kind {spec.kind!r} is not variance_scaling")
    rows = []
    for n in spec.n_grid:
        seed = spec.seed.child(f"N{n}")
        jobs = [
            (spec.rho.rho, n, spec.statistic, seed.base_seed, seed.experiment_id, lo, hi)
            for lo, hi in _chunk_ranges(spec.replicates, n_jobs)
        ]
        samples = _gather(_variance_chunk, jobs, spec.replicates, n_jobs)
        rows.append(
            VarianceRow(
                n=n,
                n_samples=spec.replicates,
                var_hat=float(np.var(samples, ddof=1)),
                jk_se=_jackknife_variance_se(samples),
            )
        )
    slope, _, _ = _linear_fit(
        np.log([r.n for r in rows]), np.log([r.var_hat for r in rows])
    )
    meta = _experiment_meta(spec)
    return VarianceTable(rows=tuple(rows), slope=slope, meta=meta)


def run_experiment(spec: ExperimentSpec, n_jobs: int = 1, fit_kwargs=None):
    if spec.kind == "variance_scaling":
        return run_variance_scaling(spec, n_jobs)
    runner = {
        "exit_tail": run_exit_tail,
        "upper_tail": run_upper_tail,
        "lower_tail": run_lower_tail,
        "p2p_tail": run_p2p_tail,
    }[spec.kind]
    return runner(spec, n_jobs, fit_kwargs)


# ---------------------------------------------------------------------------
# CSV emission and parsing

_TAIL_HEADER = "threshold,n_samples,n_exceed,p_hat,ci_lo,ci_hi"
_VARIANCE_HEADER = "N,n_samples,var_hat,jk_se"


def _experiment_meta(spec: ExperimentSpec) -> dict:
    meta = {"kind": spec.kind, "rho": repr(spec.rho.rho)}
    if spec.kind == "variance_scaling":
        meta["n_grid"] = ":".join(str(v) for v in spec.n_grid)
        meta["statistic"] = spec.statistic
    else:
        meta["n"] = str(spec.n)
        cx, cy = CharacteristicSpec(spec.rho, spec.n).v
        meta["v"] = f"({cx},{cy})"
    meta.update(
        replicates=str(spec.replicates),
        base_seed=str(spec.seed.base_seed),
        experiment_id=spec.seed.experiment_id,
        rounding="half-up",
        version=__version__,
    )
    return meta


def _fit_lines(fit: ExponentFit) -> list[str]:
    lines = [
        "#fit kappa_hat={} c_hat={} logC_hat={} window=[{},{}] rss={}".format(
            repr(fit.kappa_hat),
            repr(fit.c_hat),
            repr(fit.log_c_hat),
            repr(fit.window[0]),
            repr(fit.window[1]),
            repr(fit.rss),
        ),
        "#fit kappa_ci_lo={} kappa_ci_hi={} kappa_loglog={} method={} ok={}".format(
            repr(fit.kappa_ci[0]),
            repr(fit.kappa_ci[1]),
            repr(fit.kappa_loglog),
            fit.method,
            int(fit.ok),
        ),
    ]
    if fit.error:
        lines.append(f"#fit error={fit.error}")
    for c in fit.comparisons:
        lines.append(
            "#fit_model kappa={} c_hat={} logC_hat={} rss={}".format(
                repr(c.kappa), repr(c.c_hat), repr(c.log_c_hat), repr(c.rss)
            )
        )
    for thr, reason in fit.excluded:
        lines.append(f"#fit_excluded threshold={repr(thr)} reason={reason}")
    return lines


def tail_csv_text(curve: TailCurve) -> str:
    lines = [f"#meta {k}={v}" for k, v in curve.meta.items()]
    lines.append(_TAIL_HEADER)
    for r in curve.rows:
        lines.append(
            f"{r.threshold!r},{r.n_samples},{r.n_exceed},{r.p_hat!r},{r.ci_lo!r},{r.ci_hi!r}"
        )
    if curve.fit is not None:
        lines.extend(_fit_lines(curve.fit))
    return "\n".join(lines) + "\n"


def write_tail_csv(curve: TailCurve, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(tail_csv_text(curve))


def variance_csv_text(table: VarianceTable) -> str:
    lines = [f"#meta {k}={v}" for k, v in table.meta.items()]
    lines.append(_VARIANCE_HEADER)
    for r in table.rows:
        lines.append(f"{r.n},{r.n_samples},{r.var_hat!r},{r.jk_se!r}")
    lines.append(f"#fit slope_hat={table.slope!r}")
    return "\n".join(lines) + "\n"


def write_variance_csv(table: VarianceTable, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(variance_csv_text(table))


def read_tail_csv(path) -> tuple[list[TailRow], dict, dict]:
    """Parse a tail CSV back into rows, metadata and accumulated fit keys."""
    rows: list[TailRow] = []
    meta: dict = {}
    fit_info: dict = {}
    header_seen = False
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#meta "):
                key, _, value = line[len("#meta ") :].partition("=")
                meta[key] = value
                continue
            if line.startswith("#fit"):
                tag = line.split(" ", 1)[0]
                for part in line.split(" ")[1:]:
                    key, _, value = part.partition("=")
                    fit_info.setdefault(tag.lstrip("#"), {})[key] = value
                continue
            if line.startswith("#"):
                continue
            if not header_seen:
                if line != _TAIL_HEADER:
                    raise ValueError(f"{path}:{lineno}: expected header {_TAIL_HEADER!r}")
                header_seen = True
                continue
            parts = line.split(",")
            if len(parts) != 6:
                raise ValueError(f"{path}:{lineno}: expected 6 columns, got {len(parts)}")
            rows.append(
                TailRow(
                    threshold=float(parts[0]),
                    n_samples=int(parts[1]),
                    n_exceed=int(parts[2]),
                    p_hat=float(parts[3]),
                    ci_lo=float(parts[4]),
                    ci_hi=float(parts[5]),
                )
            )
    if not header_seen:
        raise ValueError(f"{path}: no header line found")
    return rows, meta, fit_info


def append_fit_comments(path, fit: ExponentFit) -> None:
    with open(path, "a", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(_fit_lines(fit)) + "\n")
