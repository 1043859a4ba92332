"""Closed-form boundary-sum MGF, its quadratic-bound threshold, and reference
tail curves used as overlays and fit targets.

The centered, scaled sum of ``x_bar`` i.i.d. boundary weights has moment
generating function ``((1/(1-u)) e^{-u})^{x_bar}`` at ``u = lambda /
sqrt(x_bar)``, independent of the boundary rate.  Its logarithm equals
``lambda^2 * phi(u)`` with ``phi(u) = (-ln(1-u) - u) / u^2`` strictly
increasing from 1/2, so for any target constant ``c > 1/2`` the bound
``log MGF <= c * lambda^2`` holds exactly up to the unique root ``phi(u) = c``
and fails beyond it.  :func:`delta0` computes that root.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .environment import Density, as_density
from .rng import Seed

__all__ = [
    "MgfSpec",
    "TailModel",
    "TAIL_EXPONENTS",
    "mgf_closed_form",
    "log_mgf_closed_form",
    "mgf_bound_ratio",
    "delta0",
    "reference_curve",
    "boundary_sum_mgf_mc",
]


@dataclass(frozen=True)
class MgfSpec:
    """Parameters of one MGF evaluation at the moderate-deviation scale."""

    rho: Density
    r: float
    n: int
    lam: float
    c_star: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "rho", as_density(self.rho))
        if self.r < 0.0:
            raise ValueError(f"r must be nonnegative, got {self.r}")
        if self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n}")
        if not self.lam > 0.0:
            raise ValueError(f"lambda must be positive, got {self.lam}")
        if not self.c_star > 0.5:
            raise ValueError(f"c_star must exceed 1/2, got {self.c_star}")
        if not self.lam < math.sqrt(self.x_bar):
            raise ValueError(
                f"lambda = {self.lam} must stay below sqrt(x_bar) = {math.sqrt(self.x_bar)}"
            )

    @property
    def x_bar(self) -> float:
        return (self.r + 1.0) * float(self.n) ** (2.0 / 3.0)


def log_mgf_closed_form(x_bar: float, lam: float) -> float:
    """log of the centered boundary-sum MGF: x_bar * (-ln(1-u) - u), u = lam/sqrt(x_bar)."""
    if not x_bar > 0.0:
        raise ValueError(f"x_bar must be positive, got {x_bar}")
    if not 0.0 < lam < math.sqrt(x_bar):
        raise ValueError(f"lambda = {lam} outside (0, sqrt(x_bar) = {math.sqrt(x_bar)})")
    u = lam / math.sqrt(x_bar)
    return x_bar * (-math.log1p(-u) - u)


def mgf_closed_form(spec: MgfSpec) -> float:
    """((1/(1-u)) e^{-u})^{x_bar}, evaluated through the log for stability."""
    return math.exp(log_mgf_closed_form(spec.x_bar, spec.lam))


def mgf_bound_ratio(u: float) -> float:
    """phi(u) = (-ln(1-u) - u) / u^2, the per-unit-lambda^2 log-MGF cost.

    Strictly increasing on (0, 1) with limit 1/2 at 0+.  A short series is
    used for small u where the direct formula loses its leading digits.
    """
    if not 0.0 < u < 1.0:
        raise ValueError(f"u must lie in (0, 1), got {u}")
    if u < 0.5:
        # phi(u) = sum_{k>=0} u^k / (k + 2); geometric tail, converges fast.
        total = 0.0
        term = 1.0
        k = 0
        while True:
            inc = term / (k + 2)
            total += inc
            if inc < 1e-18:
                return total
            term *= u
            k += 1
    return (-math.log1p(-u) - u) / (u * u)


def delta0(c_star: float) -> float:
    """Largest u in (0, 1) with ``log MGF <= c_star * lambda^2`` for all u' <= u.

    Parameters
    ----------
    c_star : float
        Quadratic-bound constant; must exceed 1/2 (the limit of the ratio at
        0+), otherwise no threshold exists.

    Returns
    -------
    float
        The unique root of ``mgf_bound_ratio(u) = c_star``, located by
        bisection to 1e-12.  Tends to 1 as c_star grows; for c_star beyond
        ~35 the root is within one ulp of 1 and is clamped below 1.
    """
    if not c_star > 0.5:
        raise ValueError(f"c_star must exceed 1/2, got {c_star}")
    lo, hi = 1e-300, 1.0 - 2.0**-53
    if mgf_bound_ratio(hi) <= c_star:
        return hi
    while hi - lo > 1e-12:
        mid = 0.5 * (lo + hi)
        if mgf_bound_ratio(mid) <= c_star:
            lo = mid
        else:
            hi = mid
    return lo


TAIL_EXPONENTS = {
    "exit_cubic": 3.0,
    "upper_three_halves": 1.5,
    "lower_cubic": 3.0,
    "p2p_upper": 1.5,
    "p2p_lower": 3.0,
}


@dataclass(frozen=True)
class TailModel:
    """Stretched-exponential reference curve C * exp(-c * t^kappa)."""

    family: str
    big_c: float
    small_c: float

    def __post_init__(self) -> None:
        if self.family not in TAIL_EXPONENTS:
            raise ValueError(f"unknown tail family {self.family!r}")
        if not (self.big_c > 0.0 and self.small_c > 0.0):
            raise ValueError("tail-model constants must be positive")

    @property
    def kappa(self) -> float:
        return TAIL_EXPONENTS[self.family]


def reference_curve(model: TailModel, argument: float) -> float:
    """min(1, C exp(-c t^kappa)); probability scale, clamped to [0, 1]."""
    if not argument > 0.0:
        raise ValueError(f"argument must be positive, got {argument}")
    return min(1.0, model.big_c * math.exp(-model.small_c * argument**model.kappa))


def boundary_sum_mgf_mc(
    x_bar: int, lam: float, rho, n_samples: int, seed: Seed
) -> tuple[float, float]:
    """Monte Carlo oracle for the centered boundary-sum MGF.

    Samples the sum of ``x_bar`` i.i.d. rate-(1-rho) weights through its
    Gamma(x_bar, 1/(1-rho)) law and averages
    ``exp(lam * (1-rho) * (S - x_bar/(1-rho)) / sqrt(x_bar))``.

    Returns
    -------
    (mean, sample_standard_error)
        The sample SE badly understates the estimator's spread once
        ``lam`` is a few units (the mean is carried by rare draws); use
        :func:`mgf_mc_null_se` for consistency tests in that regime.
    """
    r = as_density(rho).rho
    stream = seed.stream()
    s = stream.gamma(shape=float(x_bar), scale=1.0 / (1.0 - r), size=n_samples)
    terms = np.exp(lam * ((1.0 - r) * s - x_bar) / math.sqrt(x_bar))
    return float(terms.mean()), float(terms.std(ddof=1) / math.sqrt(n_samples))


def mgf_mc_null_se(x_bar: float, lam: float, n_samples: int) -> float:
    """Exact standard error of the MC mean when the closed form holds.

    Var of one term is M(2 lam) - M(lam)^2, available in closed form, so the
    z-test against the closed-form value needs no sample variance (which is
    itself unreliable for heavy-tailed integrands).
    """
    log_m1 = log_mgf_closed_form(x_bar, lam)
    log_m2 = log_mgf_closed_form(x_bar, 2.0 * lam)
    return math.exp(log_m1) * math.sqrt(math.expm1(log_m2 - 2.0 * log_m1) / n_samples)
