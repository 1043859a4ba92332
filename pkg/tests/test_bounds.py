import math

import numpy as np
import pytest

from lpplab import (
    Density,
    MgfSpec,
    Seed,
    TailModel,
    boundary_sum_mgf_mc,
    delta0,
    log_mgf_closed_form,
    mgf_bound_ratio,
    mgf_closed_form,
    mgf_mc_null_se,
    reference_curve,
)


def test_mgf_closed_form_small_case():
    # x_bar = 4, lambda = 1 (u = 1/2): (2 e^{-1/2})^4 = 16 e^{-2}
    assert math.exp(log_mgf_closed_form(4.0, 1.0)) == pytest.approx(16 * math.exp(-2), rel=1e-12)


def test_mgf_tends_to_one_at_zero():
    assert math.exp(log_mgf_closed_form(100.0, 1e-9)) == pytest.approx(1.0, abs=1e-12)


def test_mgf_domain_errors():
    with pytest.raises(ValueError):
        log_mgf_closed_form(4.0, 2.0)  # lambda = sqrt(x_bar): diverges
    with pytest.raises(ValueError):
        log_mgf_closed_form(4.0, 3.0)
    with pytest.raises(ValueError):
        log_mgf_closed_form(-1.0, 0.5)


def test_mgf_spec_validation():
    spec = MgfSpec(Density(0.5), r=1.0, n=1000, lam=1.0)
    assert spec.x_bar == pytest.approx(2 * 1000 ** (2 / 3))
    assert mgf_closed_form(spec) > 1.0
    with pytest.raises(ValueError):
        MgfSpec(Density(0.5), r=-1.0, n=1000, lam=1.0)
    with pytest.raises(ValueError):
        MgfSpec(Density(0.5), r=0.0, n=8, lam=10.0)  # lam >= sqrt(x_bar) = 2
    with pytest.raises(ValueError):
        MgfSpec(Density(0.5), r=1.0, n=1000, lam=1.0, c_star=0.5)


def test_mgf_independent_of_density():
    # the centered, scaled boundary-sum MGF does not depend on the rate
    for rho in (0.2, 0.5, 0.9):
        spec = MgfSpec(Density(rho), r=0.5, n=500, lam=2.0)
        assert mgf_closed_form(spec) == pytest.approx(
            mgf_closed_form(MgfSpec(Density(0.5), r=0.5, n=500, lam=2.0)), rel=1e-12
        )


def test_mgf_matches_monte_carlo_oracle():
    for lam, rho in ((1.0, 0.5), (1.0, 0.3)):
        mean, se = boundary_sum_mgf_mc(10**4, lam, rho, 10**6, Seed(50, f"mgf-{rho}"))
        closed = math.exp(log_mgf_closed_form(10**4, lam))
        assert abs(mean - closed) < 3 * se


def test_mgf_null_se_matches_sample_se_in_light_regime():
    # at lam = 1 the integrand is light-tailed, so the closed-form SE and the
    # empirical SE must agree; at lam = 5 the sample SE collapses below it
    _, se_sample = boundary_sum_mgf_mc(10**4, 1.0, 0.5, 10**5, Seed(51, "se"))
    se_null = mgf_mc_null_se(10**4, 1.0, 10**5)
    assert se_sample == pytest.approx(se_null, rel=0.1)
    _, se_sample5 = boundary_sum_mgf_mc(10**4, 5.0, 0.5, 10**5, Seed(51, "se5"))
    assert se_sample5 < mgf_mc_null_se(10**4, 5.0, 10**5)


def test_bound_ratio_monotone_and_limits():
    us = np.linspace(1e-6, 1 - 1e-6, 4000)
    vals = np.array([mgf_bound_ratio(float(u)) for u in us])
    assert (np.diff(vals) > 0).all()
    assert vals[0] == pytest.approx(0.5, abs=1e-5)
    # growth toward 1 is logarithmic; the largest representable u tops 30
    assert vals[-1] > 12
    assert mgf_bound_ratio(1 - 2.0**-53) > 30


def test_bound_ratio_series_matches_direct_form():
    # the series branch (u < 0.5) and the closed form agree at the seam
    for u in (0.4995, 0.4999, 0.5001, 0.51):
        direct = (-math.log1p(-u) - u) / (u * u)
        assert mgf_bound_ratio(u) == pytest.approx(direct, rel=1e-12)


def test_delta0_values():
    assert delta0(1.0) == pytest.approx(0.6838026, abs=1e-6)
    assert delta0(100.0) > 0.99
    assert delta0(0.5 + 1e-6) < 0.01
    with pytest.raises(ValueError):
        delta0(0.5)
    with pytest.raises(ValueError):
        delta0(0.1)


def test_delta0_threshold_is_sharp():
    for c_star in (0.75, 1.0, 2.0, 10.0):
        u_star = delta0(c_star)
        assert mgf_bound_ratio(u_star) <= c_star * (1 + 1e-9)
        u_above = u_star + max(1e-9, (1 - u_star) * 1e-2)
        assert mgf_bound_ratio(u_above) > c_star


def test_quadratic_bound_through_closed_form():
    # log MGF <= c* lambda^2 iff u <= delta0(c*), checked on an (x_bar, u) grid
    for c_star in (0.75, 1.0, 2.0, 10.0):
        u_star = delta0(c_star)
        for x_bar in (100.0, 10**4):
            for frac in (0.1, 0.5, 0.9, 1.0):
                u = u_star * frac
                lam = u * math.sqrt(x_bar)
                assert log_mgf_closed_form(x_bar, lam) <= c_star * lam * lam * (1 + 1e-9)
            u = u_star + (1 - u_star) * 0.02
            lam = u * math.sqrt(x_bar)
            assert log_mgf_closed_form(x_bar, lam) > c_star * lam * lam


def test_reference_curve_families():
    assert reference_curve(TailModel("exit_cubic", 1.0, 1.0), 1.0) == pytest.approx(math.exp(-1))
    assert reference_curve(TailModel("upper_three_halves", 1.0, 1.0), 4.0) == pytest.approx(
        math.exp(-8)
    )
    assert reference_curve(TailModel("lower_cubic", 2.0, 0.5), 1e-9) == 1.0  # clamped
    assert reference_curve(TailModel("p2p_upper", 1.0, 2.0), 1.0) == pytest.approx(math.exp(-2))
    assert reference_curve(TailModel("p2p_lower", 1.0, 1.0), 2.0) == pytest.approx(math.exp(-8))


def test_reference_curve_validation():
    with pytest.raises(ValueError):
        TailModel("nope", 1.0, 1.0)
    with pytest.raises(ValueError):
        TailModel("exit_cubic", -1.0, 1.0)
    with pytest.raises(ValueError):
        reference_curve(TailModel("exit_cubic", 1.0, 1.0), 0.0)
