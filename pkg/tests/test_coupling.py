import numpy as np
import pytest

from lpplab import (
    CharacteristicSpec,
    Density,
    Seed,
    brute_force_passage,
    build_coupled_pair,
    burke_increment_test,
    coupled_exit_equality,
    exit_time,
    last_axis_meeting,
    verify_equality,
)

REL = 1e-9


def test_pair_construction_invariants():
    pair = build_coupled_pair(20, 0.5, Seed(1, "pair"))
    assert pair.rep_corner.weight_at(0, 0) == 0.0
    assert pair.rep_line_profile.value(0) == 0.0
    # interior weights are copied verbatim from the shifted model
    assert np.array_equal(
        pair.rep_corner.weights[1:, 1:], pair.shifted.weights[21:, 21:]
    )
    # line field: zero on and below the antidiagonal, copied above
    assert pair.rep_line_field.weight_at(3, -3) == 0.0
    assert pair.rep_line_field.weight_at(2, 1) == pair.shifted.weight_at(2, 1)
    # boundary weights are passage increments of the shifted model
    for i in (1, 7, 20):
        inc = pair.shifted_passage(i, 0) - pair.shifted_passage(i - 1, 0)
        assert pair.rep_corner.weight_at(i, 0) == pytest.approx(inc, rel=REL)
    for j in (1, 13, 20):
        inc = pair.shifted_passage(0, j) - pair.shifted_passage(0, j - 1)
        assert pair.rep_corner.weight_at(0, j) == pytest.approx(inc, rel=REL)
    # profile values are re-centered passage times to the antidiagonal
    for t in (-20, -3, 0, 5, 20):
        expect = pair.shifted_passage(t, -t) - pair.shifted_passage(0, 0)
        assert pair.rep_line_profile.value(t) == pytest.approx(expect, rel=REL, abs=1e-12)


def test_three_way_equality_batch():
    for i in range(20):
        report = verify_equality(build_coupled_pair(20, 0.5, Seed(2, "eq", i)))
        assert report.ok, f"seed {i}: {report}"
        assert report.max_rel_err < REL


def test_three_way_equality_other_density():
    for i in range(10):
        report = verify_equality(build_coupled_pair(16, 0.3, Seed(3, "eq3", i)))
        assert report.ok


def test_axis_values_telescope_exactly():
    pair = build_coupled_pair(12, 0.4, Seed(4, "tel"))
    # corner-model passage along the bottom row telescopes to the shifted
    # model's re-centered passage times
    run = 0.0
    for i in range(1, 13):
        run += pair.rep_corner.weight_at(i, 0)
        expect = pair.shifted_passage(i, 0) - pair.shifted_passage(0, 0)
        assert run == pytest.approx(expect, rel=REL)


def test_equality_tiny_window_against_bruteforce():
    # n = 2: every quantity is verifiable by explicit path enumeration
    pair = build_coupled_pair(2, 0.5, Seed(5, "tiny"))
    g0 = brute_force_passage(pair.shifted, (-2, -2), (0, 0))
    for x in range(3):
        for y in range(3):
            direct = brute_force_passage(pair.rep_corner, (0, 0), (x, y))
            shifted = brute_force_passage(pair.shifted, (-2, -2), (x, y)) - g0
            assert direct == pytest.approx(shifted, rel=REL, abs=1e-12)


def test_burke_marginals():
    report = burke_increment_test(0.3, 16, 300, Seed(6, "burke"))
    assert report.p_x > 0.01 and report.p_y > 0.01
    assert abs(report.mean_x - 1 / 0.7) < 2 * report.se_x
    assert abs(report.mean_y - 1 / 0.3) < 2 * report.se_y


def test_burke_negative_control_rejects():
    # x increments tested against the wrong rate must fail for rho != 1/2
    report = burke_increment_test(0.3, 16, 300, Seed(7, "burke-neg"))
    assert report.control_p_x < 0.01


def test_coupled_exit_equality_batch():
    spec = CharacteristicSpec(Density(0.5), 128)  # v = (32, 32) = corner at n=32
    for i in range(100):
        pair = build_coupled_pair(32, 0.5, Seed(8, "zq", i))
        assert coupled_exit_equality(pair, spec)


def test_coupled_exit_equality_interior_target():
    spec = CharacteristicSpec(Density(0.5), 64)  # v = (16, 16) inside n=24
    for i in range(50):
        pair = build_coupled_pair(24, 0.5, Seed(9, "zq-in", i))
        assert coupled_exit_equality(pair, spec)


def test_coupled_exit_rejects_target_outside_window():
    pair = build_coupled_pair(8, 0.5, Seed(10, "zq-out"))
    with pytest.raises(ValueError):
        coupled_exit_equality(pair, CharacteristicSpec(Density(0.5), 64))


def test_coupled_exit_tiny_hand_check():
    # n = 2, v = (2, 2): both sides recomputed from first principles
    spec = CharacteristicSpec(Density(0.5), 8)
    for i in range(20):
        pair = build_coupled_pair(2, 0.5, Seed(11, "zq-tiny", i))
        z = exit_time(pair.rep_corner, spec).z
        q = last_axis_meeting(pair.rep_line_field, pair.rep_line_profile, (2, 2))
        assert z == q
        assert coupled_exit_equality(pair, spec) == (z == q)


def test_build_rejects_bad_n():
    with pytest.raises(ValueError):
        build_coupled_pair(0, 0.5, Seed(0))
