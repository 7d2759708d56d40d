"""Euler/Hill closed forms, bounds, scans, and equivariance of the paths."""

from math import log, pi

import numpy as np
import pytest

from symorbit.action import action
from symorbit.errors import DegenerateFrequency, GeometryViolated
from symorbit.groups import named_group
from symorbit.loops import equivariance_defect
from symorbit.testpaths import (
    EulerParams,
    HillParams,
    choreo21_admissible_winding,
    choreo21_comparison,
    choreo21_difference,
    choreo21_difference_derivative,
    euler_min_action,
    euler_orbit_action,
    hill_action_upper_bound,
    hill_test_action,
    line_symmetry_comparison,
    make_euler_loop,
    make_hill_loop,
    pair_average,
    pair_average_bound,
)

EULER_MIN_HALF = 2 * pi * 0.75 * 25 ** (1 / 3)


def test_euler_orbit_action_values():
    p = EulerParams(5 ** (1 / 3), 1, 0.5, 1.0)
    assert abs(euler_orbit_action(p) - EULER_MIN_HALF) < 1e-12
    p2 = EulerParams(1.0, 2, 2.0, 0.7)
    assert abs(euler_orbit_action(p2) - 2 * pi * (2 + 2.0**-0.7)) < 1e-12


def test_euler_min_action_closed_form():
    R, v = euler_min_action(0.5, 1)
    assert abs(R - 5 ** (1 / 3)) < 1e-14
    assert abs(v - EULER_MIN_HALF) < 1e-12 * v
    _, v0 = euler_min_action(0.5, 0)
    assert abs(v0 - v) < 1e-12
    with pytest.raises(DegenerateFrequency):
        euler_min_action(1.0, 1)


def test_euler_min_matches_golden_section_oracle():
    from scipy.optimize import minimize_scalar

    for omega, k in ((0.5, 1), (0.3, 0), (0.2, 1)):
        _, v = euler_min_action(omega, k)
        res = minimize_scalar(
            lambda R: euler_orbit_action(EulerParams(R, k, omega, 1.0)),
            bracket=(0.5, 2.0, 50.0),
            method="golden",
            options={"xtol": 1e-13},
        )
        assert abs(v - res.fun) < 1e-10 * v


def test_euler_action_convex_in_R():
    Rs = np.linspace(0.3, 6.0, 80)
    vals = [euler_orbit_action(EulerParams(R, 1, 0.5, 1.0)) for R in Rs]
    second = np.diff(vals, 2)
    assert (second > 0).all()


def test_hill_geometry_guard():
    with pytest.raises(GeometryViolated):
        HillParams(3.0, 1.0, 1, 0.5)


def test_hill_bound_reference_value():
    b = hill_action_upper_bound(HillParams(1.0, 0.8, 1, 0.5))
    exact = 2 * pi * (619.0 / 300.0 + (5.0 / 12.0) * log(144.0 / 119.0))
    assert abs(b - exact) < 1e-12 * exact
    assert b < EULER_MIN_HALF


def test_hill_quadrature_below_bound_sweep():
    rng = np.random.default_rng(0)
    count = 0
    while count < 50:
        d = rng.uniform(0.3, 2.0)
        R = rng.uniform(0.05, 3 * d * 0.95)
        p = HillParams(R, d, 1, 0.5)
        assert hill_test_action(p) <= hill_action_upper_bound(p) + 1e-12
        count += 1


def test_hill_small_R_limit():
    # avg -> 1 and the action diverges through the pair term
    p1 = HillParams(1e-3, 0.8, 1, 0.5)
    assert abs(pair_average(p1.R / (3 * p1.d), 1) - 1.0) < 1e-6
    assert hill_test_action(p1) > hill_test_action(HillParams(1.0, 0.8, 1, 0.5))


def test_average_bound_on_grid():
    for eps in np.arange(0.1, 0.95, 0.1):
        assert pair_average(eps, 1) <= pair_average_bound(eps) + 1e-12


def test_cross_module_loop_actions():
    pe = EulerParams(1.3, 1, 0.4, 1.0)
    le = make_euler_loop(pe)
    assert abs(action(le, 0.4, 1.0, 1024) - euler_orbit_action(pe)) < 1e-8
    ph = HillParams(0.9, 0.7, 1, 0.4)
    lh = make_hill_loop(ph)
    assert abs(action(lh, 0.4, 1.0, 2048) - hill_test_action(ph, 2048)) < 1e-8


def test_path_equivariance():
    line = named_group("line")
    c21 = named_group("choreo21")
    hill = named_group("hill")
    for k in (0, 1, 2, 3):
        le = make_euler_loop(EulerParams(1.0, k, 0.5, 1.0))
        assert equivariance_defect(le, line) < 1e-12
        lh = make_hill_loop(HillParams(1.0, 0.8, k, 0.5)) if k else None
        if k % 2 == 1:
            assert equivariance_defect(le, c21) < 1e-12
            assert equivariance_defect(lh, hill) < 1e-12
        elif k:
            assert equivariance_defect(le, c21) > 1e-3
            assert equivariance_defect(lh, hill) > 1e-3
    assert choreo21_admissible_winding(1) and not choreo21_admissible_winding(0)


def test_hill_dropping_third_body_recovers_two_body_part():
    # with the third-body term removed, the formula is the two-body circle
    # action: R^2(k-w)^2 + 1/(2R) (plus the frame term 3 w^2 d^2)
    for R, d, k, w in ((1.0, 0.8, 1, 0.5), (0.5, 1.1, 1, 0.3)):
        p = HillParams(R, d, k, w)
        two_body = 2 * pi * (3 * w**2 * d**2 + R**2 * (k - w) ** 2 + 1 / (2 * R))
        third = hill_test_action(p) - two_body
        assert third > 0
        assert abs(third - 2 * pi * (2 / (3 * d)) * pair_average(R / (3 * d), k)) < 1e-10


def test_line_scan():
    grid = [0.25, 0.5, 0.75]
    result = line_symmetry_comparison(grid, optimize_hill=True)
    assert result.winners[0.5] == "hill"
    branches = {(r.omega, r.branch, r.method) for r in result.rows}
    assert (0.5, "euler_k0", "closed_form") in branches
    assert (0.5, "hill_k1", "bound") in branches
    # euler branches swap under w -> 1 - w
    e0 = {r.omega: r.value for r in result.rows if r.branch == "euler_k0" and r.method == "closed_form"}
    e1 = {r.omega: r.value for r in result.rows if r.branch == "euler_k1" and r.method == "closed_form"}
    assert abs(e0[0.25] - e1[0.75]) < 1e-10
    assert abs(e0[0.75] - e1[0.25]) < 1e-10


def test_euler_branch_shrinks_towards_zero_frequency():
    # the k=0 branch scales like (k-w)^{2/3} and vanishes as w -> 0+
    vals = [euler_min_action(w, 0)[1] for w in (0.2, 0.1, 0.05)]
    assert vals[0] > vals[1] > vals[2]
    assert abs(vals[2] / vals[1] - 0.5 ** (2 / 3)) < 1e-12


def test_choreo21_comparison():
    grid = np.arange(0.0, 0.501, 0.05)
    result = choreo21_comparison(grid)
    assert all(r.branch in ("euler_k1", "hill_k1") for r in result.rows)
    for w in grid:
        assert choreo21_difference(float(w)) < 0
    # finite-difference derivative of the difference is positive and matches
    # the closed form
    for w in (0.0, 0.2, 0.45):
        h = 1e-5
        fd = (choreo21_difference(w + h) - choreo21_difference(w - h)) / (2 * h)
        assert fd > 0
        assert abs(fd - choreo21_difference_derivative(w)) < 1e-4 * max(1.0, abs(fd))
    assert choreo21_difference_derivative(0.0) > 0


def test_choreo21_rejects_even_grid_use():
    with pytest.raises(ValueError):
        choreo21_comparison([0.7])
