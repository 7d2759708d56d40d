"""Equivariant descent: closed-form cross-checks and invariants."""

from math import pi

import numpy as np
import pytest

from symorbit.action import (
    angular_momentum,
    lagrange_min_action,
    minimize,
    newton_residual,
)
from symorbit.errors import NotCoercive
from symorbit.groups import UNIT_MASSES as M, named_group
from symorbit.loops import eval_loop, inertia, symmetrization_defect

EULER_MIN_HALF = 2 * pi * 0.75 * 25 ** (1 / 3)


def test_not_coercive_raises():
    with pytest.raises(NotCoercive):
        minimize(named_group("trivial"), M, 0.0, 1.0, N=8)
    with pytest.raises(NotCoercive):
        minimize(named_group("choreo3"), M, 1.0, 1.0, N=8)


def test_trivial_symmetry_minimum_is_equilateral_circle():
    res = minimize(named_group("trivial"), M, 0.5, 1.0, N=24, seed=0)
    assert res.converged
    target = lagrange_min_action(0.5, 1.0, M)
    assert abs(res.action - target) < 1e-6 * target
    I = inertia(res.loop, 512)
    assert np.ptp(I) / I.mean() < 1e-5
    x = eval_loop(res.loop.modes, 256)
    sides = np.array([np.abs(x[i] - x[j]) for i, j in ((0, 1), (0, 2), (1, 2))])
    assert np.ptp(sides) / sides.mean() < 1e-5


def test_lagrange_symmetry_reaches_the_same_minimum():
    res = minimize(named_group("lagrange"), M, 0.5, 1.0, N=24, seed=0)
    target = lagrange_min_action(0.5, 1.0, M)
    assert res.converged
    assert abs(res.action - target) < 1e-2 * target


def test_line_minimizer_beats_the_collinear_circle():
    res = minimize(named_group("line"), M, 0.5, 1.0, N=24, seed=0)
    assert res.converged
    assert res.action < EULER_MIN_HALF


def test_figure_eight_properties():
    res = minimize(named_group("d12"), M, 0.0, 1.0, N=32, seed=0)
    assert res.converged
    x = eval_loop(res.loop.modes, 512)
    scale = float(np.abs(x).max())
    assert res.min_pair_distance > 0.05 * scale
    assert np.abs(angular_momentum(res.loop)).max() < 1e-6
    assert newton_residual(res.loop, 0.0, 1.0) < 1e-3


def test_d6_minimizer_acquires_full_symmetry():
    res = minimize(named_group("d6"), M, 0.0, 2.5, N=24, seed=0, tol_grad=1e-7)
    assert symmetrization_defect(res.loop, named_group("d12")) < 1e-3


def test_determinism_per_seed():
    a = minimize(named_group("choreo3"), M, 0.5, 1.0, N=16, seed=3)
    b = minimize(named_group("choreo3"), M, 0.5, 1.0, N=16, seed=3)
    assert a.action == b.action
    assert np.array_equal(a.loop.modes, b.loop.modes)


def test_minimizer_angular_momentum_constant():
    res = minimize(named_group("choreo3"), M, 0.5, 1.0, N=24, seed=0)
    J = angular_momentum(res.loop, 512)
    assert np.ptp(J) < 1e-6
