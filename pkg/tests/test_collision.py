"""Angular kernel, variations, and the certified inequality chain."""

from fractions import Fraction
from math import comb, factorial, pi

import numpy as np
import pytest

from symorbit.action import lagrange_central_config
from symorbit.collision import (
    ParabolicTrajectory,
    StandardVariation,
    beta_fn,
    check_g0_equivariant,
    delta_action_leading,
    delta_action_numeric,
    lemma_le2_certificate,
    parabolic_trajectory_eval,
    phi,
    phi_quadrature,
    phi_series,
    phi_series_first_term,
    s_function,
    s_function_scaled,
    standard_variation_eval,
    theta_bar,
    verify_collinear_triple,
    verify_triple_lagrange,
)
from symorbit.errors import (
    GridTooCoarse,
    NonEquivariantDelta,
    SeriesDiverges,
    ThetaOutOfRange,
)
from symorbit.groups import Masses

M = Masses(1.0, 1.0, 1.0)


# --- beta --------------------------------------------------------------------

def test_beta_basic_values():
    assert abs(beta_fn(1, 1) - 1.0) < 1e-15
    assert abs(beta_fn(2, 1) - 0.5) < 1e-15


def test_beta_recurrence():
    z, w = 0.7, 1.3
    assert abs(beta_fn(z + 1, w) - z / (z + w) * beta_fn(z, w)) < 1e-12


def test_beta_double_argument_identity():
    x, n = 0.75, 2

    def binom(a, k):
        num = 1.0
        for j in range(k):
            num *= a - j
        return num / factorial(k)

    lhs = beta_fn(x + n, x + n)
    rhs = (1 / 4**n) * binom(-x, n) / binom(-x - 0.5, n) * beta_fn(x, x)
    assert abs(lhs - rhs) < 1e-12 * lhs


def test_beta_domain_error():
    with pytest.raises(ValueError):
        beta_fn(-1.0, 1.0)


# --- quadrature kernel ----------------------------------------------------------

def test_phi_exact_value_at_pi():
    # Phi_1(pi) = -3*pi/2 by the substitution u = t^{2/3} and an arctangent
    r = phi_quadrature(1.0, pi)
    assert abs(r.value + 1.5 * pi) < 1e-10
    assert r.est_error < 1e-8


@pytest.mark.parametrize("alpha", [0.5, 1.0, 1.5])
def test_phi_symmetry(alpha):
    for th in np.linspace(0.2, pi, 17):
        d = phi_quadrature(alpha, th).value - phi_quadrature(alpha, 2 * pi - th).value
        assert abs(d) < 1e-10


@pytest.mark.parametrize("alpha", [0.5, 1.0, 1.5])
def test_phi_monotone_decreasing(alpha):
    grid = np.linspace(0.25, pi, 12)
    vals = [phi(alpha, th) for th in grid]
    assert all(b < a for a, b in zip(vals, vals[1:]))


def test_phi_ordering_example():
    assert phi(1.0, pi) < phi(1.0, pi / 2) < phi(1.0, pi / 4)


def test_phi_divergence_towards_zero_angle():
    # alpha >= 1: grows without bound like theta^(1-alpha)
    v1 = phi(1.5, 0.1)
    v2 = phi(1.5, 0.01)
    v3 = phi(1.5, 0.001)
    assert v3 > v2 > v1 > 0
    assert v3 > 3 * v2 > 9 * v1  # sqrt(10) growth per decade, roughly
    # alpha < 1: stays bounded
    assert phi(0.5, 1e-3) < 10


def test_phi_domain_errors():
    with pytest.raises(ThetaOutOfRange):
        phi_quadrature(1.0, 0.0)
    with pytest.raises(ThetaOutOfRange):
        phi_quadrature(2.5, 1.0)


# --- series kernel ---------------------------------------------------------------

def test_series_matches_quadrature():
    for alpha, th, terms in ((1.0, 2 * pi / 3, 60), (0.5, 2.0, 80), (1.5, 1.9, 120)):
        s = phi_series(alpha, th, terms)
        q = phi_quadrature(alpha, th)
        assert abs(s.value - q.value) < 1e-6
        assert s.est_error < 1e-6


def test_series_at_theta_pi():
    s = phi_series(1.0, pi, 300000)
    q = phi_quadrature(1.0, pi)
    assert abs(s.value - q.value) < 1e-6


def test_series_agreement_over_central_window():
    # within the reported error bounds everywhere; to 1e-6 outright wherever
    # 400 terms suffice (everywhere except the slowly-alternating theta = pi)
    for alpha in (0.5, 1.0, 1.5):
        for th in np.linspace(pi / 3, 5 * pi / 3, 9):
            s = phi_series(alpha, th, 400)
            q = phi_quadrature(alpha, th)
            budget = s.est_error + q.est_error + 1e-9
            assert abs(s.value - q.value) <= budget, (alpha, th)
            if s.est_error < 1e-6:
                assert abs(s.value - q.value) < 1e-6, (alpha, th)


def test_series_first_term():
    for alpha in (0.5, 1.0, 1.5):
        x = (alpha + 2) / 4
        expect = (alpha * (alpha + 2) / 2) * (1 / (alpha - 2)) * beta_fn(x, x)
        assert abs(phi_series_first_term(alpha) - expect) < 1e-14


def test_series_divergence_guard():
    with pytest.raises(SeriesDiverges):
        phi_series(1.5, 0.05)


# --- theta_bar and S ----------------------------------------------------------

def test_theta_bar():
    tb = theta_bar(1.0)
    assert 0 < tb < pi / 2
    assert phi(1.0, tb - 0.1) > 0
    assert phi(1.0, tb + 0.1) < 0
    assert abs(phi(1.0, tb)) < 1e-8


def test_theta_bar_other_alphas():
    for alpha in (0.5, 1.5):
        tb = theta_bar(alpha)
        assert 0 < tb < pi / 2


def test_s_function_orthogonal_direction_negative():
    # theta = pi/2 exceeds the kernel root, so S < 0
    assert s_function(1.0 + 0.0j, 1j, 1.0) < 0


def test_s_function_antiparallel_is_minimal():
    vals = [s_function(1.0, np.exp(1j * th), 1.0) for th in (pi / 2, 3 * pi / 4, pi)]
    assert vals[2] < vals[1] < vals[0]


def test_s_function_scaling():
    v1 = s_function(2.0 + 0.0j, 1j, 1.0)
    v2 = s_function(1.0 + 0.0j, 1j, 1.0)
    assert abs(v1 - 2.0 ** (-1.5) * v2) < 1e-12
    # scaled form in the displacement
    w = 0.3j
    assert abs(
        s_function_scaled(1.0, w, 1.0) - 0.3 ** (1 - 0.5) * s_function(1.0, 1j, 1.0)
    ) < 1e-12


def test_s_function_errors():
    from symorbit.errors import ZeroSeparation

    with pytest.raises(ZeroSeparation):
        s_function(0.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        s_function(1.0, 2.0, 1.0)


# --- variations -------------------------------------------------------------------

def test_standard_variation_profile():
    delta = np.array([0.3 + 0.4j, 0.0, 0.0])
    v = StandardVariation(delta, T=2.0)
    assert np.allclose(standard_variation_eval(v, 0.0), delta)
    assert np.allclose(standard_variation_eval(v, 2.5), 0.0)
    assert np.allclose(standard_variation_eval(v, -3.0), 0.0)
    nd = v.norm
    left = standard_variation_eval(v, 2.0 - nd - 1e-12)
    right = standard_variation_eval(v, 2.0 - nd + 1e-12)
    assert np.abs(left - right).max() < 1e-9


def test_parabolic_trajectory_eval():
    xi = np.array([0.5j, -0.5j, 0.0])
    q = ParabolicTrajectory(xi, 1.0, (1, 2), M)
    assert np.abs(parabolic_trajectory_eval(q, 0.0)).max() == 0.0
    assert np.allclose(parabolic_trajectory_eval(q, 1.0), xi)
    lam = 2.7
    t = 0.9
    lhs = parabolic_trajectory_eval(q, lam * t)
    rhs = lam ** (2.0 / 3.0) * parabolic_trajectory_eval(q, t)
    assert np.abs(lhs - rhs).max() < 1e-12


def test_escaping_path_is_g0_equivariant():
    # y(t) = q(t) + v(t) with a g0-fixed delta satisfies y(-t) = g0 y(t)
    xi = np.array([0.5j, -0.5j, 0.0])
    q = ParabolicTrajectory(xi, 1.0, (1, 2), M)
    delta = np.array([0.01j, -0.01j, 0.0])
    check_g0_equivariant(delta)
    v = StandardVariation(delta, T=2.0)
    swap = (1, 0, 2)
    for t in np.linspace(-1.8, 1.8, 25):
        y_t = parabolic_trajectory_eval(q, t) + standard_variation_eval(v, t)
        y_mt = parabolic_trajectory_eval(q, -t) + standard_variation_eval(v, -t)
        g0_y = np.conj(y_t)[list(swap)]
        assert np.abs(y_mt - g0_y).max() < 1e-12


def test_g0_equivariance_check():
    with pytest.raises(NonEquivariantDelta):
        check_g0_equivariant(np.array([1.0, 1.0, 1.0j]))
    q = ParabolicTrajectory(np.array([0.5j, -0.5j, 0.0]), 1.0, (1, 2), M)
    with pytest.raises(NonEquivariantDelta):
        delta_action_leading(q, np.array([0.01, 0.02, 0.0]), M)


def g0_lagrange_trajectory(alpha=1.0):
    xi0 = lagrange_central_config(M)
    xi = xi0 * np.exp(-1j * np.angle(xi0[2]))  # third body on the fixed line
    return ParabolicTrajectory(xi, alpha, (1, 2, 3), M)


def test_leading_binary_negative():
    q = ParabolicTrajectory(np.array([0.5j, -0.5j, 0.0]), 1.0, (1, 2), M)
    s = 1e-3 / np.sqrt(2.0)
    delta = np.array([1j * s, -1j * s, 0.0])
    assert delta_action_leading(q, delta, M) < 0


def test_leading_triple_negative():
    q = g0_lagrange_trajectory()
    delta = np.array([0.0, 0.0, 1e-3])
    assert delta_action_leading(q, delta, M) < 0


def test_leading_scaling_in_delta():
    q = ParabolicTrajectory(np.array([0.5j, -0.5j, 0.0]), 1.0, (1, 2), M)
    d1 = np.array([1j, -1j, 0.0]) * 1e-3
    v1 = delta_action_leading(q, d1, M)
    v2 = delta_action_leading(q, d1 / 2, M)
    assert abs(v2 / v1 - 0.5 ** (1 - 0.5)) < 1e-12


def test_numeric_zero_variation():
    q = g0_lagrange_trajectory()
    v = StandardVariation(np.zeros(3, dtype=complex), T=2.0)
    assert delta_action_numeric(q, v, M, 1.0) == 0.0


def test_numeric_to_leading_ratio_triple():
    q = g0_lagrange_trajectory()
    delta = np.array([0.0, 0.0, 1e-3])
    lead = delta_action_leading(q, delta, M)
    num = delta_action_numeric(q, StandardVariation(delta, T=4.0), M, 1.0)
    assert lead < 0 and num < 0
    assert 0.95 <= num / lead <= 1.05


def test_numeric_to_leading_ratio_binary():
    q = ParabolicTrajectory(np.array([0.5j, -0.5j, 0.0]), 1.0, (1, 2), M)
    s = 1e-3 / np.sqrt(2.0)
    delta = np.array([1j * s, -1j * s, 0.0])
    lead = delta_action_leading(q, delta, M)
    num = delta_action_numeric(q, StandardVariation(delta, T=4.0), M, 1.0)
    assert 0.95 <= num / lead <= 1.05


@pytest.mark.parametrize("alpha", [0.5, 1.0, 1.5])
def test_numeric_sign_certified_variations(alpha):
    q = g0_lagrange_trajectory(alpha)
    delta = np.array([0.0, 0.0, 1e-2])
    assert delta_action_numeric(q, StandardVariation(delta, T=3.0), M, alpha) < 0
    qb = ParabolicTrajectory(np.array([0.5j, -0.5j, 0.0]), alpha, (1, 2), M)
    db = np.array([1j, -1j, 0.0]) * 1e-2 / np.sqrt(2)
    assert delta_action_numeric(qb, StandardVariation(db, T=3.0), M, alpha) < 0


def test_grid_too_coarse_on_collision_course():
    # pushing the pair together creates a genuine collision of the perturbed
    # path; the refinement check must flag it rather than return a number
    q = ParabolicTrajectory(np.array([0.5j, -0.5j, 0.0]), 1.0, (1, 2), M)
    s = 1e-2 / np.sqrt(2.0)
    delta = np.array([-1j * s, 1j * s, 0.0])
    with pytest.raises(GridTooCoarse):
        delta_action_numeric(q, StandardVariation(delta, T=4.0), M, 1.0)


# --- sweeps ---------------------------------------------------------------------

def test_triple_lagrange_sweep_sample():
    rep = verify_triple_lagrange(np.linspace(0.25, 1.75, 5), np.linspace(0, pi / 2, 5))
    assert rep.all_passed
    assert min(r.margin for r in rep.rows) > 0


def test_triple_lagrange_small_gamma_both_negative():
    for g in (0.0, pi / 12, pi / 6):
        assert phi(1.0, 2 * pi / 3 + g) < 0
        assert phi(1.0, 2 * pi / 3 - g) < 0


def test_triple_lagrange_gamma_right_endpoint_reduces():
    lhs = phi(1.0, 2 * pi / 3 + pi / 2) + phi(1.0, 2 * pi / 3 - pi / 2)
    rhs = phi(1.0, 7 * pi / 6) + phi(1.0, pi / 6)
    assert abs(lhs - rhs) < 1e-12
    assert rhs < 0


def test_collinear_sweep():
    rep = verify_collinear_triple(1.0, [0.0, 0.25, 0.5, 0.75, 0.9])
    assert rep.all_passed
    # mu = 0: the middle body sits at the cluster center; its two kernel
    # terms coincide with the binary estimate doubled
    rows0 = [r for r in rep.rows if r.parameter == 0.0]
    assert all(r.value < 0 for r in rows0)


# --- exact certificate -------------------------------------------------------------

def test_le2_certificate():
    cert = lemma_le2_certificate()
    assert cert.tail_value == Fraction(27, 35)
    assert cert.p_at_one == 4480
    assert cert.shifted_positive
    assert cert.identity_ok
    assert cert.cubic_ok
    assert cert.passed


def test_le2_head_is_negative_numerically():
    # float cross-check of the certified inequality on a grid
    from symorbit.collision import _f_k

    for x in np.linspace(0.51, 0.99, 25):
        fx = Fraction(float(x)).limit_denominator(10**6)
        head = 1.0 / (float(fx) - 1.0) + 27.0 / 35.0
        for k in range(1, 5):
            head += float(_f_k(fx, k)) * 0.75**k
        assert head < 0
