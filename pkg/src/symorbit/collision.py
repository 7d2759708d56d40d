"""Local variations around parabolic collision trajectories.

The machinery that excludes collisions: the angular kernel

    Phi_a(th) = int_0^inf [ (t^{4/(a+2)} - 2 cos(th) t^{2/(a+2)} + 1)^{-a/2}
                            - t^{-2a/(a+2)} ] dt,      a in (0, 2),

its hypergeometric-style series in cos(th) with Euler beta coefficients, the
scaled kernel S, the root theta_bar of Phi, piecewise-linear standard
variations, and the first-order action differential they produce on a
parabolic collision trajectory q_i(t) = |t|^{2/(2+a)} xi_i.  The sign of the
relevant Phi combinations certifies that binary and triple collisions always
admit an action-decreasing local variation; the one series inequality that
needs exact arithmetic is checked over the rationals.

Quadrature route: substituting u = t^{2/(a+2)} gives

    Phi_a(th) = (a+2)/2 * int_0^inf [ (u^2 - 2 c u + 1)^{-a/2} - u^{-a} ] u^{a/2} du

with c = cos(th); the finite part [0, A] is integrated adaptively (with a
break point at the near-singular u = 1), the subtracted power integrates in
closed form, and the tail is summed exactly termwise through the Gegenbauer
expansion (1 - 2c/u + 1/u^2)^{-a/2} = sum_k C_k^{(a/2)}(c) u^{-k}.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import pi

import numpy as np
from scipy.integrate import quad
from scipy.optimize import bisect
from scipy.special import eval_gegenbauer, gammaln

from .errors import (
    GridTooCoarse,
    NonEquivariantDelta,
    RootNotBracketed,
    SeriesDiverges,
    ThetaOutOfRange,
    ZeroSeparation,
)
from .groups import Masses

_PAIRS = ((0, 1), (0, 2), (1, 2))


def beta_fn(z: float, w: float) -> float:
    """Euler beta via log-gamma; relative error at double precision."""
    if z <= 0 or w <= 0:
        raise ValueError(f"beta requires positive arguments, got ({z}, {w})")
    return float(np.exp(gammaln(z) + gammaln(w) - gammaln(z + w)))


@dataclass(frozen=True)
class PhiResult:
    theta: float
    alpha: float
    value: float
    method: str
    est_error: float


def _check_domain(alpha: float, theta: float):
    if not 0 < alpha < 2:
        raise ThetaOutOfRange(f"alpha must lie in (0,2), got {alpha}")
    if not 0 < theta < 2 * pi:
        raise ThetaOutOfRange(f"theta must lie in (0, 2*pi), got {theta}")


def phi_quadrature(alpha: float, theta: float, tail_terms: int = 80) -> PhiResult:
    _check_domain(alpha, theta)
    c = np.cos(theta)
    A = 8.0
    lam = alpha / 2.0

    def g(u):
        return (u * u - 2 * c * u + 1.0) ** (-lam) * u**lam

    val1, err1 = quad(g, 0.0, A, points=[1.0], limit=400, epsabs=1e-13, epsrel=1e-12)
    closed = (2.0 / (2.0 - alpha)) * A ** (1.0 - lam)
    k = np.arange(1, tail_terms + 1)
    coeff = eval_gegenbauer(k, lam, c)
    tail = float(np.sum(coeff * A ** (1.0 - lam - k) / (lam + k - 1.0)))
    # remainder bound via |C_k(c)| <= C_k(1) and the geometric factor 1/A
    ck1 = float(eval_gegenbauer(tail_terms + 1, lam, 1.0))
    tail_err = ck1 * A ** (-lam - tail_terms) / (lam + tail_terms) / (1.0 - 1.0 / A)
    scale = (alpha + 2.0) / 2.0
    return PhiResult(
        theta=theta,
        alpha=alpha,
        value=scale * (val1 - closed + tail),
        method="quadrature",
        est_error=scale * (err1 + tail_err),
    )


SERIES_COS_LIMIT = 0.995


def phi_series(alpha: float, theta: float, terms: int = 200) -> PhiResult:
    """Series in cos(theta) from the beta-function expansion.

    Terms behave like k^{a/2 - 3/2} cos(th)^k, so convergence is geometric in
    |cos th| and only algebraic (alternating) at theta == pi; near theta = 0
    or 2*pi with a >= 1 the series is useless and SeriesDiverges is raised.
    """
    _check_domain(alpha, theta)
    if terms < 1:
        raise ValueError("terms must be >= 1")
    c = float(np.cos(theta))
    # positive cos: terms ~ k^{a/2-3/2} c^k, divergent in the c -> 1 limit for
    # a >= 1 and hopeless just below it; negative cos alternates and converges
    if c >= 1.0 - 1e-15 or (alpha >= 1.0 and c > SERIES_COS_LIMIT):
        raise SeriesDiverges(f"cos theta = {c:.6f} too close to 1 at alpha = {alpha}")
    x = (alpha + 2.0) / 4.0
    k = np.arange(1, terms + 1, dtype=float)
    # C(-a/2, k) (-1)^k = Gamma(a/2 + k) / (Gamma(a/2) k!) > 0
    log_mag = (
        gammaln(alpha / 2.0 + k)
        - gammaln(alpha / 2.0)
        - gammaln(k + 1.0)
        + k * np.log(2.0 * abs(c) if c != 0 else 1e-300)
        + np.log((alpha + 2 * k) / (alpha + 2 * k - 2.0))
        + 2 * gammaln(x + k / 2.0)
        - gammaln(2 * x + k)
    )
    signs = np.ones_like(k) if c >= 0 else (-1.0) ** k
    terms_v = signs * np.exp(log_mag)
    total = float(terms_v.sum())
    a_last = float(np.exp(log_mag[-1]))
    if c < 0:
        # alternating: the limit lies between consecutive partial sums
        total -= 0.5 * terms_v[-1]
        est = 0.5 * a_last
    else:
        r = abs(c) * (1.0 + 2.0 / terms)
        est = a_last * r / (1.0 - r) if r < 1 else np.inf
    first = beta_fn(x, x) / (alpha - 2.0)
    value = (alpha * (alpha + 2.0) / 2.0) * (first + total / alpha)
    return PhiResult(theta, alpha, value, "series", (alpha + 2.0) / 2.0 * est)


def phi_series_first_term(alpha: float) -> float:
    """Zero-order term of the expansion: (a(a+2)/2) * beta((a+2)/4,(a+2)/4) / (a-2)."""
    x = (alpha + 2.0) / 4.0
    return (alpha * (alpha + 2.0) / 2.0) * beta_fn(x, x) / (alpha - 2.0)


def phi(alpha: float, theta: float) -> float:
    return phi_quadrature(alpha, theta).value


def theta_bar(alpha: float, tol: float = 1e-10) -> float:
    """Zero of Phi_a on (0, pi); Phi is positive left of it, negative right.

    The root always lies left of pi/2; a missing bracket would contradict
    that and raises RootNotBracketed.
    """
    hi = pi / 2
    if phi(alpha, hi) >= 0:
        raise RootNotBracketed("Phi is not negative at pi/2")
    lo = 0.4
    while phi(alpha, lo) <= 0:
        lo *= 0.5
        if lo < 1e-6:
            raise RootNotBracketed("Phi is not positive near 0")
    root = bisect(lambda th: phi(alpha, th), lo, hi, xtol=tol)
    if not root < pi / 2:
        raise RootNotBracketed("root not below pi/2")
    return float(root)


# --- scaled kernel and variations ------------------------------------------------

def s_function(xi, delta_hat, alpha: float) -> float:
    """S(xi, delta_hat) = |xi|^{-1-a/2} Phi_a(angle(xi, delta_hat)) for a unit
    displacement direction."""
    xi = complex(xi)
    dh = complex(delta_hat)
    if abs(xi) == 0:
        raise ZeroSeparation("separation vector must be nonzero")
    if abs(abs(dh) - 1.0) > 1e-12:
        raise ValueError("delta_hat must be a unit vector")
    cos_th = np.clip((xi / abs(xi) * np.conj(dh)).real, -1.0, 1.0)
    theta = float(np.arccos(cos_th))
    return abs(xi) ** (-1.0 - alpha / 2.0) * phi(alpha, theta)


def s_function_scaled(xi, w, alpha: float) -> float:
    """Homogeneous extension: S(xi, w) = |w|^{1-a/2} S(xi, w/|w|); zero at w=0."""
    if abs(w) == 0:
        return 0.0
    return abs(w) ** (1.0 - alpha / 2.0) * s_function(xi, w / abs(w), alpha)


@dataclass(frozen=True)
class ParabolicTrajectory:
    """q_i(t) = |t|^{2/(2+a)} xi_i on the colliding cluster.

    xi holds all three bodies, with zeros off the cluster; the cluster part
    must be a central configuration of its masses with center of mass 0.
    """

    xi: np.ndarray
    alpha: float
    cluster: tuple
    masses: Masses

    def __post_init__(self):
        if not 0 < self.alpha < 2:
            raise ValueError("alpha must lie in (0,2)")
        xi = np.asarray(self.xi, dtype=complex)
        object.__setattr__(self, "xi", xi)
        idx = [i - 1 for i in self.cluster]
        m = self.masses.as_array()[idx]
        com = abs((m * xi[idx]).sum()) / m.sum()
        if com > 1e-9:
            raise ValueError("cluster center of mass is not at the origin")
        if len(idx) == 3:
            from .action import central_config_residual

            if central_config_residual(xi, self.alpha, self.masses) > 1e-8:
                raise ValueError("xi is not a central configuration")

    def eval(self, t):
        """Configuration at time t (vectorized over t)."""
        t = np.asarray(t, dtype=float)
        s = np.abs(t) ** (2.0 / (2.0 + self.alpha))
        return np.multiply.outer(self.xi, s)


def parabolic_trajectory_eval(q: ParabolicTrajectory, t):
    return q.eval(t)


@dataclass(frozen=True)
class StandardVariation:
    """Piecewise-linear displacement: delta inside, linear ramp to zero at T.

    v_i(t) = delta_i            for |t| <= T - |delta|
           = delta_i (T-|t|)/|delta|   for T - |delta| <= |t| <= T
           = 0                  for |t| >= T,

    with |delta| the euclidean norm of the stacked displacement.
    """

    delta: np.ndarray
    T: float

    def __post_init__(self):
        d = np.asarray(self.delta, dtype=complex)
        object.__setattr__(self, "delta", d)
        if not self.T > self.norm:
            raise ValueError("need T > |delta|")

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(np.abs(self.delta)))

    def profile(self, t):
        s = np.abs(np.asarray(t, dtype=float))
        nd = self.norm
        if nd == 0:
            return np.where(s <= self.T, 1.0, 0.0)
        return np.clip((self.T - s) / nd, 0.0, 1.0)

    def eval(self, t):
        return np.multiply.outer(self.delta, self.profile(t))

    def profile_slope(self, t):
        """d/dt of the profile (sign included); +-1/|delta| on the ramps."""
        t = np.asarray(t, dtype=float)
        s = np.abs(t)
        nd = self.norm
        if nd == 0:
            return np.zeros_like(t)
        on_ramp = (s > self.T - nd) & (s < self.T)
        return np.where(on_ramp, -np.sign(t) / nd, 0.0)


def standard_variation_eval(v: StandardVariation, t):
    return v.eval(t)


G0_TOL = 1e-12


def check_g0_equivariant(delta) -> None:
    """g0 = (time reversal, reflection across the real axis, swap of 1 and 2):
    a fixed displacement needs delta_1 = conj(delta_2) and delta_3 real."""
    d = np.asarray(delta, dtype=complex)
    scale = max(1.0, float(np.abs(d).max()))
    if abs(d[0] - np.conj(d[1])) > G0_TOL * scale or abs(d[2].imag) > G0_TOL * scale:
        raise NonEquivariantDelta("delta is not fixed by g0")


def delta_action_leading(q: ParabolicTrajectory, delta, masses: Masses,
                         require_g0: bool = True) -> float:
    """First-order action differential of a standard variation as |delta| -> 0:

        2 sum_{i<j in cluster} m_i m_j |w_ij|^{1-a/2} |xi_ij|^{-1-a/2}
                               Phi_a(angle(xi_ij, -w_ij)),

    with xi_ij = xi_i - xi_j and w_ij = delta_i - delta_j (the kernel's
    argument is the negated relative displacement: the pair separation moves
    by +w_ij)."""
    if require_g0:
        check_g0_equivariant(delta)
    d = np.asarray(delta, dtype=complex)
    m = masses.as_array()
    idx = [i - 1 for i in q.cluster]
    total = 0.0
    for a, b in _PAIRS:
        if a not in idx or b not in idx:
            continue
        w = d[a] - d[b]
        if abs(w) == 0:
            continue
        total += m[a] * m[b] * s_function_scaled(q.xi[a] - q.xi[b], -w, q.alpha)
    return 2.0 * total


def _gauss_panels(f, a: float, b: float, panels: int, order: int = 12) -> float:
    nodes, weights = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(a, b, panels + 1)
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
        total += half * float(np.sum(weights * f(mid + half * nodes)))
    return total


def delta_action_numeric(q: ParabolicTrajectory, v: StandardVariation,
                         masses: Masses, alpha: float, grid: int = 48) -> float:
    """Action differential int [L_cluster(q+v) - L_cluster(q)] dt over [-T, T]
    by graded-mesh quadrature (the mesh is compressed toward the collision
    time by the power map t = T s^kappa).

    Raises GridTooCoarse if halving the mesh moves the value by more than one
    part in 1e3."""
    if alpha != q.alpha:
        raise ValueError("alpha mismatch with the trajectory")
    if v.norm == 0:
        return 0.0
    m = masses.as_array()
    idx = [i - 1 for i in q.cluster]
    beta = 2.0 / (2.0 + alpha)
    T, nd = v.T, v.norm

    def pot_diff(t):
        xq = q.eval(t)
        xv = v.eval(t)
        out = np.zeros_like(np.asarray(t, dtype=float))
        for a, b in _PAIRS:
            if a not in idx or b not in idx:
                continue
            s0 = np.abs(xq[a] - xq[b])
            s1 = np.abs(xq[a] + xv[a] - xq[b] - xv[b])
            out += m[a] * m[b] * (1.0 / s1**alpha - 1.0 / np.maximum(s0, 1e-300) ** alpha)
        return out

    def kin_diff(t):
        t = np.asarray(t, dtype=float)
        dq = np.multiply.outer(q.xi, beta * np.sign(t) * np.abs(t) ** (beta - 1.0))
        dv = np.multiply.outer(v.delta, v.profile_slope(t))
        out = np.zeros_like(t)
        for i in idx:
            out += m[i] * (np.real(np.conj(dq[i]) * dv[i]) + 0.5 * np.abs(dv[i]) ** 2)
        return out

    kappa = max(3.0, (2.0 + alpha) / (2.0 - alpha) + 1.0)

    def total(panels: int) -> float:
        split = T - nd

        def graded(t_to):  # int_0^{t_to} pot_diff with the cusp at 0
            def h(s):
                t = t_to * s**kappa
                return pot_diff(t) * t_to * kappa * s ** (kappa - 1.0)

            return _gauss_panels(h, 0.0, 1.0, panels)

        pot = graded(split) + _gauss_panels(pot_diff, split, T, max(4, panels // 4))
        kin = _gauss_panels(kin_diff, split, T, max(4, panels // 4))
        return 2.0 * (pot + kin)

    coarse, fine = total(grid), total(2 * grid)
    scale = max(abs(fine), 1e-12)
    if abs(fine - coarse) > 1e-3 * scale:
        raise GridTooCoarse(f"values {coarse:.6e} vs {fine:.6e} disagree")
    return fine


# --- certified inequality sweeps -----------------------------------------------

@dataclass
class SweepRow:
    alpha: float
    parameter: float
    value: float
    margin: float
    passed: bool


@dataclass
class SweepReport:
    name: str
    rows: list

    @property
    def all_passed(self) -> bool:
        return all(r.passed for r in self.rows)


def verify_triple_lagrange(alpha_grid, gamma_grid) -> SweepReport:
    """Phi_a(2pi/3 + g) + Phi_a(2pi/3 - g) < 0 over the grid: the variation
    of a triple collision from the equilateral configuration is negative."""
    rows = []
    for a in alpha_grid:
        for g in gamma_grid:
            val = phi(a, 2 * pi / 3 + g) + phi(a, 2 * pi / 3 - g)
            rows.append(SweepRow(float(a), float(g), val, -val, val < 0))
    return SweepReport("triple_lagrange", rows)


def verify_collinear_triple(alpha: float, mu_grid, thetas=(pi / 2, 2.2, 2.7, pi)) -> SweepReport:
    """Negativity of the summed pair kernels for collinear triple collisions.

    Outer bodies at +-1 on a line, middle body at mu in [0,1).  Case A
    (middle body second, third body outer): the third body moves orthogonally
    to the configuration line, so both active angles are pi/2.  Case B (third
    body in the middle): the outer pair moves apart by +-delta at angle
    theta in [pi/2, pi]; all three pair terms carry Phi_a(theta)."""
    rows = []
    for mu in mu_grid:
        if not 0 <= mu < 1:
            raise ValueError("mu must lie in [0,1)")
        # case A: outer pair {1,3} at +-1, body 2 at mu; body 3 displaced by
        # delta3 orthogonal to the configuration line.  Pair kernels take
        # -w_ij with w_ij = delta_i - delta_j, so both angles are pi/2.
        delta3 = 1j
        val = (
            s_function_scaled(1.0 - (-1.0), delta3, alpha)      # pair (1,3)
            + s_function_scaled(mu - (-1.0), delta3, alpha)     # pair (2,3)
        )
        rows.append(SweepRow(alpha, float(mu), val, -val, val < 0))
        # case B: outer pair {1,2} at +-1, body 3 at mu; bodies 1,2 displaced
        # by -+delta/2 with theta = angle(xi_1 - xi_2, delta) in [pi/2, pi]
        for th in thetas:
            delta = np.exp(1j * th)
            val = (
                s_function_scaled(2.0, delta, alpha)                 # pair (1,2)
                + s_function_scaled(1.0 - mu, 0.5 * delta, alpha)    # pair (1,3)
                + s_function_scaled(-(1.0 + mu), -0.5 * delta, alpha)  # pair (2,3)
            )
            rows.append(SweepRow(alpha, float(mu), val, -val, val < 0))
    return SweepReport("collinear_triple", rows)


# --- exact-arithmetic certificate ------------------------------------------------

P_COEFFS = (1024, -3264, 4596, -756, 1749, 684, 366, 72, 9)  # ascending powers


def _binom_fraction(x: Fraction, k: int) -> Fraction:
    num = Fraction(1)
    for j in range(k):
        num *= x - j
    den = 1
    for j in range(1, k + 1):
        den *= j
    return num / den


def _f_k(x: Fraction, k: int) -> Fraction:
    """f_k(x) = binom(-x, k)^2 * 4^k (k!)^2 / ((x+k-1) (2k)!)."""
    import math

    b = _binom_fraction(Fraction(-x), k)
    return b * b * Fraction(4**k * math.factorial(k) ** 2, math.factorial(2 * k)) / (x + k - 1)


def _poly_eval(coeffs, x: Fraction) -> Fraction:
    out = Fraction(0)
    for c in reversed(coeffs):
        out = out * x + c
    return out


def _poly_shift_half(coeffs):
    """Coefficients of p(1/2 + u) from those of p(x), exact."""
    import math

    n = len(coeffs)
    out = [Fraction(0)] * n
    for k, c in enumerate(coeffs):
        for j in range(k + 1):
            out[j] += Fraction(c) * math.comb(k, j) * Fraction(1, 2) ** (k - j)
    return out


@dataclass
class Le2Certificate:
    tail_value: Fraction
    tail_ok: bool
    p_at_one: Fraction
    p_at_one_ok: bool
    shifted_coeffs: tuple
    shifted_positive: bool
    identity_ok: bool
    cubic_x0: float
    cubic_min: float
    cubic_ok: bool

    @property
    def passed(self) -> bool:
        return (
            self.tail_ok
            and self.p_at_one_ok
            and self.shifted_positive
            and self.identity_ok
            and self.cubic_ok
        )


def lemma_le2_certificate() -> Le2Certificate:
    """Exact verification chain for the series inequality on x in (1/2, 1):

        1/(x-1) + sum_k binom(-x,k)^2 (3/4)^k 4^k (k!)^2 / ((x+k-1)(2k)!) < 0.

    (i) the k >= 5 tail is bounded by f_5(1) (3/4)^5 * 4 = 27/35 exactly;
    (ii) the head plus 27/35 is negative iff the degree-8 integer polynomial
    p is positive, via the exact identity p(x) = 4480 (x-1) head(x);
    (iii) p > 0 on [1/2, 1] because its Taylor shift to 1/2 has positive
    coefficients (and p(1) = 4480); a float check of the cubic lower bound
    minimum (35/27 - 4 sqrt(6)/9 at x0 = (4 - sqrt(6))/3) is kept as backup.
    """
    tail = _f_k(Fraction(1), 5) * Fraction(3, 4) ** 5 * 4
    tail_ok = tail == Fraction(27, 35)

    p1 = _poly_eval(P_COEFFS, Fraction(1))
    p1_ok = p1 == 4480

    shifted = tuple(_poly_shift_half(P_COEFFS))
    shifted_pos = all(c > 0 for c in shifted)

    # identity: 4480 (x-1) head(x) == p(x) as polynomials over Q, where
    # head(x) = 1/(x-1) + sum_{k<=4} f_k(x) (3/4)^k + 27/35.
    # (x-1) head(x) = 1 + (x-1) * (polynomial part); clear denominators by
    # evaluating at 10 rational points (degree is 8).
    ok = True
    for num in range(10):
        x = Fraction(num + 2, 17)
        head = Fraction(1) / (x - 1) + Fraction(27, 35)
        for k in range(1, 5):
            head += _f_k(x, k) * Fraction(3, 4) ** k
        ok = ok and 4480 * (x - 1) * head == _poly_eval(P_COEFFS, x)

    x0 = (4.0 - 6.0**0.5) / 3.0
    cubic = 1.0 - 10.0 / 3.0 * x0 + 4.0 * x0**2 - x0**3
    cubic_target = 35.0 / 27.0 - 4.0 / 9.0 * 6.0**0.5
    cubic_ok = cubic > 0 and abs(cubic - cubic_target) < 1e-12

    return Le2Certificate(
        tail_value=tail,
        tail_ok=tail_ok,
        p_at_one=p1,
        p_at_one_ok=p1_ok,
        shifted_coeffs=shifted,
        shifted_positive=shifted_pos,
        identity_ok=ok,
        cubic_x0=x0,
        cubic_min=cubic,
        cubic_ok=cubic_ok,
    )
