"""Rotating-frame Lagrangian action on spectral loops, and its minimization.

The functional is A_w(x) = int_0^{2pi} K_w + U with

    K_w = sum_i (m_i/2) |x_i' - i w x_i|^2,
    U   = sum_{i<j} m_i m_j / |x_i - x_j|^alpha.

On Fourier modes the kinetic part is the exact quadratic form
pi * sum_{i,n} m_i (n-w)^2 |c_{i,n}|^2; the potential part is integrated by
the uniform-grid rule, which is spectrally accurate for smooth collisionless
loops.  Minimization runs in an orthonormal basis of the equivariant
subspace, so the symmetry and center-of-mass constraints are exact by
construction and the natural 1/r^alpha barrier rejects colliding steps
during the line search.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import pi

import numpy as np
from scipy.optimize import brentq
import scipy.optimize

from .errors import CollisionOnGrid, NotCoercive, OmegaInteger, RootNotBracketed
from .groups import Masses, SymmetryGroup, fundamental_domain, action_type
from .loops import (
    Loop,
    basis_expand,
    basis_reduce,
    equivariant_basis,
    eval_derivative,
    eval_loop,
    mode_index,
    project_com,
    random_loop,
)

_PAIRS = ((0, 1), (0, 2), (1, 2))

COLLISION_EPS = 1e-12


def potential(x, alpha: float, masses: Masses) -> float:
    """Interaction sum for one configuration; collisions give +inf."""
    x = np.asarray(x, dtype=complex)
    m = masses.as_array()
    total = 0.0
    for i, j in _PAIRS:
        r = abs(x[i] - x[j])
        if r == 0.0:
            return float("inf")
        total += m[i] * m[j] / r**alpha
    return total


def _potential_grid(x: np.ndarray, alpha: float, m: np.ndarray) -> np.ndarray:
    """U at every grid time; distances clipped away from zero."""
    vals = np.zeros(x.shape[1])
    for i, j in _PAIRS:
        r = np.abs(x[i] - x[j])
        vals += m[i] * m[j] / np.maximum(r, COLLISION_EPS) ** alpha
    return vals


def min_pair_distance(modes: np.ndarray, M: int = 0) -> float:
    N = (modes.shape[1] - 1) // 2
    if M <= 0:
        M = max(8 * N + 8, 256)
    x = eval_loop(modes, M)
    return float(min(np.abs(x[i] - x[j]).min() for i, j in _PAIRS))


def default_quad_points(N: int) -> int:
    return 4 * N + 4


def kinetic(loop: Loop, omega: float) -> float:
    n = mode_index(loop.N)
    w = (n - omega) ** 2
    m = loop.masses.as_array()
    return pi * float(m @ (np.abs(loop.modes) ** 2 @ w))


def action(loop: Loop, omega: float, alpha: float, quad_points: int = 0) -> float:
    """Total action of the loop: exact kinetic form plus grid potential."""
    M = quad_points if quad_points else default_quad_points(loop.N)
    if M < 4 * loop.N + 4:
        raise ValueError("quad_points must be at least 4N+4")
    x = eval_loop(loop.modes, M)
    U = _potential_grid(x, alpha, loop.masses.as_array())
    return kinetic(loop, omega) + float(U.sum()) * 2 * pi / M


def _forces(x: np.ndarray, alpha: float, m: np.ndarray) -> np.ndarray:
    """dU/dx_i at every grid time, as complex values (shape like x)."""
    F = np.zeros_like(x)
    for i, j in _PAIRS:
        d = x[i] - x[j]
        r = np.maximum(np.abs(d), COLLISION_EPS)
        f = -alpha * m[i] * m[j] * d / r ** (alpha + 2)
        F[i] += f
        F[j] -= f
    return F


def action_gradient(loop: Loop, omega: float, alpha: float, quad_points: int = 0) -> np.ndarray:
    """Gradient in mode coefficients, packed as d/dRe + i d/dIm, projected
    onto the tangent space of the center-of-mass constraint."""
    M = quad_points if quad_points else default_quad_points(loop.N)
    x = eval_loop(loop.modes, M)
    r_min = min(np.abs(x[i] - x[j]).min() for i, j in _PAIRS)
    if r_min < 10 * COLLISION_EPS:
        raise CollisionOnGrid(f"minimum pairwise distance {r_min:.2e} on the grid")
    m = loop.masses.as_array()
    n = mode_index(loop.N)
    grad = 2 * pi * (m[:, None] * (n - omega) ** 2) * loop.modes
    F = _forces(x, alpha, m)
    grad += np.fft.fft(F, axis=1)[:, n % M] * (2 * pi / M)
    return project_com(grad, loop.masses)


def angular_momentum(loop: Loop, M: int = 256) -> np.ndarray:
    """J(t) = sum_i m_i x_i x v_i sampled on the uniform grid."""
    x = eval_loop(loop.modes, M)
    v = eval_derivative(loop.modes, M)
    return loop.masses.as_array() @ np.imag(np.conj(x) * v)


def newton_residual(loop: Loop, omega: float, alpha: float, M: int = 0) -> float:
    """Max norm of m x'' - 2 m w i x' - m w^2 x - dU/dx on the grid,
    with derivatives taken spectrally."""
    if M <= 0:
        M = max(default_quad_points(loop.N), 256)
    x = eval_loop(loop.modes, M)
    r_min = min(np.abs(x[i] - x[j]).min() for i, j in _PAIRS)
    if r_min < 1e-8:
        raise CollisionOnGrid(f"minimum pairwise distance {r_min:.2e} on the grid")
    v = eval_derivative(loop.modes, M)
    a = eval_derivative(loop.modes, M, order=2)
    m = loop.masses.as_array()[:, None]
    res = m * a - 2 * omega * m * 1j * v - omega**2 * m * x - _forces(x, alpha, loop.masses.as_array())
    return float(np.abs(res).max())


# --- central configurations ---------------------------------------------------

def _normalize_inertia(x: np.ndarray, masses: Masses) -> np.ndarray:
    m = masses.as_array()
    x = np.asarray(x, dtype=complex)
    x = x - (m @ x) / m.sum()
    I = float(m @ (np.abs(x) ** 2))
    return x / np.sqrt(I)


def config_potential_gradient(x: np.ndarray, alpha: float, masses: Masses) -> np.ndarray:
    m = masses.as_array()
    g = np.zeros(3, dtype=complex)
    for i, j in _PAIRS:
        d = x[i] - x[j]
        f = -alpha * m[i] * m[j] * d / abs(d) ** (alpha + 2)
        g[i] += f
        g[j] -= f
    return g


def central_config_residual(x: np.ndarray, alpha: float, masses: Masses) -> float:
    """Norm of the gradient of U projected onto the inertia ellipsoid."""
    m = masses.as_array()
    g = config_potential_gradient(x, alpha, masses)
    lam = float(np.real(np.vdot(x * m, g / m)) / np.real(np.vdot(x * m, x)))
    return float(np.abs(g - lam * m * x).max())


def lagrange_central_config(masses: Masses) -> np.ndarray:
    """Equilateral configuration, center of mass 0, sum m_i |x_i|^2 = 1."""
    base = np.array([0.0, 1.0, 0.5 + 0.8660254037844386j], dtype=complex)
    return _normalize_inertia(base, masses)


def euler_central_config(masses: Masses, central: int = 3, alpha: float = 1.0) -> np.ndarray:
    """Collinear central configuration with the given body in the middle.

    The two outer bodies keep their index order left to right along the real
    axis.  Found by root finding on the gap ratio, then normalized to unit
    momentum of inertia.
    """
    outer = [i for i in range(3) if i != central - 1]
    order = [outer[0], central - 1, outer[1]]
    m = masses.as_array()

    def residual(zeta: float) -> float:
        p = np.zeros(3)
        p[order[0]], p[order[1]], p[order[2]] = 0.0, zeta, zeta + 1.0
        p -= m @ p / m.sum()
        g = config_potential_gradient(p.astype(complex), alpha, masses).real / m
        # central iff g is proportional to -p; compare cross terms
        return g[order[0]] * p[order[2]] - g[order[2]] * p[order[0]]

    grid = np.geomspace(1e-3, 1e3, 121)
    vals = [residual(z) for z in grid]
    bracket = None
    for a, b, fa, fb in zip(grid, grid[1:], vals, vals[1:]):
        if fa == 0.0:
            bracket = (a, a)
            break
        if fa * fb < 0:
            bracket = (a, b)
            break
    if bracket is None:
        raise RootNotBracketed("no collinear central configuration found on the scan range")
    zeta = bracket[0] if bracket[0] == bracket[1] else brentq(residual, *bracket, xtol=1e-15)
    p = np.zeros(3)
    p[order[0]], p[order[1]], p[order[2]] = 0.0, zeta, zeta + 1.0
    return _normalize_inertia(p.astype(complex), masses)


def lagrange_min_action(omega: float, alpha: float, masses: Masses = None) -> float:
    """Action of the circular equilateral motion that is stationary in the
    momentum of inertia: 2*pi*((c/2) I + U0 I^{-alpha/2}) at its interior
    stationary point I = (alpha U0 / c)^{2/(alpha+2)}, c = (k-w)^2 with k the
    nearest integer to w."""
    if masses is None:
        masses = Masses(1.0, 1.0, 1.0)
    if float(omega) == round(float(omega)):
        raise OmegaInteger("closed form requires a non-integer angular velocity")
    k = round(float(omega))
    c = (k - float(omega)) ** 2
    xi = lagrange_central_config(masses)
    U0 = potential(xi, alpha, masses)
    I_star = (alpha * U0 / c) ** (2.0 / (alpha + 2.0))
    return 2 * pi * (0.5 * c * I_star + U0 * I_star ** (-alpha / 2.0))


# --- minimization --------------------------------------------------------------

@dataclass
class MinimizeResult:
    loop: Loop
    action: float
    gradient_norm: float
    iterations: int
    min_pair_distance: float
    converged: bool
    seed: int


def _coercive(G: SymmetryGroup, masses: Masses, omega) -> bool:
    from .classify import is_coercive

    return is_coercive(G, masses, omega)


class _Objective:
    """Action and gradient in orthonormal coordinates of the equivariant basis."""

    def __init__(self, basis, masses: Masses, omega: float, alpha: float, M: int):
        self.N = (basis.shape[2] - 1) // 2
        K = basis.shape[2]
        self.B = np.concatenate(
            [basis.real.reshape(basis.shape[0], -1), basis.imag.reshape(basis.shape[0], -1)],
            axis=1,
        )
        self.dim = basis.shape[0]
        self.M = M
        self.alpha = alpha
        self.m = masses.as_array()
        self.n = mode_index(self.N)
        self.slots = self.n % M
        self.kin = pi * (self.m[:, None] * (self.n - float(omega)) ** 2)
        self.K = K

    def modes_of(self, z):
        flat = z @ self.B
        half = 3 * self.K
        return (flat[:half] + 1j * flat[half:]).reshape(3, self.K)

    def reduce(self, grad_modes):
        flat = np.concatenate([grad_modes.real.reshape(-1), grad_modes.imag.reshape(-1)])
        return self.B @ flat

    def __call__(self, z):
        modes = self.modes_of(z)
        x = eval_loop(modes, self.M)
        U = 0.0
        F = np.zeros_like(x)
        for i, j in _PAIRS:
            d = x[i] - x[j]
            r = np.maximum(np.abs(d), COLLISION_EPS)
            U += float((self.m[i] * self.m[j] / r**self.alpha).sum())
            f = -self.alpha * self.m[i] * self.m[j] * d / r ** (self.alpha + 2)
            F[i] += f
            F[j] -= f
        f_val = float((self.kin * (modes.real**2 + modes.imag**2)).sum()) + U * 2 * pi / self.M
        grad = 2 * self.kin * modes
        grad += np.fft.fft(F, axis=1)[:, self.slots] * (2 * pi / self.M)
        return f_val, self.reduce(grad)


def _harmonic_starts(G, masses, omega, alpha, obj, N):
    """Deterministic single-frequency circle seeds, one per equivariant mode
    direction with |n| <= 2, scaled near the stationary momentum of inertia.

    Random starts alone reliably miss rotating relative equilibria whose
    basin is narrow inside the equivariant subspace; the group's own
    fundamental harmonics are the natural extra candidates."""
    from .classify import equivariant_mode_space

    out = []
    for n in range(-2, 3):
        B = equivariant_mode_space(G, masses, n)
        for col in range(B.shape[1]):
            cfg = B[0::2, col] + 1j * B[1::2, col]
            dists = [abs(cfg[i] - cfg[j]) for i, j in _PAIRS]
            if min(dists) < 1e-6:
                continue
            I0 = float(masses.as_array() @ (np.abs(cfg) ** 2))
            cfg = cfg / np.sqrt(I0)
            cw = (n - float(omega)) ** 2
            U0 = potential(cfg, alpha, masses)
            I_star = (alpha * U0 / cw) ** (2.0 / (alpha + 2.0)) if cw > 1e-12 else 1.0
            modes = np.zeros((3, 2 * N + 1), dtype=complex)
            modes[:, n + N] = cfg * np.sqrt(I_star)
            z0 = obj.reduce(modes)
            if np.linalg.norm(z0) > 1e-9:
                out.append(z0)
    return out


def _lbfgs_rounds(obj, z0, tol_grad, max_iter, rounds=4):
    """L-BFGS with restarts of the curvature memory until the full gradient
    2-norm meets the tolerance or progress stops."""
    z = z0
    total = 0
    f, g = obj(z)
    for _ in range(rounds):
        if np.linalg.norm(g) <= tol_grad or total >= max_iter:
            break
        res = scipy.optimize.minimize(
            obj,
            z,
            jac=True,
            method="L-BFGS-B",
            options={
                "maxiter": max_iter - total,
                "gtol": tol_grad / 30.0,
                "ftol": 1e-17,
                "maxcor": 25,
                "maxls": 60,
            },
        )
        total += max(res.nit, 1)
        if res.fun > f - 1e-15 and np.linalg.norm(res.jac) >= np.linalg.norm(g):
            break
        z, f, g = res.x, res.fun, res.jac
    return z, f, np.linalg.norm(g), total


def minimize(
    G: SymmetryGroup,
    masses: Masses,
    omega: float,
    alpha: float,
    N: int = 48,
    seed: int = 0,
    tol_grad: float = 1e-6,
    max_iter: int = 20000,
    quad_points: int = 0,
    seeds: int = 8,
) -> MinimizeResult:
    """Descent to a minimum of the action in the equivariant subspace.

    Protocol: several random Gaussian starts (1/(1+n^2) mode decay, seeded,
    projected) are first relaxed on a coarse mode cutoff, the best coarse
    minima are prolonged to the full cutoff and polished by limited-memory
    quasi-Newton steps with backtracking line search.  The 1/r^alpha barrier
    rejects colliding steps during line search on its own; distances are only
    clipped at 1e-12 to keep evaluations finite.
    """
    if not _coercive(G, masses, omega):
        raise NotCoercive(f"action not coercive for this group at omega={omega}")
    N_coarse = min(N, 16)
    basis_c = equivariant_basis(G, masses, N_coarse)
    if basis_c.shape[0] == 0:
        raise NotCoercive("equivariant subspace is trivial")
    obj_c = _Objective(basis_c, masses, omega, alpha, default_quad_points(N_coarse))

    starts = []
    for k in range(seeds):
        start = random_loop(masses, N_coarse, seed=seed + 1000003 * k)
        z0 = obj_c.reduce(start.modes)
        nz = np.linalg.norm(z0)
        if nz < 1e-9:
            continue
        starts.append(z0 * np.sqrt(3.0) / nz)
    starts += _harmonic_starts(G, masses, omega, alpha, obj_c, N_coarse)

    coarse = []
    total_iters = 0
    for z0 in starts:
        z, f, gn, it = _lbfgs_rounds(obj_c, z0, max(tol_grad, 1e-8), max_iter // 4, rounds=3)
        total_iters += it
        if min_pair_distance(obj_c.modes_of(z)) > 1e-4:
            coarse.append((f, z))
    coarse.sort(key=lambda t: t[0])

    M = quad_points if quad_points else default_quad_points(N)
    basis = equivariant_basis(G, masses, N)
    obj = _Objective(basis, masses, omega, alpha, M)
    best = None
    for f_c, z_c in coarse[:2]:
        modes_c = obj_c.modes_of(z_c)
        lift = np.zeros((3, 2 * N + 1), dtype=complex)
        lift[:, N - N_coarse: N + N_coarse + 1] = modes_c
        z0 = obj.reduce(lift)
        z, f, gn, it = _lbfgs_rounds(obj, z0, tol_grad, max_iter, rounds=6)
        total_iters += it
        modes = obj.modes_of(z)
        cand = MinimizeResult(
            loop=Loop(masses, modes, N),
            action=f,
            gradient_norm=gn,
            iterations=total_iters,
            min_pair_distance=min_pair_distance(modes),
            converged=gn <= tol_grad,
            seed=seed,
        )
        if best is None:
            best = cand
        elif cand.converged and (not best.converged or cand.action < best.action - 1e-12):
            best = cand
    if best is None:
        raise NotCoercive("all starts collapsed; no collisionless minimizer found")
    best.iterations = total_iters
    return best


def collision_report(loop: Loop, G: SymmetryGroup, threshold: float, M: int = 2048):
    """Times where some pair comes closer than the threshold, labeled
    interior or boundary with respect to the fundamental domain."""
    x = eval_loop(loop.modes, M)
    t = 2 * pi * np.arange(M) / M
    boundary_turns = set()
    if action_type(G) != "cyclic":
        for g in G.elements:
            if g.tau.kind == "ref":
                u = g.tau.turn
                boundary_turns.add(u / 2 % 1)
                boundary_turns.add((u / 2 + Fraction(1, 2)) % 1)
    boundary_times = np.array([2 * pi * float(b) for b in sorted(boundary_turns)])
    events = []
    for i, j in _PAIRS:
        r = np.abs(x[i] - x[j])
        below = r < threshold
        if not below.any():
            continue
        # group consecutive below-threshold runs (circularly)
        idx = np.flatnonzero(below)
        runs = np.split(idx, np.flatnonzero(np.diff(idx) > 1) + 1)
        if len(runs) > 1 and runs[0][0] == 0 and runs[-1][-1] == M - 1:
            runs[0] = np.concatenate([runs[-1], runs[0]])
            runs = runs[:-1]
        for run in runs:
            k = run[np.argmin(r[run])]
            tc = t[k]
            kind = "interior"
            if boundary_times.size:
                gap = np.abs(np.angle(np.exp(1j * (boundary_times - tc))))
                if gap.min() <= 2 * pi / M + 1e-12:
                    kind = "boundary"
            events.append((float(tc), (i + 1, j + 1), kind))
    events.sort()
    return events
