"""Planar three-body loops as truncated Fourier series.

A loop stores complex coefficients c[i, n] for bodies i in {1,2,3} and
frequencies n in [-N, N]; positions are x_i(t) = sum_n c[i,n] e^{i n t} with
period 2*pi.  Because positions are complex (not real), c[i,n] and c[i,-n]
are independent.

The loop-space action (g.x)(t) = g x(g^{-1} t) becomes, coefficientwise,

    tau = rot(th), rho = rot(ph):   c'[i, n] =  e^{i(ph - n th)}  c[j, n]
    tau = rot(th), rho = ref(u):    c'[i, n] =  e^{i(2 pi u - n th)}  conj(c[j, -n])
    tau = ref(TH), rho = rot(ph):   c'[i, n] =  e^{i(ph - n TH)}  c[j, -n]
    tau = ref(TH), rho = ref(u):    c'[i, n] =  e^{i(2 pi u - n TH)}  conj(c[j, n])

with j = sigma(g)^{-1}(i), th/TH/ph/2*pi*u the angles of the stored turns.
Time rotations act by phases on each mode; anything orientation-reversing
couples n with -n and/or conjugates.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from math import pi

import numpy as np

from .errors import IncompatibleMasses
from .groups import (
    ROT,
    GroupElement,
    Masses,
    SymmetryGroup,
    check_masses,
)


@dataclass(frozen=True)
class Loop:
    """Spectral three-body loop; modes has shape (3, 2N+1), columns n=-N..N."""

    masses: Masses
    modes: np.ndarray
    N: int

    def __post_init__(self):
        if self.modes.shape != (3, 2 * self.N + 1):
            raise ValueError(f"modes shape {self.modes.shape} != (3, {2*self.N+1})")

    def mode(self, i: int, n: int) -> complex:
        return self.modes[i - 1, n + self.N]

    def with_modes(self, modes: np.ndarray) -> "Loop":
        return replace(self, modes=modes)

    def com_defect(self) -> float:
        m = self.masses.as_array()
        return float(np.abs(m @ self.modes).max())


def mode_index(N: int):
    return np.arange(-N, N + 1)


def project_com(modes: np.ndarray, masses: Masses) -> np.ndarray:
    """Remove the weighted-mean component of every mode column."""
    m = masses.as_array()
    mean = (m @ modes) / (m @ m)
    return modes - np.outer(m, np.ones(modes.shape[1])) * mean


def eval_loop(modes: np.ndarray, M: int) -> np.ndarray:
    """Positions on the uniform grid t_k = 2 pi k / M, shape (3, M)."""
    N = (modes.shape[1] - 1) // 2
    if M < 2 * N + 1:
        raise ValueError("grid must resolve all modes")
    C = np.zeros((3, M), dtype=complex)
    n = mode_index(N)
    C[:, n % M] = modes
    return np.fft.ifft(C, axis=1) * M


def eval_derivative(modes: np.ndarray, M: int, order: int = 1) -> np.ndarray:
    N = (modes.shape[1] - 1) // 2
    return eval_loop(modes * (1j * mode_index(N)) ** order, M)


def modes_from_grid(x: np.ndarray, N: int) -> np.ndarray:
    """Inverse of eval_loop: recover 2N+1 modes from M >= 2N+1 grid values."""
    M = x.shape[1]
    C = np.fft.fft(x, axis=1) / M
    return C[:, mode_index(N) % M]


def element_mode_action(g: GroupElement, modes: np.ndarray) -> np.ndarray:
    """Coefficients of g.x given those of x (real-linear map)."""
    N = (modes.shape[1] - 1) // 2
    n = mode_index(N)
    inv = g.sigma.inverse()
    rows = np.array([inv(i) - 1 for i in (1, 2, 3)])
    src = modes[rows, :]
    th = 2 * pi * float(g.tau.turn)
    ph = 2 * pi * float(g.rho.turn)
    if g.tau.kind == ROT and g.rho.kind == ROT:
        return np.exp(1j * (ph - n * th)) * src
    if g.tau.kind == ROT:
        return np.exp(1j * (ph - n * th)) * np.conj(src[:, ::-1])
    if g.rho.kind == ROT:
        return np.exp(1j * (ph - n * th)) * src[:, ::-1]
    return np.exp(1j * (ph - n * th)) * np.conj(src)


def group_average(modes: np.ndarray, G: SymmetryGroup) -> np.ndarray:
    out = np.zeros_like(modes)
    for g in G.elements:
        out += element_mode_action(g, modes)
    return out / G.order


def equivariant_project(loop: Loop, G: SymmetryGroup) -> Loop:
    """Orthogonal projection of the loop onto the G-equivariant subspace."""
    check_masses(G, loop.masses)
    return loop.with_modes(project_com(group_average(loop.modes, G), loop.masses))


def equivariance_defect(loop: Loop, G: SymmetryGroup, M: int = 128) -> float:
    """max over g and sampled t of |x(g t) - g x(t)|, via mode arithmetic."""
    worst = 0.0
    for g in G.elements:
        d = element_mode_action(g, loop.modes) - loop.modes
        worst = max(worst, float(np.abs(eval_loop(d, M)).max()))
    return worst


def _pair_slots(N: int, n: int):
    return np.array([n + N, -n + N]) if n else np.array([N])


def equivariant_basis(G: SymmetryGroup, masses: Masses, N: int) -> np.ndarray:
    """Orthonormal real basis of the equivariant, center-of-mass-zero loops.

    Returns an array of shape (d, 3, 2N+1): d basis mode-matrices B_k such
    that equivariant loops are exactly c = sum_k z_k B_k with real z.  The
    group action preserves each (n, -n) mode pair, so the basis is assembled
    blockwise from the range of the averaging projector on each pair.
    """
    check_masses(G, masses)
    blocks = []
    for n in range(N + 1):
        cols = _pair_slots(N, n)
        width = len(cols)
        probes = []
        for i in range(3):
            for w in range(width):
                for val in (1.0, 1.0j):
                    probe = np.zeros((3, 2 * N + 1), dtype=complex)
                    probe[i, cols[w]] = val
                    probes.append(project_com(group_average(probe, G), masses))
        A = np.array([p[:, cols].reshape(-1) for p in probes])
        A2 = np.column_stack([A.real, A.imag]).T  # real coordinates, probes as columns
        q = np.linalg.svd(A2, full_matrices=False)
        rank = int((q[1] > 1e-10 * max(1.0, q[1][0] if q[1].size else 1.0)).sum())
        if rank == 0:
            continue
        U = q[0][:, :rank]
        half = 3 * width
        for k in range(rank):
            B = np.zeros((3, 2 * N + 1), dtype=complex)
            B[:, cols] = (U[:half, k] + 1j * U[half:, k]).reshape(3, width)
            blocks.append(B)
    if not blocks:
        return np.zeros((0, 3, 2 * N + 1), dtype=complex)
    return np.array(blocks)


def basis_expand(z: np.ndarray, basis: np.ndarray) -> np.ndarray:
    return np.tensordot(z, basis, axes=(0, 0))


def basis_reduce(grad_modes: np.ndarray, basis: np.ndarray) -> np.ndarray:
    """Pull a mode-space gradient back to basis coordinates (real chain rule)."""
    return np.real(np.tensordot(np.conj(basis), grad_modes, axes=([1, 2], [0, 1])))


def symmetrization_defect(loop: Loop, G: SymmetryGroup, align: bool = True) -> float:
    """Relative defect ||x - P_G x|| / ||x|| of the loop against a group.

    With align=True the defect is minimized over the global spatial rotation
    (and reflection) gauge first: a loop equivariant under a conjugate copy
    of G then reports a small defect.  Subgroup problems fix reflection axes
    only up to conjugation, so this is the meaningful measure.
    """
    from scipy.optimize import minimize_scalar

    def defect_of(modes):
        nrm = np.linalg.norm(modes)
        d = project_com(group_average(modes, G), loop.masses) - modes
        return float(np.linalg.norm(d) / nrm)

    if not align:
        return defect_of(loop.modes)
    best = np.inf
    for modes in (loop.modes, np.conj(loop.modes[:, ::-1])):
        vals = [(defect_of(np.exp(1j * p) * modes), p) for p in np.linspace(0, 2 * pi, 360, endpoint=False)]
        d0, p0 = min(vals)
        res = minimize_scalar(
            lambda p: defect_of(np.exp(1j * p) * modes),
            bracket=(p0 - 0.03, p0, p0 + 0.03),
            method="brent",
            options={"xtol": 1e-12},
        )
        best = min(best, float(res.fun), d0)
    return best


def random_loop(masses: Masses, N: int, seed: int = 0, decay: float = 1.0) -> Loop:
    """Seeded Gaussian modes with 1/(1+n^2) decay, center of mass removed."""
    rng = np.random.default_rng(seed)
    n = mode_index(N)
    amp = decay / (1.0 + n.astype(float) ** 2)
    modes = (rng.standard_normal((3, 2 * N + 1)) + 1j * rng.standard_normal((3, 2 * N + 1))) * amp
    return Loop(masses, project_com(modes, masses), N)


def inertia(loop: Loop, M: int = 256) -> np.ndarray:
    """Momentum of inertia I(t) = sum_i m_i |x_i(t)|^2 on the grid."""
    x = eval_loop(loop.modes, M)
    return loop.masses.as_array() @ (np.abs(x) ** 2)
