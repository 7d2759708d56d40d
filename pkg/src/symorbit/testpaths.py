"""Closed-form Euler orbits and Hill-type test paths, and their action levels.

Unit masses throughout (the closed forms assume them).  The Euler orbit is

    x1 = R e^{ikt},  x2 = -R e^{ikt},  x3 = 0,

with rotating-frame action 2*pi*(R^2 (k-w)^2 + 2/R^a + (2R)^-a); at a = 1 the
minimum over R is attained at R = (5/(4(k-w)^2))^{1/3}.  The Hill test path
offsets the pair around d and parks the third body at -2d:

    x1 = d + R e^{ikt},  x2 = d - R e^{ikt},  x3 = -2d,   0 < R < 3d,

whose action at a = 1 needs one average of 1/|1 + (R/3d) e^{ikt}| over the
circle; the logarithmic bound 1 - log(1 - R^2/9d^2)/2 for that average turns
the action into an elementary expression.  These are the two branches whose
comparison shows the line and 2-1-choreography minimizers are not collinear
relative equilibria near w = 1/2.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import log, pi

import numpy as np
import scipy.optimize

from .errors import DegenerateFrequency, GeometryViolated
from .groups import Masses
from .loops import Loop, project_com

UNIT = Masses(1.0, 1.0, 1.0)


@dataclass(frozen=True)
class EulerParams:
    R: float
    k: int
    omega: float
    alpha: float = 1.0

    def __post_init__(self):
        if self.R <= 0:
            raise ValueError("R must be positive")


@dataclass(frozen=True)
class HillParams:
    R: float
    d: float
    k: int
    omega: float

    def __post_init__(self):
        if not (0 < self.R < 3 * self.d):
            raise GeometryViolated(f"need 0 < R < 3d, got R={self.R}, d={self.d}")


def euler_orbit_action(p: EulerParams) -> float:
    """Total action over one period of the collinear circular orbit."""
    return 2 * pi * (
        p.R**2 * (p.k - p.omega) ** 2 + 2.0 / p.R**p.alpha + 1.0 / (2 * p.R) ** p.alpha
    )


def euler_min_action(omega: float, k: int):
    """(R*, value): minimum of the Euler action over the radius, alpha = 1.

    R* = (5 / (4 (k-w)^2))^{1/3}, value = 2*pi*(3/2)*(25 (k-w)^2 / 2)^{1/3}.
    """
    c2 = (k - omega) ** 2
    if c2 == 0:
        raise DegenerateFrequency("k = omega: the two-body circle degenerates")
    R_star = (5.0 / (4.0 * c2)) ** (1.0 / 3.0)
    value = 2 * pi * 1.5 * (25.0 * c2 / 2.0) ** (1.0 / 3.0)
    return R_star, value


def pair_average(eps: float, k: int, quad_points: int = 512) -> float:
    """(1/2pi) int dt / |1 + eps e^{ikt}|, by the periodic trapezoid rule."""
    if k == 0:
        return 1.0 / abs(1.0 + eps)
    t = 2 * pi * np.arange(quad_points) / quad_points
    return float(np.mean(1.0 / np.abs(1.0 + eps * np.exp(1j * k * t))))


def pair_average_bound(eps: float) -> float:
    """Logarithmic upper bound 1 - log(1 - eps^2)/2 for the pair average."""
    return 1.0 - 0.5 * log(1.0 - eps**2)


def hill_test_action(p: HillParams, quad_points: int = 512) -> float:
    """Action of the Hill test path at alpha = 1 (exact kinetic part, pair
    average by quadrature).

    For k != 0 the two third-body distances average identically, giving the
    (2/3d) * avg form; the static k = 0 path keeps its two distinct
    distances 3d +- R (a merged average would understate the action there).
    """
    if p.k == 0:
        third = 1.0 / (3 * p.d + p.R) + 1.0 / (3 * p.d - p.R)
    else:
        eps = p.R / (3 * p.d)
        third = 2.0 / (3 * p.d) * pair_average(eps, p.k, quad_points)
    return 2 * pi * (
        3 * p.omega**2 * p.d**2
        + p.R**2 * (p.k - p.omega) ** 2
        + 1.0 / (2 * p.R)
        + third
    )


def hill_action_upper_bound(p: HillParams) -> float:
    """Elementary upper bound for the k != 0 Hill action via the logarithmic
    average bound; at omega = 1/2, k in {0,1} this is
    2*pi*(3d^2/4 + R^2/4 + 1/(2R) + (2/3d)(1 - log(1 - R^2/9d^2)/2))."""
    eps = p.R / (3 * p.d)
    return 2 * pi * (
        3 * p.omega**2 * p.d**2
        + p.R**2 * (p.k - p.omega) ** 2
        + 1.0 / (2 * p.R)
        + 2.0 / (3 * p.d) * pair_average_bound(eps)
    )


def hill_branch_min(omega: float, k: int, quad_points: int = 256):
    """Minimize the Hill test action over (R, d) inside 0 < R < 3d.

    Returns (R, d, value).  Used for the scan branches; the fixed reference
    parameters (R=1, d=4/5) are kept for the closed comparisons.
    """

    def f(u):
        R, d = np.exp(u)
        if not R < 3 * d:
            return 1e9
        return hill_test_action(HillParams(R, d, k, omega), quad_points)

    res = scipy.optimize.minimize(f, np.log([1.0, 0.8]), method="Nelder-Mead",
                                  options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": 2000})
    R, d = np.exp(res.x)
    return float(R), float(d), float(res.fun)


def make_euler_loop(p: EulerParams, N: int = 0) -> Loop:
    N = N if N else max(4, abs(p.k) + 1)
    modes = np.zeros((3, 2 * N + 1), dtype=complex)
    modes[0, p.k + N] = p.R
    modes[1, p.k + N] = -p.R
    return Loop(UNIT, modes, N)


def make_hill_loop(p: HillParams, N: int = 0) -> Loop:
    N = N if N else max(4, abs(p.k) + 1)
    modes = np.zeros((3, 2 * N + 1), dtype=complex)
    modes[0, N] = p.d
    modes[1, N] = p.d
    modes[2, N] = -2 * p.d
    modes[0, p.k + N] = p.R
    modes[1, p.k + N] = -p.R
    return Loop(UNIT, project_com(modes, UNIT), N)


@dataclass
class ScanRow:
    omega: float
    branch: str
    value: float
    method: str


@dataclass
class ScanResult:
    rows: list
    winners: dict  # omega -> "euler" | "hill"


def line_symmetry_comparison(omega_grid, quad_points: int = 512,
                             optimize_hill: bool = True) -> ScanResult:
    """Euler and Hill action levels over the frequency grid, line symmetry.

    Both windings k in {0, 1} are admissible here.  Euler branches are the
    closed-form minima over R; Hill branches are quadrature values, either
    minimized over (R, d) or at the reference parameters R=1, d=4/5; the
    logarithmic bound rows at the reference parameters are included as well.
    """
    rows = []
    winners = {}
    for w in omega_grid:
        w = float(w)
        best = {}
        for k in (0, 1):
            if k != w:
                _, val = euler_min_action(w, k)
                rows.append(ScanRow(w, f"euler_k{k}", val, "closed_form"))
                best[f"euler_k{k}"] = val
            if optimize_hill:
                _, _, hv = hill_branch_min(w, k, quad_points)
            else:
                hv = hill_test_action(HillParams(1.0, 0.8, k, w), quad_points)
            rows.append(ScanRow(w, f"hill_k{k}", hv, "quadrature"))
            best[f"hill_k{k}"] = hv
            rows.append(
                ScanRow(w, f"hill_k{k}", hill_action_upper_bound(HillParams(1.0, 0.8, k, w)), "bound")
            )
        ebest = min(v for b, v in best.items() if b.startswith("euler"))
        hbest = min(v for b, v in best.items() if b.startswith("hill"))
        winners[w] = "hill" if hbest < ebest else "euler"
    return ScanResult(rows, winners)


def choreo21_comparison(omega_grid, quad_points: int = 512) -> ScanResult:
    """Hill-minus-Euler comparison under the 2-1-choreography constraint.

    Only odd windings are equivariant, so the k=0 Euler branch is absent;
    both branches are taken at k=1 with the reference Hill parameters
    R=1, d=4/5.  Also reports the difference and checks it is negative and
    increasing on [0, 1/2].
    """
    rows = []
    winners = {}
    for w in omega_grid:
        w = float(w)
        if not 0 <= w <= 0.5:
            raise ValueError("grid must lie within [0, 1/2]")
        _, ev = euler_min_action(w, 1)
        hv = hill_test_action(HillParams(1.0, 0.8, 1, w), quad_points)
        rows.append(ScanRow(w, "euler_k1", ev, "closed_form"))
        rows.append(ScanRow(w, "hill_k1", hv, "quadrature"))
        winners[w] = "hill" if hv < ev else "euler"
    return ScanResult(rows, winners)


def choreo21_admissible_winding(k: int) -> bool:
    """Equivariance of the circular branches under the half-period swap."""
    return k % 2 == 1


def choreo21_difference(omega: float, quad_points: int = 512) -> float:
    """A_H - A_E at the reference parameters, k = 1."""
    _, ev = euler_min_action(omega, 1)
    return hill_test_action(HillParams(1.0, 0.8, 1, omega), quad_points) - ev


def choreo21_difference_derivative(omega: float) -> float:
    """Closed-form d/dw of the difference at R=1, d=4/5, k=1:
    2*pi*(146 w / 25 - 2 + (25/2)^{1/3} (1-w)^{-1/3})."""
    return 2 * pi * (146.0 * omega / 25.0 - 2.0 + (12.5) ** (1 / 3) * (1 - omega) ** (-1 / 3))
