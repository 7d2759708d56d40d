"""Taxonomy predicates for planar three-body symmetry groups.

Implements, as computations: the orientation-character test (type R),
redundancy, rotating-frame reduction and its inverse, equivariant Fourier
mode spaces and the coercivity test built on them, bound-to-collisions
diagnostics, the homographic test, the rotating circle property, and the
full classification report for the ten trivial-core groups.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, pi

import numpy as np
from scipy.linalg import null_space

from .errors import IncompatibleMasses, IrrationalFrame, NotTypeR
from .groups import (
    REF,
    ROT,
    GroupElement,
    Masses,
    O2Elem,
    Perm3,
    SymmetryGroup,
    TABLE_NAMES,
    UNIT_MASSES,
    check_masses,
    config_action,
    core,
    action_type,
    basis_to_configs,
    fixed_config_space,
    generate_closure,
    named_group,
    time_isotropy,
    transitive_decomposition,
)


def is_type_R(G: SymmetryGroup) -> bool:
    """True iff the time and plane orientation characters coincide."""
    return all(g.tau.det == g.rho.det for g in G.elements)


def redundant_subgroup(G: SymmetryGroup) -> SymmetryGroup:
    """Subgroup of elements acting as pure time shifts with trivial rho, sigma."""
    elems = {
        g
        for g in G.elements
        if g.tau.kind == ROT
        and not g.tau.is_identity()
        and g.rho.is_identity()
        and g.sigma.is_identity()
    }
    return SymmetryGroup(elems, generators=sorted(elems))


def is_redundant(G: SymmetryGroup) -> bool:
    return redundant_subgroup(G).order > 1


# --- equivariant single-frequency mode spaces ----------------------------------

def equivariant_mode_space(G: SymmetryGroup, masses: Masses, n: int) -> np.ndarray:
    """Real basis of configurations c such that t -> c e^{int} is G-equivariant.

    Orientation-mixing elements (det tau != det rho) move frequency n to -n,
    so for n != 0 they force c = 0; everything else imposes exact linear or
    antilinear constraints on the 6 real coordinates of c.  Columns of the
    returned (6, d) array are the basis in (Re c1, Im c1, ..., Im c3).
    Includes the center-of-mass rows, so d <= 4.
    """
    check_masses(G, masses)
    rows = []

    def lin_rows(i, j, phase):
        # c_i = phase * c_j
        r1 = np.zeros(6)
        r2 = np.zeros(6)
        a, b = phase.real, phase.imag
        r1[2 * i] = 1.0
        r1[2 * j] -= a
        r1[2 * j + 1] += b
        r2[2 * i + 1] = 1.0
        r2[2 * j] -= b
        r2[2 * j + 1] -= a
        return [r1, r2]

    def anti_rows(i, j, phase):
        # c_i = phase * conj(c_j)
        r1 = np.zeros(6)
        r2 = np.zeros(6)
        a, b = phase.real, phase.imag
        r1[2 * i] = 1.0
        r1[2 * j] -= a
        r1[2 * j + 1] -= b
        r2[2 * i + 1] = 1.0
        r2[2 * j] -= b
        r2[2 * j + 1] += a
        return [r1, r2]

    for g in G.elements:
        if g.is_identity():
            continue
        inv = g.sigma.inverse()
        th = 2 * pi * float(g.tau.turn)
        ph = 2 * pi * float(g.rho.turn)
        mixing = g.tau.det != g.rho.det
        for i in (1, 2, 3):
            j = inv(i)
            if mixing and n != 0:
                r1 = np.zeros(6)
                r1[2 * (i - 1)] = 1.0
                r2 = np.zeros(6)
                r2[2 * (i - 1) + 1] = 1.0
                rows += [r1, r2]
                continue
            phase = np.exp(1j * (ph - n * th))
            if g.tau.kind == ROT and g.rho.kind == ROT:
                rows += lin_rows(i - 1, j - 1, phase)
            elif g.tau.kind == REF and g.rho.kind == REF:
                rows += anti_rows(i - 1, j - 1, phase)
            elif g.tau.kind == ROT:  # rho reflection, n = 0
                rows += anti_rows(i - 1, j - 1, phase)
            else:  # tau reflection, rho rotation, n = 0
                rows += lin_rows(i - 1, j - 1, phase)
    m = masses.as_array()
    com = np.zeros((2, 6))
    com[0, 0::2] = m
    com[1, 1::2] = m
    rows.append(com[0])
    rows.append(com[1])
    A = np.vstack(rows) if rows else com
    return null_space(A, rcond=1e-12)


def mode_space_dimension(G: SymmetryGroup, masses: Masses, n: int) -> int:
    return equivariant_mode_space(G, masses, n).shape[1]


def _omega_is_integer(omega) -> bool:
    if isinstance(omega, Fraction):
        return omega.denominator == 1
    if isinstance(omega, int):
        return True
    return float(omega) == round(float(omega))


def is_coercive(G: SymmetryGroup, masses: Masses, omega) -> bool:
    """True iff the kinetic quadratic form with weights (n-omega)^2 is
    positive definite on the equivariant loop space: equivalently, omega is
    not an integer n carrying a nonzero equivariant mode space."""
    check_masses(G, masses)
    if not _omega_is_integer(omega):
        return True
    n = int(round(float(omega)))
    return mode_space_dimension(G, masses, n) == 0


def degenerate_residues(G: SymmetryGroup, masses: Masses):
    """(modulus L, residues) describing the nonzero integers where coercivity
    fails; n = 0 is reported separately since orientation-mixing elements act
    differently there.

    The single-frequency constraints depend on n only through the phases
    e^{-2 pi i n a} with a the tau turns, so the degenerate set is a union of
    residue classes mod L = lcm of the turn denominators."""
    L = 1
    for g in G.elements:
        L = L * g.tau.turn.denominator // gcd(L, g.tau.turn.denominator)
    bad = tuple(
        r for r in range(L)
        if mode_space_dimension(G, masses, r if r else L) > 0
    )
    return L, bad


def describe_coercive_at(L: int, bad) -> str:
    if not bad:
        return "all omega"
    if len(bad) == L:
        return "omega not in Z"
    res = ",".join(str(r) for r in bad)
    return f"omega not in {{n in Z : n = {res} mod {L}}}"


# --- rotating-frame reduction ---------------------------------------------------

def _minimal_rotation(G: SymmetryGroup):
    """Element of ker(det tau) with minimal positive tau turn, or None."""
    cands = [
        g
        for g in G.elements
        if g.tau.kind == ROT and not g.tau.is_identity()
    ]
    if not cands:
        return None
    return min(cands, key=lambda g: (g.tau.turn, g.rho.turn, g.sigma.img))


def _frame_shift(g: GroupElement, omega0: Fraction) -> GroupElement:
    """Conjugate one element by the rotating-frame change of velocity omega0."""
    shift = O2Elem(ROT, -omega0 * g.tau.turn)
    return GroupElement(g.tau, shift.compose(g.rho), g.sigma)


def _rescale_time(g: GroupElement, factor: int) -> GroupElement:
    return GroupElement(O2Elem(g.tau.kind, g.tau.turn * factor), g.rho, g.sigma)


def rotating_frame_reduce(G: SymmetryGroup, omega):
    """Change rotating frame so pure time shifts act trivially on the plane,
    then quotient the redundant subgroup and rescale the period.

    Returns (reduced group, new omega as Fraction).  Requires type R; the
    minimal time-rotation generator must have a rational plane rotation whose
    turn times the time order is integral.
    """
    if not is_type_R(G):
        raise NotTypeR("rotating-frame reduction is defined for type R groups only")
    omega = _as_rational(omega)
    g_star = _minimal_rotation(G)
    if g_star is None:
        return G, omega
    c = g_star.tau.turn.denominator  # tau(g*) = rot(1/c) by minimality
    if g_star.tau.turn.numerator != 1:
        # minimal turn p/c with p>1 cannot arise in a closed group
        raise NotTypeR("time rotations do not form a cyclic group")
    b = g_star.rho.turn * c
    if b.denominator != 1:
        raise IrrationalFrame(f"plane rotation turn {g_star.rho.turn} incompatible with order {c}")
    omega0 = Fraction(b)
    shifted = [_frame_shift(g, omega0) for g in G.elements]
    redundant = {
        g
        for g in shifted
        if g.tau.kind == ROT
        and not g.tau.is_identity()
        and g.rho.is_identity()
        and g.sigma.is_identity()
    }
    m = len(redundant) + 1
    reduced_elems = {_rescale_time(g, m) for g in shifted}
    if len(reduced_elems) * m != len(shifted):
        raise NotTypeR("redundant subgroup does not tile the group")
    reduced = SymmetryGroup(reduced_elems)
    new_omega = (omega + omega0) * Fraction(1, m)
    return reduced, new_omega


def _as_rational(omega) -> Fraction:
    if isinstance(omega, Fraction):
        return omega
    if isinstance(omega, int) or isinstance(omega, str):
        return Fraction(omega)
    f = float(omega)
    if f == round(f):
        return Fraction(round(f))
    frac = Fraction(f).limit_denominator(10**6)
    if abs(float(frac) - f) > 1e-15 * max(1.0, abs(f)):
        raise IrrationalFrame(f"omega = {omega!r} is not recognizably rational")
    return frac


def rotating_frame_unreduce(G: SymmetryGroup, omega):
    """Inverse construction: from a reduced group and rational omega' = p/q,
    build the inertial-frame group whose reduction is (G, omega')."""
    if not is_type_R(G):
        raise NotTypeR("only type R groups admit rotating-frame changes")
    omega = _as_rational(omega)
    p, q = omega.numerator, omega.denominator
    g_star = _minimal_rotation(G)
    if g_star is not None and not g_star.rho.is_identity():
        raise NotTypeR("group is not in reduced form (time shift acts on the plane)")
    s = g_star.sigma.order() if g_star is not None else 1
    sigma = g_star.sigma if g_star is not None else Perm3((1, 2, 3))
    c = s * q
    gens = [GroupElement(O2Elem(ROT, Fraction(1, c)), O2Elem(ROT, Fraction(p, c)), sigma)]
    for h in G.generators:
        tau = O2Elem(h.tau.kind, h.tau.turn / q)
        rho = O2Elem(ROT, p * (h.tau.turn / q)).compose(h.rho)
        gens.append(GroupElement(tau, rho, h.sigma))
    return generate_closure(gens)


# --- bound to collisions / homographic ------------------------------------------

def _isotropy_subgroups(G: SymmetryGroup):
    """Distinct time-isotropy subgroups: the core plus every isotropy at a
    reflection-fixed time."""
    subs = {core(G)}
    for g in G.elements:
        if g.tau.kind == REF:
            u = g.tau.turn
            for t in (u / 2 % 1, (u / 2 + Fraction(1, 2)) % 1):
                subs.add(time_isotropy(G, t))
    return subs


def _line_action_sign(g: GroupElement, xi: np.ndarray):
    """If g maps the line R*xi to itself, return the +-1 factor, else None."""
    img = config_action(g, xi)
    nrm = np.linalg.norm(xi)
    if np.linalg.norm(img - xi) < 1e-9 * nrm:
        return 1
    if np.linalg.norm(img + xi) < 1e-9 * nrm:
        return -1
    return None


def is_bound_to_collisions(G: SymmetryGroup, masses: Masses, seed: int = 0,
                           deep: bool = True) -> str:
    """'proved', 'refuted' or 'suspected'.

    proved (a): some time-isotropy subgroup pins the configuration into a
    collision set; proved (b): the core-fixed space is a real line and some
    element reverses it, forcing a sign change (hence a zero) of the scalar
    coordinate.  refuted: an explicit equivariant loop with all pairwise
    distances >= 1e-3 is exhibited (projection of seeds; with deep=True,
    penalty descent as a fallback).  Otherwise suspected.
    """
    check_masses(G, masses)
    # (a) isotropy forces a collision
    for H in _isotropy_subgroups(G):
        if H.order == 1:
            continue
        B = fixed_config_space(H, masses)
        if B.shape[1] == 0:
            return "proved"
        configs = basis_to_configs(B)
        for i, j in ((0, 1), (0, 2), (1, 2)):
            if np.abs(configs[:, i] - configs[:, j]).max() < 1e-10:
                return "proved"
    # (b) sign reversal on a one-dimensional core-fixed space
    Bk = fixed_config_space(core(G), masses)
    if Bk.shape[1] == 0:
        return "proved"
    if Bk.shape[1] == 1:
        xi = basis_to_configs(Bk)[0]
        for g in G.elements:
            if _line_action_sign(g, xi) == -1:
                return "proved"
    # refutation by explicit collisionless equivariant loop
    from .loops import random_loop, equivariant_project, inertia
    from .action import min_pair_distance

    for k in range(8):
        proj = equivariant_project(random_loop(masses, N=12, seed=seed + 7919 * k), G)
        if np.linalg.norm(proj.modes) < 1e-12:
            continue
        modes = proj.modes / np.sqrt(np.mean(inertia(proj)))
        if min_pair_distance(modes) >= 1e-3:
            return "refuted"
    if deep and _penalty_refute(G, masses, seed):
        return "refuted"
    return "suspected"


def _penalty_refute(G: SymmetryGroup, masses: Masses, seed: int) -> bool:
    """Push equivariant loops away from collisions by descending a smooth
    inverse-square pair penalty; deterministic per seed."""
    import scipy.optimize

    from .loops import equivariant_basis, basis_expand, basis_reduce, eval_loop, random_loop
    from .action import min_pair_distance, _PAIRS

    N = 12
    basis = equivariant_basis(G, masses, N)
    if basis.shape[0] == 0:
        return False
    M = 8 * N
    for k in range(8):
        z0 = basis_reduce(random_loop(masses, N, seed=seed + 104729 * k).modes, basis)
        if np.linalg.norm(z0) < 1e-10:
            continue
        z0 /= np.linalg.norm(z0)

        def fg(z):
            modes = basis_expand(z, basis)
            x = eval_loop(modes, M)
            f = 0.0
            grad = np.zeros_like(modes)
            for i, j in _PAIRS:
                d = x[i] - x[j]
                r2 = np.abs(d) ** 2 + 1e-6
                f += float((1.0 / r2).sum()) / M
                gg = -d / r2**2
                Fi = np.zeros_like(x)
                Fi[i] = 2 * gg
                Fi[j] = -2 * gg
                grad += np.fft.fft(Fi, axis=1)[:, np.arange(-N, N + 1) % M] / M
            reg = float(z @ z)
            return f + 0.5 * (reg - 3.0) ** 2, basis_reduce(grad, basis) + 2 * (reg - 3.0) * z
        res = scipy.optimize.minimize(fg, z0, jac=True, method="L-BFGS-B",
                                      options={"maxiter": 300})
        modes = basis_expand(res.x, basis)
        if min_pair_distance(modes) >= 1e-3:
            return True
    return False


def is_homographic(G: SymmetryGroup, masses: Masses) -> bool:
    """True iff the core-fixed configuration space lies in one complex line,
    so equivariant loops are a single configuration rescaled and rotated."""
    check_masses(G, masses)
    B = fixed_config_space(core(G), masses)
    d = B.shape[1]
    if d == 0 or d > 2:
        return False
    configs = basis_to_configs(B)
    xi = configs[0]
    if d == 1:
        return True
    eta = configs[1]
    # eta must lie in span_R{xi, i*xi}
    A = np.column_stack(
        [
            np.concatenate([xi.real, xi.imag]),
            np.concatenate([-xi.imag, xi.real]),
            np.concatenate([eta.real, eta.imag]),
        ]
    )
    s = np.linalg.svd(A, compute_uv=False)
    return s[2] < 1e-10 * s[0]


# --- rotating circle property -----------------------------------------------------

def _subgroup_has_rcp(K: SymmetryGroup) -> bool:
    if any(g.rho.det != 1 for g in K.elements):
        return False
    for i1 in (1, 2, 3):
        for i2 in (1, 2, 3):
            if i1 >= i2:
                continue
            ok = True
            for g in K.elements:
                if (g.sigma(i1) == i1 or g.sigma(i2) == i2) and not g.rho.is_identity():
                    ok = False
                    break
            if ok:
                return True
    return False


def has_rcp(G: SymmetryGroup) -> bool:
    """Rotating circle property: every time-isotropy subgroup (including the
    core) preserves plane orientation and admits two indices whose fixers
    act trivially on the plane."""
    return all(_subgroup_has_rcp(K) for K in _isotropy_subgroups(G))


# --- report ------------------------------------------------------------------------

@dataclass
class ClassificationReport:
    name: str
    order: int
    type_R: bool
    action_type: str
    transitive_decomposition: tuple
    core_order: int
    redundant: bool
    coercive_modulus: int
    coercive_excluded: tuple
    coercive_at: str
    coercive_at_zero: bool
    bound_to_collisions: str
    homographic: bool
    fully_uncoercive: bool
    rcp: bool
    hgm: str = ""

    def decomposition_string(self) -> str:
        return "+".join(str(l) for l in self.transitive_decomposition)

    def to_record(self) -> dict:
        return {
            "name": self.name,
            "order": self.order,
            "type_R": "yes" if self.type_R else "no",
            "action_type": self.action_type,
            "trans_dec": self.decomposition_string(),
            "rcp": "yes" if self.rcp else "no",
            "hgm": self.hgm,
            "core_order": self.core_order,
            "redundant": "yes" if self.redundant else "no",
            "coercive_at": self.coercive_at,
            "bound_to_collisions": self.bound_to_collisions,
            "homographic": "yes" if self.homographic else "no",
            "fully_uncoercive": "yes" if self.fully_uncoercive else "no",
        }


REPORT_COLUMNS = (
    "name", "order", "type_R", "action_type", "trans_dec", "rcp", "hgm",
    "core_order", "redundant", "coercive_at", "bound_to_collisions",
    "homographic", "fully_uncoercive",
)

# Homographic-global-minimizer column: filled from the closed-form comparison
# results (equilateral relative equilibria minimize where they are
# equivariant; test paths beat the collinear ones elsewhere; zero angular
# momentum rules it out for the non-type-R groups), not computed here.
HGM_COLUMN = {
    "trivial": "yes", "line": "no", "choreo21": "no", "isosceles": "yes",
    "hill": "no", "choreo3": "yes", "lagrange": "yes", "c6": "no", "d6": "no",
    "d12": "no",
}


def classify(G: SymmetryGroup, masses: Masses, name: str = "", seed: int = 0,
             fast: bool = False) -> ClassificationReport:
    """Full report; with fast=True the bound-to-collisions refutation skips
    the penalty descent (structural checks and seed projection only)."""
    check_masses(G, masses)
    _, lengths = transitive_decomposition(G)
    L, bad = degenerate_residues(G, masses)
    type_r = is_type_R(G)
    coercive0 = mode_space_dimension(G, masses, 0) == 0
    btc = is_bound_to_collisions(G, masses, seed, deep=not fast)
    return ClassificationReport(
        name=name,
        order=G.order,
        type_R=type_r,
        action_type=action_type(G),
        transitive_decomposition=lengths,
        core_order=core(G).order,
        redundant=is_redundant(G),
        coercive_modulus=L,
        coercive_excluded=bad,
        coercive_at=describe_coercive_at(L, bad),
        coercive_at_zero=coercive0,
        bound_to_collisions=btc,
        homographic=is_homographic(G, masses),
        fully_uncoercive=(not type_r) and (not coercive0),
        rcp=has_rcp(G),
        hgm=HGM_COLUMN.get(name, ""),
    )


def build_table(masses: Masses = UNIT_MASSES, fast: bool = True):
    """Classification of the ten trivial-core groups, in catalog order."""
    return [classify(named_group(n), masses, name=n, fast=fast) for n in TABLE_NAMES]
