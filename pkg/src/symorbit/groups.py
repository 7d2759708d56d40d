"""Exact algebra of finite symmetry groups of the planar three-body problem.

A group element is a triple (tau, rho, sigma): tau acts on the time circle,
rho on the plane, sigma permutes the body indices {1,2,3}.  Both orthogonal
parts are stored exactly as (kind, rational turn):

    rot(a):  t |-> t + 2*pi*a on the circle,   z |-> e^{2*pi*i*a} z on the plane
    ref(u):  t |-> 2*pi*u - t on the circle,   z |-> e^{2*pi*i*u} conj(z)
             (reflection across the line at angle pi*u)

With this parameterization composition is pure Fraction arithmetic, so every
group-level predicate downstream (orientation characters, isotropy, orbit
decomposition) is tolerance-free.  Floats enter only when an element acts on
an actual configuration.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from math import pi
from typing import Iterable, Sequence

import numpy as np
from scipy.linalg import null_space

from .errors import ClosureOverflow, IncompatibleMasses, UnknownName

ROT = "rot"
REF = "ref"

CLOSURE_CAP = 1024


def _mod1(x: Fraction) -> Fraction:
    return x - (x.numerator // x.denominator)


@dataclass(frozen=True, order=True)
class O2Elem:
    """Element of O(2) as (kind, turn) with turn a Fraction in [0, 1)."""

    kind: str
    turn: Fraction

    def __post_init__(self):
        if self.kind not in (ROT, REF):
            raise ValueError(f"kind must be 'rot' or 'ref', got {self.kind!r}")
        object.__setattr__(self, "turn", _mod1(Fraction(self.turn)))

    @property
    def det(self) -> int:
        return 1 if self.kind == ROT else -1

    def compose(self, other: "O2Elem") -> "O2Elem":
        # Same composition table for the circle and the plane action.
        if self.kind == ROT and other.kind == ROT:
            return O2Elem(ROT, self.turn + other.turn)
        if self.kind == ROT and other.kind == REF:
            return O2Elem(REF, other.turn + self.turn)
        if self.kind == REF and other.kind == ROT:
            return O2Elem(REF, self.turn - other.turn)
        return O2Elem(ROT, self.turn - other.turn)

    def inverse(self) -> "O2Elem":
        if self.kind == ROT:
            return O2Elem(ROT, -self.turn)
        return self

    def is_identity(self) -> bool:
        return self.kind == ROT and self.turn == 0

    def matrix(self) -> np.ndarray:
        a = 2 * pi * float(self.turn)
        c, s = np.cos(a), np.sin(a)
        if self.kind == ROT:
            return np.array([[c, -s], [s, c]])
        return np.array([[c, s], [s, -c]])

    def apply_complex(self, z):
        """Act on points of the plane E identified with C."""
        w = np.exp(2j * pi * float(self.turn))
        return w * z if self.kind == ROT else w * np.conj(z)

    def time_map(self, t_turn: Fraction) -> Fraction:
        """Act on a time given as a fraction of the full period."""
        if self.kind == ROT:
            return _mod1(t_turn + self.turn)
        return _mod1(self.turn - t_turn)

    def fixes_time(self, t_turn: Fraction) -> bool:
        return self.time_map(Fraction(t_turn)) == _mod1(Fraction(t_turn))

    def __repr__(self):
        return f"{self.kind}({self.turn})"


def rot(turn) -> O2Elem:
    return O2Elem(ROT, Fraction(turn))


def ref(turn) -> O2Elem:
    return O2Elem(REF, Fraction(turn))


O2_IDENTITY = rot(0)


@dataclass(frozen=True, order=True)
class Perm3:
    """Permutation of {1,2,3} stored as the image tuple (s(1), s(2), s(3))."""

    img: tuple

    def __post_init__(self):
        if sorted(self.img) != [1, 2, 3]:
            raise ValueError(f"not a bijection of {{1,2,3}}: {self.img}")

    def __call__(self, i: int) -> int:
        return self.img[i - 1]

    def compose(self, other: "Perm3") -> "Perm3":
        return Perm3(tuple(self(other(i)) for i in (1, 2, 3)))

    def inverse(self) -> "Perm3":
        inv = [0, 0, 0]
        for i in (1, 2, 3):
            inv[self(i) - 1] = i
        return Perm3(tuple(inv))

    def is_identity(self) -> bool:
        return self.img == (1, 2, 3)

    def order(self) -> int:
        p, n = self, 1
        while not p.is_identity():
            p, n = p.compose(self), n + 1
        return n

    def cycle_notation(self) -> str:
        seen, parts = set(), []
        for i in (1, 2, 3):
            if i in seen:
                continue
            cyc, j = [i], self(i)
            seen.add(i)
            while j != i:
                cyc.append(j)
                seen.add(j)
                j = self(j)
            if len(cyc) > 1:
                parts.append("(" + "".join(map(str, cyc)) + ")")
        return "".join(parts) or "()"

    def __repr__(self):
        return self.cycle_notation()


PERM_IDENTITY = Perm3((1, 2, 3))


def perm(cycles: str) -> Perm3:
    """Parse cycle notation such as '()', '(12)', '(123)'."""
    s = cycles.replace(" ", "")
    if s in ("()", ""):
        return PERM_IDENTITY
    if not re.fullmatch(r"(\([123]{2,3}\))+", s):
        raise ValueError(f"malformed cycle notation: {cycles!r}")
    img = {1: 1, 2: 2, 3: 3}
    used = set()
    for grp in re.findall(r"\(([123]+)\)", s):
        idx = [int(ch) for ch in grp]
        if len(set(idx)) != len(idx) or used & set(idx):
            raise ValueError(f"repeated index in cycles: {cycles!r}")
        used |= set(idx)
        for a, b in zip(idx, idx[1:] + idx[:1]):
            img[a] = b
    return Perm3((img[1], img[2], img[3]))


@dataclass(frozen=True, order=True)
class GroupElement:
    """Triple (tau, rho, sigma) acting on time circle, plane and indices."""

    tau: O2Elem
    rho: O2Elem
    sigma: Perm3

    def compose(self, other: "GroupElement") -> "GroupElement":
        return GroupElement(
            self.tau.compose(other.tau),
            self.rho.compose(other.rho),
            self.sigma.compose(other.sigma),
        )

    def __mul__(self, other):
        return self.compose(other)

    def inverse(self) -> "GroupElement":
        return GroupElement(self.tau.inverse(), self.rho.inverse(), self.sigma.inverse())

    def is_identity(self) -> bool:
        return self.tau.is_identity() and self.rho.is_identity() and self.sigma.is_identity()

    def __repr__(self):
        return f"[tau={self.tau} rho={self.rho} sigma={self.sigma}]"


IDENTITY = GroupElement(O2_IDENTITY, O2_IDENTITY, PERM_IDENTITY)


def element(tau: O2Elem, rho: O2Elem, sigma) -> GroupElement:
    if isinstance(sigma, str):
        sigma = perm(sigma)
    return GroupElement(tau, rho, sigma)


class SymmetryGroup:
    """Finite composition-closed set of GroupElements containing the identity."""

    def __init__(self, elements: Iterable[GroupElement], generators: Sequence[GroupElement] = ()):
        self.elements = frozenset(elements) | {IDENTITY}
        self.generators = tuple(generators) if generators else tuple(sorted(self.elements))
        self._check_closed()

    def _check_closed(self):
        for a in self.elements:
            if a.inverse() not in self.elements:
                raise ValueError(f"not closed under inversion: {a}")

    @property
    def order(self) -> int:
        return len(self.elements)

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(sorted(self.elements))

    def __contains__(self, g):
        return g in self.elements

    def __eq__(self, other):
        return isinstance(other, SymmetryGroup) and self.elements == other.elements

    def __hash__(self):
        return hash(self.elements)

    def __repr__(self):
        return f"SymmetryGroup(order={self.order})"

    def is_subgroup_of(self, other: "SymmetryGroup") -> bool:
        return self.elements <= other.elements

    def tau_image(self):
        """Image of the group in O(2) acting on the time circle."""
        return sorted({g.tau for g in self.elements})


def generate_closure(gens, cap: int = CLOSURE_CAP) -> SymmetryGroup:
    """Smallest composition-closed set containing the generators and identity.

    Raises ClosureOverflow if more than `cap` elements appear (Fraction turns
    always generate finite groups, but the cap guards against unintended
    huge denominators).
    """
    gens = list(gens)
    elements = {IDENTITY}
    frontier = [IDENTITY]
    all_gens = gens + [g.inverse() for g in gens]
    while frontier:
        nxt = []
        for a in frontier:
            for g in all_gens:
                b = a.compose(g)
                if b not in elements:
                    elements.add(b)
                    nxt.append(b)
                    if len(elements) > cap:
                        raise ClosureOverflow(
                            f"group exceeds cap of {cap} elements"
                        )
        frontier = nxt
    return SymmetryGroup(elements, generators=gens)


def subgroup(G: SymmetryGroup, elems) -> SymmetryGroup:
    """Subgroup of G given by a subset of its elements (closure is re-taken)."""
    H = generate_closure(list(elems), cap=G.order)
    if not H.elements <= G.elements:
        raise ValueError("elements generate outside the ambient group")
    return H


def core(G: SymmetryGroup) -> SymmetryGroup:
    """Kernel of tau: the subgroup acting trivially on the time circle."""
    return SymmetryGroup(
        {g for g in G.elements if g.tau.is_identity()},
        generators=[g for g in G.elements if g.tau.is_identity() and not g.is_identity()],
    )


def action_type(G: SymmetryGroup) -> str:
    """One of 'cyclic', 'brake', 'dihedral' for the induced circle action.

    cyclic: the quotient by the core preserves the circle orientation (this
    includes the trivial quotient); brake: the quotient is a single
    reflection; dihedral: anything else.
    """
    image = set(G.tau_image())
    reflections = {t for t in image if t.kind == REF}
    if not reflections:
        return "cyclic"
    if len(image) == 2 and len(reflections) == 1:
        return "brake"
    return "dihedral"


def transitive_decomposition(G: SymmetryGroup):
    """Orbit partition of {1,2,3} under the index action, plus length multiset.

    Returns (orbits, lengths) with orbits a tuple of sorted tuples and
    lengths sorted decreasingly, e.g. ((1,2),(3,)), (2,1).
    """
    orbits = []
    seen = set()
    for i in (1, 2, 3):
        if i in seen:
            continue
        orb = {i}
        changed = True
        while changed:
            changed = False
            for g in G.elements:
                for j in list(orb):
                    k = g.sigma(j)
                    if k not in orb:
                        orb.add(k)
                        changed = True
        orbits.append(tuple(sorted(orb)))
        seen |= orb
    orbits.sort()
    lengths = tuple(sorted((len(o) for o in orbits), reverse=True))
    return tuple(orbits), lengths


def _as_turn(t) -> Fraction:
    """Interpret a time as a fraction of the period; floats are in [0, 2*pi)."""
    if isinstance(t, Fraction):
        return _mod1(t)
    if isinstance(t, int):
        return _mod1(Fraction(t))
    return _mod1(Fraction(t / (2 * pi)).limit_denominator(720720))


def time_isotropy(G: SymmetryGroup, t) -> SymmetryGroup:
    """Subgroup of elements whose tau fixes the given time.

    `t` may be a Fraction (fraction of the period, exact) or a float in
    radians (snapped to a nearby rational turn).
    """
    turn = _as_turn(t)
    elems = {g for g in G.elements if g.tau.fixes_time(turn)}
    return SymmetryGroup(elems, generators=sorted(e for e in elems if not e.is_identity()))


@dataclass(frozen=True)
class FundamentalDomain:
    """Closed time interval [t0, t1] generating the circle under the quotient action.

    Times are stored as Fractions of the period; t1 - t0 = 1/|G/ker tau|
    exactly.  H0, H1 are the isotropy subgroups at the endpoints.
    """

    t0: Fraction
    t1: Fraction
    H0: SymmetryGroup
    H1: SymmetryGroup

    @property
    def length_turn(self) -> Fraction:
        return self.t1 - self.t0


def fundamental_domain(G: SymmetryGroup) -> FundamentalDomain:
    image = G.tau_image()
    n_image = len(set(image))
    atype = action_type(G)
    if atype == "cyclic":
        t0, t1 = Fraction(0), Fraction(1, n_image)
        C = core(G)
        return FundamentalDomain(t0, t1, C, C)
    # Reflection-fixed times, as turns: ref(u) fixes u/2 and u/2 + 1/2.
    fixed = set()
    for t in image:
        if t.kind == REF:
            fixed.add(_mod1(t.turn / 2))
            fixed.add(_mod1(t.turn / 2 + Fraction(1, 2)))
    fixed = sorted(fixed)
    t0 = fixed[0]
    t1 = fixed[1] if len(fixed) > 1 else t0 + Fraction(1, 2)
    dom = FundamentalDomain(t0, t1, time_isotropy(G, t0), time_isotropy(G, t1))
    assert dom.length_turn == Fraction(1, n_image)
    return dom


@dataclass(frozen=True)
class Masses:
    m1: float
    m2: float
    m3: float

    def __post_init__(self):
        if not (self.m1 > 0 and self.m2 > 0 and self.m3 > 0):
            raise ValueError("masses must be positive")

    def as_array(self) -> np.ndarray:
        return np.array([self.m1, self.m2, self.m3], dtype=float)

    def __getitem__(self, i):
        return (self.m1, self.m2, self.m3)[i]


UNIT_MASSES = Masses(1.0, 1.0, 1.0)


def check_masses(G: SymmetryGroup, masses: Masses) -> None:
    """Masses must be constant on index orbits; raises IncompatibleMasses."""
    m = masses.as_array()
    orbits, _ = transitive_decomposition(G)
    for orb in orbits:
        vals = [m[i - 1] for i in orb]
        if max(vals) - min(vals) > 1e-12 * max(vals):
            raise IncompatibleMasses(f"masses {vals} differ on the orbit {orb}")


def config_action(g: GroupElement, x) -> np.ndarray:
    """Action on a configuration (three complex positions): (gx)_i = rho(g) x_{sigma(g)^{-1} i}."""
    x = np.asarray(x, dtype=complex)
    inv = g.sigma.inverse()
    return np.array([g.rho.apply_complex(x[inv(i) - 1]) for i in (1, 2, 3)])


def _config_matrix(g: GroupElement) -> np.ndarray:
    """Real 6x6 matrix of config_action on (Re x1, Im x1, ..., Im x3)."""
    R = g.rho.matrix()
    inv = g.sigma.inverse()
    M = np.zeros((6, 6))
    for i in (1, 2, 3):
        j = inv(i)
        M[2 * (i - 1): 2 * i, 2 * (j - 1): 2 * j] = R
    return M


def fixed_config_space(H: SymmetryGroup, masses: Masses) -> np.ndarray:
    """Real basis (columns, as 6-vectors) of the center-of-mass-zero
    configurations fixed by every element of H."""
    check_masses(H, masses)
    rows = []
    for h in H.elements:
        if h.is_identity():
            continue
        rows.append(_config_matrix(h) - np.eye(6))
    m = masses.as_array()
    com = np.zeros((2, 6))
    com[0, 0::2] = m
    com[1, 1::2] = m
    rows.append(com)
    A = np.vstack(rows)
    return null_space(A, rcond=1e-12)


def basis_to_configs(B: np.ndarray) -> np.ndarray:
    """Convert a (6, k) real basis into k complex configurations (k, 3)."""
    if B.size == 0:
        return np.zeros((0, 3), dtype=complex)
    return (B[0::2, :] + 1j * B[1::2, :]).T


def validate_hypotheses(G: SymmetryGroup, masses: Masses = UNIT_MASSES, seed: int = 0) -> dict:
    """Diagnostic report on the standing hypotheses for a symmetry group.

    hh1: joint kernel of (tau, rho, sigma) is trivial (exact check);
    hh3: no redundant elements, i.e. no g != 1 with tau a nontrivial rotation
         and rho, sigma trivial (exact check);
    hh2: no proper linear subspace E' contains all positions of all
         equivariant loops.  Checked heuristically: a random equivariant loop
         is sampled and the rank of its set of position values is computed.
    """
    hh1 = all(
        not (g.tau.is_identity() and g.rho.is_identity() and g.sigma.is_identity())
        for g in G.elements
        if not g.is_identity()
    )
    hh3 = all(
        not (
            g.tau.kind == ROT
            and not g.tau.is_identity()
            and g.rho.is_identity()
            and g.sigma.is_identity()
        )
        for g in G.elements
    )
    from .loops import random_loop, equivariant_project, eval_loop

    loop = random_loop(masses, N=8, seed=seed)
    try:
        proj = equivariant_project(loop, G)
        pts = eval_loop(proj.modes, 64).reshape(-1)
        vals = np.column_stack([pts.real, pts.imag])
        scale = np.abs(pts).max()
        if scale < 1e-12:
            hh2 = False
        else:
            s = np.linalg.svd(vals, compute_uv=False)
            hh2 = s[1] > 1e-9 * s[0]
    except IncompatibleMasses:
        hh2 = False
    return {"hh1": hh1, "hh2": hh2, "hh3": hh3}


# --- catalog -----------------------------------------------------------------

def _catalog() -> dict:
    e, r, f = element, rot, ref
    return {
        "trivial": [],
        "line": [e(f(0), f(0), "()")],
        "choreo21": [e(r(Fraction(1, 2)), r(0), "(12)")],
        "isosceles": [e(f(0), f(0), "(12)")],
        "hill": [e(r(Fraction(1, 2)), r(0), "(12)"), e(f(0), f(0), "()")],
        "choreo3": [e(r(Fraction(1, 3)), r(0), "(123)")],
        "lagrange": [e(r(Fraction(1, 3)), r(0), "(123)"), e(f(0), f(0), "(12)")],
        "c6": [e(r(Fraction(1, 6)), f(0), "(123)")],
        "d6": [e(r(Fraction(1, 3)), r(0), "(132)"), e(f(0), r(Fraction(1, 2)), "(12)")],
        "d12": [e(r(Fraction(1, 6)), f(0), "(123)"), e(f(0), r(Fraction(1, 2)), "(12)")],
        # order-2 group forcing x1 = x2 at the reflection-fixed times
        "example_bound1": [e(f(0), r(0), "(12)")],
        # K x C2: core K of order 6 acting trivially on time, extended by a
        # half-period shift acting as the antipodal map
        "example_bound2": [
            e(r(0), r(Fraction(1, 3)), "(123)"),
            e(r(0), f(0), "(12)"),
            e(r(Fraction(1, 2)), r(Fraction(1, 2)), "()"),
        ],
    }


CATALOG_NAMES = tuple(_catalog().keys())
TABLE_NAMES = (
    "trivial", "line", "choreo21", "isosceles", "hill",
    "choreo3", "lagrange", "c6", "d6", "d12",
)


def named_group(name: str) -> SymmetryGroup:
    try:
        gens = _catalog()[name]
    except KeyError:
        raise UnknownName(f"unknown group {name!r}; known: {', '.join(CATALOG_NAMES)}")
    return generate_closure(gens)


# --- text format -------------------------------------------------------------

_GEN_RE = re.compile(
    r"tau=(rot|ref)\s+(\S+)\s+rho=(rot|ref)\s+(\S+)\s+sigma=(\S+)"
)


def parse_generator(line: str) -> GroupElement:
    """Parse one generator line: 'tau=rot 1/3 rho=ref 0 sigma=(12)'."""
    m = _GEN_RE.match(line.strip())
    if not m:
        raise ValueError(f"malformed generator line: {line!r}")
    tk, tt, rk, rt, sg = m.groups()
    return GroupElement(O2Elem(tk, Fraction(tt)), O2Elem(rk, Fraction(rt)), perm(sg))


def format_generator(g: GroupElement) -> str:
    return (
        f"tau={g.tau.kind} {g.tau.turn} rho={g.rho.kind} {g.rho.turn} "
        f"sigma={g.sigma.cycle_notation()}"
    )


def parse_group_file(text: str, cap: int = CLOSURE_CAP) -> SymmetryGroup:
    """Group from text: one generator per line, '#' starts a comment."""
    gens = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        gens.append(parse_generator(line))
    return generate_closure(gens, cap=cap)
