"""Taxonomy predicates against brute-force oracles and the published table."""

from fractions import Fraction

import numpy as np
import pytest

from symorbit.classify import (
    build_table,
    classify,
    degenerate_residues,
    equivariant_mode_space,
    has_rcp,
    is_bound_to_collisions,
    is_coercive,
    is_homographic,
    is_redundant,
    is_type_R,
    mode_space_dimension,
    redundant_subgroup,
    rotating_frame_reduce,
    rotating_frame_unreduce,
)
from symorbit.errors import NotTypeR
from symorbit.groups import (
    TABLE_NAMES,
    UNIT_MASSES,
    Masses,
    element,
    generate_closure,
    named_group,
    ref,
    rot,
)
from symorbit.loops import group_average, project_com

F = Fraction

# name -> (order, type_R, action_type, decomposition, rcp)
EXPECTED_TABLE = {
    "trivial": (1, True, "cyclic", (1, 1, 1), True),
    "line": (2, True, "brake", (1, 1, 1), False),
    "choreo21": (2, True, "cyclic", (2, 1), True),
    "isosceles": (2, True, "brake", (2, 1), False),
    "hill": (4, True, "dihedral", (2, 1), False),
    "choreo3": (3, True, "cyclic", (3,), True),
    "lagrange": (6, True, "dihedral", (3,), False),
    "c6": (6, False, "cyclic", (3,), True),
    "d6": (6, False, "dihedral", (3,), True),
    "d12": (12, False, "dihedral", (3,), False),
}


def oracle_mode_dim(G, masses, n):
    """Brute force through the loop-space averaging projector: dimension of
    the configurations c whose pure-frequency loop c e^{int} is fixed.

    Probes the projector on the (n, -n) pair slots and solves P(u, 0) = (u, 0)
    as a real linear system; independent of the constraint assembly used by
    equivariant_mode_space."""
    N = abs(n) + 1
    rows = []
    images = []
    for i in range(3):
        for val in (1.0, 1.0j):
            probe = np.zeros((3, 2 * N + 1), dtype=complex)
            probe[i, n + N] = val
            images.append(project_com(group_average(probe, G), masses))
    # P(u,0) - (u,0) = 0 over the full mode matrix
    A = []
    for col, img in enumerate(images):
        i, re_im = divmod(col, 2)
        delta = img.copy()
        delta[i, n + N] -= 1.0 if re_im == 0 else 1.0j
        A.append(np.concatenate([delta.real.reshape(-1), delta.imag.reshape(-1)]))
    A = np.array(A).T  # equations x unknowns(6)
    from scipy.linalg import null_space

    ns = null_space(A, rcond=1e-12)
    return ns.shape[1]


def test_type_R():
    assert is_type_R(named_group("lagrange"))
    assert not is_type_R(named_group("c6"))
    assert is_type_R(named_group("trivial"))


def test_redundant_subgroup():
    for name in TABLE_NAMES:
        assert redundant_subgroup(named_group(name)).order == 1
    G = generate_closure([element(rot(F(1, 2)), rot(0), "()")])
    assert redundant_subgroup(G) == G
    assert is_redundant(G)


@pytest.mark.parametrize("name", TABLE_NAMES)
@pytest.mark.parametrize("n", range(-6, 7))
def test_mode_space_oracle_equivalence(name, n):
    G = named_group(name)
    assert mode_space_dimension(G, UNIT_MASSES, n) == oracle_mode_dim(G, UNIT_MASSES, n)


def test_mode_space_examples():
    m = UNIT_MASSES
    assert mode_space_dimension(named_group("choreo3"), m, 0) == 0
    assert mode_space_dimension(named_group("choreo3"), m, 1) > 0
    for n in range(-4, 5):
        assert mode_space_dimension(named_group("choreo21"), m, n) > 0


def oracle_coercive(G, masses, omega):
    """Positive definiteness of the kinetic form on a truncated equivariant
    basis (independent route: the basis comes from the averaging projector)."""
    from symorbit.loops import equivariant_basis, mode_index
    from math import pi

    N = 4
    basis = equivariant_basis(G, masses, N)
    if basis.shape[0] == 0:
        return True
    w = (mode_index(N) - float(omega)) ** 2
    m = masses.as_array()
    Q = np.zeros((basis.shape[0], basis.shape[0]))
    for a in range(basis.shape[0]):
        for b in range(a, basis.shape[0]):
            val = pi * float(np.sum(m[:, None] * w * (np.conj(basis[a]) * basis[b]).real))
            Q[a, b] = Q[b, a] = val
    return float(np.linalg.eigvalsh(Q)[0]) > 1e-9


@pytest.mark.parametrize("name", TABLE_NAMES)
def test_coercivity_grid_vs_oracle(name):
    G = named_group(name)
    for k in range(-12, 13):
        w = F(k, 6)
        assert is_coercive(G, UNIT_MASSES, w) == oracle_coercive(G, UNIT_MASSES, w), (name, w)


def test_coercive_examples():
    m = UNIT_MASSES
    assert is_coercive(named_group("trivial"), m, 0.5)
    assert not is_coercive(named_group("trivial"), m, 0)
    assert not is_coercive(named_group("choreo3"), m, 1)
    assert is_coercive(named_group("choreo3"), m, 0)


def test_every_noninteger_coercive():
    for name in TABLE_NAMES:
        G = named_group(name)
        for w in (F(1, 2), F(-7, 3), 0.123):
            assert is_coercive(G, UNIT_MASSES, w)


def test_degenerate_residues():
    L, bad = degenerate_residues(named_group("choreo3"), UNIT_MASSES)
    assert L == 3 and bad == (1, 2)
    L, bad = degenerate_residues(named_group("d12"), UNIT_MASSES)
    assert bad == ()


def test_bound_to_collisions():
    m = UNIT_MASSES
    assert is_bound_to_collisions(named_group("example_bound1"), m) == "proved"
    assert is_bound_to_collisions(named_group("example_bound2"), m) == "proved"
    assert is_bound_to_collisions(named_group("lagrange"), m) == "refuted"


def test_homographic():
    m = UNIT_MASSES
    core3 = generate_closure([element(rot(0), rot(F(1, 3)), "(123)")])
    assert is_homographic(core3, m)
    core2 = generate_closure([element(rot(0), rot(F(1, 2)), "(12)")])
    assert is_homographic(core2, m)
    assert not is_homographic(named_group("trivial"), m)


def test_rcp_column():
    expectations = {name: EXPECTED_TABLE[name][4] for name in TABLE_NAMES}
    for name, want in expectations.items():
        assert has_rcp(named_group(name)) == want, name


@pytest.mark.parametrize("name", TABLE_NAMES)
def test_classify_matches_table(name):
    rep = classify(named_group(name), UNIT_MASSES, name=name, fast=True)
    order, type_r, at, dec, rcp = EXPECTED_TABLE[name]
    assert rep.order == order
    assert rep.type_R == type_r
    assert rep.action_type == at
    assert rep.transitive_decomposition == dec
    assert rep.rcp == rcp
    assert not rep.fully_uncoercive
    assert not rep.redundant
    assert rep.core_order == 1
    assert rep.bound_to_collisions == "refuted"
    assert not rep.homographic


def test_classify_deterministic():
    a = classify(named_group("d12"), UNIT_MASSES, name="d12", fast=True)
    b = classify(named_group("d12"), UNIT_MASSES, name="d12", fast=True)
    assert a.to_record() == b.to_record()


def test_build_table_shape():
    table = build_table()
    assert len(table) == 10
    assert sum(1 for r in table if r.type_R) == 7
    decs = sorted(r.decomposition_string() for r in table)
    assert decs.count("1+1+1") == 2
    assert decs.count("2+1") == 3
    assert decs.count("3") == 5


def test_fully_uncoercive_example():
    # cyclic action, reflection on the plane, no permutation: neither
    # orientation-compatible nor coercive at zero
    G = generate_closure([element(rot(F(1, 2)), ref(0), "()")])
    rep = classify(G, UNIT_MASSES, fast=True)
    assert rep.fully_uncoercive


def order60_group():
    return generate_closure(
        [
            element(rot(F(1, 30)), rot(F(1, 10)), "(123)"),
            element(ref(0), ref(0), "(12)"),
        ]
    )


def cyclic10_group():
    return generate_closure([element(rot(F(1, 10)), rot(F(1, 5)), "(12)")])


def test_rotating_frame_reduce_order60():
    G = order60_group()
    assert G.order == 60
    red, w = rotating_frame_reduce(G, 0)
    assert red == named_group("lagrange")
    assert w == F(3, 10)


def test_rotating_frame_reduce_cyclic10():
    G = cyclic10_group()
    assert G.order == 10
    red, w = rotating_frame_reduce(G, 0)
    assert red == named_group("choreo21")
    assert w == F(2, 5)


def test_rotating_frame_unreduce_roundtrips():
    assert rotating_frame_unreduce(named_group("lagrange"), F(3, 10)) == order60_group()
    assert rotating_frame_unreduce(named_group("choreo21"), F(2, 5)) == cyclic10_group()


def test_reduce_already_reduced():
    for name in ("lagrange", "choreo21", "line", "trivial", "hill"):
        G = named_group(name)
        red, w = rotating_frame_reduce(G, F(1, 7))
        assert red == G and w == F(1, 7)


def test_reduce_requires_type_R():
    with pytest.raises(NotTypeR):
        rotating_frame_reduce(named_group("c6"), 0)


@pytest.mark.parametrize("maker", [order60_group, cyclic10_group])
def test_reduced_time_shifts_act_trivially(maker):
    red, _ = rotating_frame_reduce(maker(), 0)
    for g in red.elements:
        if g.tau.kind == "rot" and not g.tau.is_identity():
            assert g.rho.is_identity()


def test_classify_incompatible_masses():
    from symorbit.errors import IncompatibleMasses

    with pytest.raises(IncompatibleMasses):
        classify(named_group("choreo3"), Masses(1.0, 1.0, 2.0))
