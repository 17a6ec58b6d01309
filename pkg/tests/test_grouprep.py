"""Group construction and module operations against enumeration oracles."""

import itertools

import numpy as np
import pytest

from treelab.exactalg import RingSpec, howell_array
from treelab.grouprep import (
    IDENT,
    build_group,
    coinvariants,
    composition_length,
    decompose_jbar,
    direct_sum,
    elem_inv,
    elem_mul,
    generated_submodule,
    h1_procyclic,
    induce_cyclic,
    invariants,
    is_irreducible,
    jbar,
    quotient_gmodule,
    submodule_gmodule,
    trivial_module,
)


def enumerate_group_order(kind, p):
    """Independent oracle: count 2x2 matrices with the right determinant."""
    count = 0
    for m in itertools.product(range(p), repeat=4):
        det = (m[0] * m[3] - m[1] * m[2]) % p
        if (kind == "sl2" and det == 1) or (kind == "gl2" and det != 0):
            count += 1
    return count


@pytest.mark.parametrize(
    "kind,p,expected",
    [("sl2", 2, 6), ("sl2", 3, 24), ("gl2", 3, 48), ("sl2", 5, 120), ("sl2", 7, 336)],
)
def test_group_orders(kind, p, expected):
    assert enumerate_group_order(kind, p) == expected
    grp = build_group(kind, p)
    assert grp.order == expected


@pytest.mark.parametrize("kind,p", [("sl2", 3), ("gl2", 3), ("sl2", 5)])
def test_group_structure(kind, p):
    grp = build_group(kind, p)
    assert len(grp.upper_unipotent) == p
    assert len(grp.opp_radicals) == p
    conj = frozenset(
        elem_mul(elem_mul(grp.weyl, x, p), elem_inv(grp.weyl, p), p) for x in grp.lower_unipotent
    )
    assert conj == frozenset(grp.upper_unipotent)
    # every opposite radical is a unipotent-conjugate of the lower one
    for rad in grp.opp_radicals:
        assert len(rad) == p
        assert rad != frozenset(grp.upper_unipotent)


@pytest.mark.parametrize(
    "kind,p,rank", [("sl2", 3, 8), ("sl2", 2, 3), ("gl2", 3, 16), ("sl2", 5, 24)]
)
def test_jbar_rank(kind, p, rank):
    grp = build_group(kind, p)
    J = jbar(grp, RingSpec(p, 1))
    assert J.rank == grp.order // p == rank
    assert "base_coset" in J.marked


@pytest.mark.parametrize("kind,p", [("sl2", 2), ("sl2", 3), ("gl2", 3), ("sl2", 5)])
def test_action_law_random_triples(kind, p):
    grp = build_group(kind, p)
    J = jbar(grp, RingSpec(p, 1))
    rng = np.random.default_rng(42)
    for _ in range(100):
        g = grp.elements[int(rng.integers(0, grp.order))]
        h = grp.elements[int(rng.integers(0, grp.order))]
        lhs = (J.action(g) @ J.action(h)) % p
        assert np.array_equal(lhs, J.action(grp.mul(g, h)))
    assert np.array_equal(J.action(IDENT), np.eye(J.rank, dtype=np.int64))


def test_invariants_jbar_sl2_3_by_enumeration():
    # oracle: count all 3^8 vectors fixed by the unipotent generator action
    grp = build_group("sl2", 3)
    J = jbar(grp, RingSpec(3, 1))
    A = J.action(grp.upper_gen)
    vs = np.array(list(itertools.product(range(3), repeat=8)), dtype=np.int64)
    fixed = int((((vs @ A) % 3) == vs).all(axis=1).sum())
    assert fixed == 3**4
    inv = invariants(J, [grp.upper_gen])
    assert inv.nrows == 4


def test_invariants_full_group_is_constants():
    grp = build_group("sl2", 3)
    J = jbar(grp, RingSpec(3, 1))
    inv = invariants(J, grp.gens)
    assert inv.nrows == 1
    # the line of constant functions
    assert inv.contains(np.ones(J.rank, dtype=np.int64))


def test_invariants_trivial_module_is_everything():
    grp = build_group("sl2", 3)
    triv = trivial_module(grp, RingSpec(3, 2))
    inv = invariants(triv, [grp.upper_gen])
    assert inv.span_log_size() == 2


@pytest.mark.parametrize("kind,p", [("sl2", 2), ("sl2", 3), ("sl2", 5), ("gl2", 3)])
def test_invariants_conjugate_subgroups_same_dim(kind, p):
    grp = build_group(kind, p)
    J = jbar(grp, RingSpec(p, 1))
    assert invariants(J, [grp.upper_gen]).nrows == invariants(J, [grp.lower_gen]).nrows


def test_coinvariants_regular_module():
    # oracle: the image of (shift - 1) on the length-3 cyclic shift has 9
    # elements, so the cokernel is one-dimensional
    ring = RingSpec(3, 1)
    shift = np.zeros((3, 3), dtype=np.int64)
    for i in range(3):
        shift[i, (i + 1) % 3] = 1
    eye = np.eye(3, dtype=np.int64)
    images = {
        tuple(int(x) for x in (v @ (shift - eye)) % 3)
        for v in itertools.product(range(3), repeat=3)
    }
    assert len(images) == 9
    h1 = h1_procyclic(ring, shift, 3)
    assert h1.dim == 1


def test_coinvariants_trivial_action():
    grp = build_group("sl2", 3)
    triv = trivial_module(grp, RingSpec(3, 1))
    co = coinvariants(triv, [grp.upper_gen])
    assert co.dim == 1


def test_coinvariants_equal_invariants_for_jbar():
    grp = build_group("sl2", 3)
    J = jbar(grp, RingSpec(3, 1))
    co = coinvariants(J, [grp.upper_gen])
    assert co.dim == 4 == invariants(J, [grp.upper_gen]).nrows


def test_generated_by_phi_is_everything():
    grp = build_group("sl2", 3)
    J = jbar(grp, RingSpec(3, 1))
    assert generated_submodule(J, J.marked["base_coset"]).nrows == J.rank


def test_generated_by_zero_is_zero():
    grp = build_group("sl2", 3)
    J = jbar(grp, RingSpec(3, 1))
    assert generated_submodule(J, np.zeros(J.rank, dtype=np.int64)).nrows == 0


@pytest.mark.parametrize("p", [2, 3, 5])
def test_lower_invariants_generate_under_upper_subgroup_alone(p):
    grp = build_group("sl2", p)
    J = jbar(grp, RingSpec(p, 1))
    inv = invariants(J, [grp.lower_gen])
    span = generated_submodule(J, inv.mat, [grp.upper_gen])
    assert span.nrows == J.rank


def test_h1_identity_operator():
    ring = RingSpec(3, 2)
    h1 = h1_procyclic(ring, np.eye(2, dtype=np.int64), 3)
    assert h1.log_size() == 4  # the whole module survives


def test_h1_rejects_bad_operator():
    ring = RingSpec(3, 1)
    with pytest.raises(ValueError):
        h1_procyclic(ring, np.array([[2]]), 3)  # order 2, not a p-power


def test_h1_kernel_cokernel_balance_field_case():
    ring = RingSpec(3, 1)
    grp = build_group("sl2", 3)
    J = jbar(grp, ring)
    for u in (1, 2):
        op = np.linalg.matrix_power(J.action(grp.upper_gen), u) % 3
        h1 = h1_procyclic(ring, op, 3)
        ker = 8 - howell_array(ring, (op - np.eye(8, dtype=np.int64)) % 3).nrows
        assert h1.dim == ker


def test_h1_shapiro_for_induced_modules():
    grp = build_group("sl2", 3)
    ring = RingSpec(3, 1)
    J = jbar(grp, ring)
    c = J.action(grp.upper_gen)
    direct = h1_procyclic(ring, c, 3)
    for m, depth in [(0, 2), (1, 3), (2, 4)]:
        ind = induce_cyclic(ring, c, m, depth, 3)
        assert ind.rank == 3**m * J.rank
        assert h1_procyclic(ring, ind.gen, 3).dim == direct.dim


def test_induce_cyclic_level_zero_is_module_itself():
    ring = RingSpec(3, 1)
    op = np.array([[0, 1, 0], [0, 0, 1], [1, 0, 0]], dtype=np.int64)
    ind = induce_cyclic(ring, op, 0, 3, 3)
    assert np.array_equal(ind.gen, op)


def test_induce_cyclic_trivial_module_gives_regular_representation():
    ring = RingSpec(3, 1)
    ind = induce_cyclic(ring, np.eye(1, dtype=np.int64), 1, 2, 3)
    expect = np.zeros((3, 3), dtype=np.int64)
    for i in range(3):
        expect[i, (i + 1) % 3] = 1
    assert np.array_equal(ind.gen, expect)


def test_induce_cyclic_rejects_level_above_depth():
    ring = RingSpec(3, 1)
    with pytest.raises(ValueError):
        induce_cyclic(ring, np.eye(1, dtype=np.int64), 3, 2, 3)


def test_induced_power_acts_as_designated_operator():
    grp = build_group("sl2", 5)
    ring = RingSpec(5, 1)
    J = jbar(grp, ring)
    c = J.action(grp.upper_gen)
    ind = induce_cyclic(ring, c, 1, 2, 5)
    power = np.linalg.matrix_power(ind.gen, 5) % 5
    assert np.array_equal(power[: J.rank, : J.rank], c)


@pytest.mark.parametrize(
    "p,count,dim", [(2, 1, 3), (3, 2, 4), (5, 4, 6), (7, 6, 8)]
)
def test_decompose_jbar_summands(p, count, dim):
    grp = build_group("sl2", p)
    summands = decompose_jbar(grp, RingSpec(p, 1))
    assert len(summands) == count
    assert all(s.rank == dim for s in summands)
    assert sum(s.rank for s in summands) == grp.order // p


def test_decompose_requires_sl2_and_field():
    with pytest.raises(ValueError):
        decompose_jbar(build_group("gl2", 3), RingSpec(3, 1))
    with pytest.raises(ValueError):
        decompose_jbar(build_group("sl2", 3), RingSpec(3, 2))


@pytest.mark.parametrize("p", [2, 3, 5])
def test_principal_series_length_two(p):
    grp = build_group("sl2", p)
    for s in decompose_jbar(grp, RingSpec(p, 1)):
        assert composition_length(s) == 2
        assert invariants(s, [grp.upper_gen]).nrows == 2
        assert not is_irreducible(s)


def test_trivial_module_length_one():
    grp = build_group("sl2", 3)
    triv = trivial_module(grp, RingSpec(3, 1))
    assert composition_length(triv) == 1
    assert is_irreducible(triv)


def test_jbar_sl2_3_total_length_four():
    grp = build_group("sl2", 3)
    J = jbar(grp, RingSpec(3, 1))
    assert composition_length(J) == 4


def test_composition_length_choice_independent():
    grp = build_group("sl2", 3)
    J = jbar(grp, RingSpec(3, 1))
    lengths = {composition_length(J, perm_seed=s) for s in range(5)}
    assert lengths == {4}


def test_submodule_quotient_coordinates_consistent():
    grp = build_group("sl2", 3)
    ring = RingSpec(3, 1)
    J = jbar(grp, ring)
    inv = invariants(J, [grp.lower_gen])
    sub_span = generated_submodule(J, inv.mat[:1])
    sub = submodule_gmodule(J, sub_span)
    quo = quotient_gmodule(J, sub_span)
    assert sub.rank + quo.rank == J.rank
    sub.verify_action(samples=30)
    quo.verify_action(samples=30)


def test_direct_sum_block_action():
    grp = build_group("sl2", 3)
    ring = RingSpec(3, 1)
    J = jbar(grp, ring)
    D = direct_sum([J, J])
    assert D.rank == 16
    g = grp.upper_gen
    assert np.array_equal(D.action(g)[:8, :8], J.action(g))
    assert np.array_equal(D.action(g)[8:, 8:], J.action(g))
    assert not D.action(g)[:8, 8:].any()
