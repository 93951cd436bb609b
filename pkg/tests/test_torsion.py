"""Torsion tensors of all levels, brackets of operator fields, the obstruction
tensor, and the commuting-triangular test-bed generator.

The strongest checks here recompute each tensor by a second, independent route
(direct evaluation on vector-field arguments) and require exact agreement with
the contraction-based implementation.
"""

from __future__ import annotations

import random
from fractions import Fraction

import pytest

from haantjes.geometry import OperatorField, Tensor12, VectorField, lie_bracket
from haantjes.polyring import Poly
from haantjes.torsion import (
    commuting_triangular_pair,
    fn_bracket,
    fn_bracket_level,
    nijenhuis,
    tensor_t,
    torsion_level,
    torsion_step,
)

from conftest import random_operator, random_poly


# ----- independent reference implementations ----------------------------------


def _nijenhuis_direct(L: OperatorField) -> Tensor12:
    """Torsion from its defining bracket identity, evaluated on basis fields:

    T(xi, eta) = L^2 [xi, eta] + [L xi, L eta] - L[L xi, eta] - L[xi, L eta].
    """
    n, nv = L.dim, L.nvars
    l2 = L.power(2)
    basis = [VectorField.basis(j + 1, n, nvars=nv) for j in range(n)]
    comps = [[[None] * n for _ in range(n)] for _ in range(n)]
    for j in range(n):
        for k in range(n):
            ej, ek = basis[j], basis[k]
            val = (
                l2.apply(lie_bracket(ej, ek))
                + lie_bracket(L.apply(ej), L.apply(ek))
                - L.apply(lie_bracket(L.apply(ej), ek))
                - L.apply(lie_bracket(ej, L.apply(ek)))
            )
            for i in range(n):
                comps[i][j][k] = val.components[i]
    return Tensor12(comps, nvars=nv)


def _level_step_direct(T: Tensor12, L: OperatorField) -> Tensor12:
    """One level of the recursion with the previous tensor applied to fields:

    T'(xi, eta) = L^2 T(xi, eta) + T(L xi, L eta) - L T(L xi, eta) - L T(xi, L eta).
    """
    n, nv = L.dim, L.nvars
    l2 = L.power(2)
    basis = [VectorField.basis(j + 1, n, nvars=nv) for j in range(n)]
    comps = [[[None] * n for _ in range(n)] for _ in range(n)]
    for j in range(n):
        for k in range(n):
            ej, ek = basis[j], basis[k]
            lej, lek = L.apply(ej), L.apply(ek)
            val = (
                l2.apply(T.apply(ej, ek))
                + T.apply(lej, lek)
                - L.apply(T.apply(lej, ek))
                - L.apply(T.apply(ej, lek))
            )
            for i in range(n):
                comps[i][j][k] = val.components[i]
    return Tensor12(comps, nvars=nv)


def _tensor_t_direct(L: OperatorField) -> Tensor12:
    """Obstruction tensor from its definition on vector-field arguments:

    T(xi, eta) = M H(M xi, eta) - M H(xi, M eta) + H(M^2 xi, eta),
    with M the traceless part of L and H the level-2 torsion.
    """
    n, nv = L.dim, L.nvars
    m = L.traceless_part()
    h = torsion_level(L, 2)
    m2 = m.power(2)
    basis = [VectorField.basis(j + 1, n, nvars=nv) for j in range(n)]
    comps = [[[None] * n for _ in range(n)] for _ in range(n)]
    for j in range(n):
        for k in range(n):
            ej, ek = basis[j], basis[k]
            val = (
                m.apply(h.apply(m.apply(ej), ek))
                - m.apply(h.apply(ej, m.apply(ek)))
                + h.apply(m2.apply(ej), ek)
            )
            for i in range(n):
                comps[i][j][k] = val.components[i]
    return Tensor12(comps, nvars=nv)


# ----- level-1 torsion ---------------------------------------------------------


def test_torsion_of_identity_vanishes():
    assert nijenhuis(OperatorField.identity(3)).is_zero


def test_torsion_of_constant_operator_vanishes():
    c = OperatorField.from_strings([["2", "1", "0"], ["0", "3", "1"], ["0", "0", "5"]])
    assert nijenhuis(c).is_zero


def test_torsion_matches_direct_bracket_evaluation():
    rng = random.Random(41)
    for n in (2, 3, 4):
        L = random_operator(rng, n, max_degree=2)
        assert nijenhuis(L) == _nijenhuis_direct(L)


def test_torsion_is_antisymmetric():
    rng = random.Random(43)
    L = random_operator(rng, 3)
    t = nijenhuis(L)
    for i in range(1, 4):
        for j in range(1, 4):
            for k in range(1, 4):
                assert t.component(i, j, k) == -t.component(i, k, j)


def test_torsion_scales_quadratically():
    rng = random.Random(45)
    L = random_operator(rng, 3, max_degree=1)
    c = Fraction(3)
    assert nijenhuis(c * L) == Fraction(9) * nijenhuis(L)


def test_level_one_equals_nijenhuis():
    rng = random.Random(47)
    L = random_operator(rng, 3, max_degree=1)
    assert torsion_level(L, 1) == nijenhuis(L)


def test_torsion_level_requires_positive_level():
    with pytest.raises(ValueError):
        torsion_level(OperatorField.identity(2), 0)


# ----- the level recursion -------------------------------------------------------


def test_level_recursion_matches_direct_evaluation():
    rng = random.Random(49)
    for n in (2, 3, 4):
        L = random_operator(rng, n, max_degree=2)
        t1 = nijenhuis(L)
        assert torsion_step(t1, L) == _level_step_direct(t1, L)


def test_higher_levels_iterate_the_step():
    rng = random.Random(51)
    L = random_operator(rng, 3, max_degree=1)
    t2 = torsion_level(L, 2)
    assert torsion_level(L, 3) == torsion_step(t2, L)


def test_level_two_is_antisymmetric():
    rng = random.Random(53)
    L = random_operator(rng, 3)
    h = torsion_level(L, 2)
    for i in range(1, 4):
        for j in range(1, 4):
            for k in range(1, 4):
                assert h.component(i, j, k) == -h.component(i, k, j)


def test_eigenvalue_shift_leaves_level_two_invariant():
    rng = random.Random(55)
    for n in (3, 4):
        L = random_operator(rng, n, max_degree=1)
        f = random_poly(rng, n, 2)
        shifted = L + f * OperatorField.identity(n, nvars=n)
        assert torsion_level(shifted, 2) == torsion_level(L, 2)


# ----- bracket of two operator fields --------------------------------------------


def test_bracket_of_equal_arguments_is_twice_the_torsion():
    rng = random.Random(57)
    for n in (2, 3):
        L = random_operator(rng, n)
        assert fn_bracket(L, L) == Fraction(2) * nijenhuis(L)


def test_bracket_is_symmetric_in_its_arguments():
    rng = random.Random(59)
    K = random_operator(rng, 3, max_degree=1)
    L = random_operator(rng, 3, max_degree=1)
    assert fn_bracket(K, L) == fn_bracket(L, K)


def test_bracket_is_additive_in_each_argument():
    rng = random.Random(61)
    K = random_operator(rng, 3, max_degree=1)
    K2 = random_operator(rng, 3, max_degree=1)
    L = random_operator(rng, 3, max_degree=1)
    assert fn_bracket(K + K2, L) == fn_bracket(K, L) + fn_bracket(K2, L)


def test_bracket_levels_collapse_to_torsion_levels_on_the_diagonal():
    rng = random.Random(63)
    L = random_operator(rng, 3, max_degree=1)
    for m in (1, 2, 3):
        assert fn_bracket_level(L, L, m) == Fraction(2 ** m) * torsion_level(L, m)


def test_bracket_level_requires_matching_dimensions():
    rng = random.Random(65)
    with pytest.raises(ValueError):
        fn_bracket(random_operator(rng, 2), random_operator(rng, 3))


# ----- obstruction tensor ---------------------------------------------------------


def test_obstruction_tensor_matches_direct_evaluation():
    rng = random.Random(67)
    for _ in range(3):
        L = random_operator(rng, 4, max_degree=2)
        assert tensor_t(L) == _tensor_t_direct(L)


def test_obstruction_tensor_is_shift_invariant():
    rng = random.Random(69)
    L = random_operator(rng, 4, max_degree=1)
    f = random_poly(rng, 4, 2)
    shifted = L + f * OperatorField.identity(4, nvars=4)
    assert tensor_t(shifted) == tensor_t(L)


def test_obstruction_tensor_rejects_other_dimensions_without_force():
    rng = random.Random(71)
    L = random_operator(rng, 3)
    with pytest.raises(ValueError, match="dimension 4"):
        tensor_t(L)
    assert tensor_t(L, force=True) == _tensor_t_direct(L)


# ----- commuting triangular pairs -------------------------------------------------


def test_commuting_pair_commutes_exactly():
    for n in (3, 4, 5):
        K, L = commuting_triangular_pair(n, seed=12)
        assert K @ L == L @ K


def test_commuting_pair_is_strictly_upper_triangular():
    K, L = commuting_triangular_pair(4, seed=3)
    for M in (K, L):
        for i in range(1, 5):
            for j in range(1, i + 1):
                assert M.entry(i, j).is_zero


def test_commuting_pair_respects_the_degree_bound():
    for seed in range(5):
        K, L = commuting_triangular_pair(4, seed=seed, degree=2)
        for M in (K, L):
            for i in range(1, 5):
                for j in range(1, 5):
                    assert M.entry(i, j).total_degree <= 2


def test_commuting_pair_is_reproducible_and_seed_sensitive():
    a = commuting_triangular_pair(3, seed=8)
    b = commuting_triangular_pair(3, seed=8)
    c = commuting_triangular_pair(3, seed=9)
    assert a[0] == b[0] and a[1] == b[1]
    assert a[0] != c[0] or a[1] != c[1]
