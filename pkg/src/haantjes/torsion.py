"""Nijenhuis and higher Haantjes torsions, Froelicher-Nijenhuis brackets.

For an operator field L the Nijenhuis torsion is the (1,2)-tensor

    T_L(xi, eta) = L^2 [xi, eta] + [L xi, L eta] - L [L xi, eta] - L [xi, L eta],

and the level-m torsion is defined recursively by applying the same
four-term scheme to the previous level, with every bracket replaced by the
stored tensor:

    T^(m)(xi, eta) = L^2 T^(m-1)(xi, eta) + T^(m-1)(L xi, L eta)
                     - L T^(m-1)(L xi, eta) - L T^(m-1)(xi, L eta).

Level 1 is the Nijenhuis torsion, level 2 the classical Haantjes torsion.
Only level 1 differentiates anything; all higher levels are pure
contractions of the previous level with L, which is what torsion_step
implements.  The Froelicher-Nijenhuis bracket of two operator fields and
its levels follow the same pattern with an eight-term scheme.
"""

from __future__ import annotations

import random

from .geometry import (
    OperatorField,
    Tensor12,
    VectorField,
    contract_lower_j,
    contract_lower_k,
    contract_upper,
    lie_bracket,
)
from .polyring import Poly


def nijenhuis(L: OperatorField) -> Tensor12:
    """The Nijenhuis torsion of L, evaluated on the coordinate fields.

    Component (j, k) is T_L(d/dx_j, d/dx_k); since coordinate fields
    commute, the L^2 [xi, eta] term drops out.
    """
    n, nv = L.dim, L.nvars
    columns = [L.column(j + 1) for j in range(n)]
    basis = [VectorField.basis(j + 1, n, nvars=nv) for j in range(n)]
    comps = [[[None] * n for _ in range(n)] for _ in range(n)]
    for j in range(n):
        for k in range(n):
            value = (
                lie_bracket(columns[j], columns[k])
                - L.apply(lie_bracket(columns[j], basis[k]))
                - L.apply(lie_bracket(basis[j], columns[k]))
            )
            for i in range(n):
                comps[i][j][k] = value.components[i]
    return Tensor12(comps, nvars=nv)


def torsion_step(T: Tensor12, L: OperatorField) -> Tensor12:
    """One level of the torsion recursion, as slotwise contractions with L.

    Given the components of the previous level, T(L xi, eta) is the lower-j
    contraction, T(xi, L eta) the lower-k contraction, and the outer L's act
    on the upper slot; no derivatives of L enter at this stage.
    """
    if T.dim != L.dim or T.nvars != L.nvars:
        raise ValueError("tensor and operator live on different spaces")
    jT = contract_lower_j(T, L)
    kT = contract_lower_k(T, L)
    LT = contract_upper(L, T)
    return (
        contract_upper(L, LT)
        + contract_lower_k(jT, L)
        - contract_upper(L, jT)
        - contract_upper(L, kT)
    )


def torsion_level(L: OperatorField, level: int) -> Tensor12:
    """The level-m torsion of L: level 1 is Nijenhuis, level 2 Haantjes."""
    if not isinstance(level, int) or level < 1:
        raise ValueError(f"level must be a positive integer, got {level!r}")
    T = nijenhuis(L)
    for _ in range(level - 1):
        T = torsion_step(T, L)
    return T


def fn_bracket(K: OperatorField, L: OperatorField) -> Tensor12:
    """The Froelicher-Nijenhuis bracket [[K, L]] of two operator fields.

    On vector fields:

        [[K, L]](xi, eta) = [K xi, L eta] + [L xi, K eta]
                            + (K L + L K) [xi, eta]
                            - K([L xi, eta] + [xi, L eta])
                            - L([K xi, eta] + [xi, K eta]).

    [[L, L]] is twice the Nijenhuis torsion of L.
    """
    K._check_compatible(L)
    n, nv = K.dim, K.nvars
    k_cols = [K.column(j + 1) for j in range(n)]
    l_cols = [L.column(j + 1) for j in range(n)]
    basis = [VectorField.basis(j + 1, n, nvars=nv) for j in range(n)]
    comps = [[[None] * n for _ in range(n)] for _ in range(n)]
    for j in range(n):
        for k in range(n):
            value = (
                lie_bracket(k_cols[j], l_cols[k])
                + lie_bracket(l_cols[j], k_cols[k])
                - K.apply(lie_bracket(l_cols[j], basis[k]) + lie_bracket(basis[j], l_cols[k]))
                - L.apply(lie_bracket(k_cols[j], basis[k]) + lie_bracket(basis[j], k_cols[k]))
            )
            for i in range(n):
                comps[i][j][k] = value.components[i]
    return Tensor12(comps, nvars=nv)


def fn_bracket_step(T: Tensor12, K: OperatorField, L: OperatorField) -> Tensor12:
    """One level of the bracket recursion: the eight-term contraction scheme

        T'(xi, eta) = K L T(xi, eta) + T(K xi, L eta)
                      - L T(K xi, eta) - K T(xi, L eta)
                      + L K T(xi, eta) + T(L xi, K eta)
                      - K T(L xi, eta) - L T(xi, K eta).

    With K = L it collapses to twice the torsion step.
    """
    if T.dim != K.dim or T.nvars != K.nvars:
        raise ValueError("tensor and operator live on different spaces")
    K._check_compatible(L)
    jK = contract_lower_j(T, K)
    jL = contract_lower_j(T, L)
    kK = contract_lower_k(T, K)
    kL = contract_lower_k(T, L)
    KT = contract_upper(K, T)
    LT = contract_upper(L, T)
    return (
        contract_upper(K, LT)
        + contract_lower_k(jK, L)
        - contract_upper(L, jK)
        - contract_upper(K, kL)
        + contract_upper(L, KT)
        + contract_lower_k(jL, K)
        - contract_upper(K, jL)
        - contract_upper(L, kK)
    )


def fn_bracket_level(K: OperatorField, L: OperatorField, level: int) -> Tensor12:
    """The level-m bracket: level 1 is [[K, L]], higher levels iterate the
    eight-term scheme.  For K = L, level m equals 2^m times the level-m
    torsion of L."""
    if not isinstance(level, int) or level < 1:
        raise ValueError(f"level must be a positive integer, got {level!r}")
    T = fn_bracket(K, L)
    for _ in range(level - 1):
        T = fn_bracket_step(T, K, L)
    return T


def tensor_t(L: OperatorField, force: bool = False) -> Tensor12:
    """The obstruction tensor built from the Haantjes torsion of L.

    With M = L - (trace(L)/dim) Id the traceless part and H the Haantjes
    torsion,

        T^i_{jk} = M^i_s H^s_{rk} M^r_j - M^i_s H^s_{jr} M^r_k
                   + H^i_{sk} M^s_r M^r_j.

    Its vanishing characterizes triangularizability for regular operator
    fields in dimension four, which is why other dimensions are rejected
    unless ``force=True`` (the trace/dim normalization then makes the same
    contraction well defined, but no equivalence is claimed).
    """
    if L.dim != 4 and not force:
        raise ValueError(
            f"tensor_t targets dimension 4, got dim={L.dim}; "
            "pass force=True to evaluate the same contraction anyway"
        )
    M = L.traceless_part()
    H = torsion_level(L, 2)
    MH = contract_upper(M, H)
    return (
        contract_lower_j(MH, M)
        - contract_lower_k(MH, M)
        + contract_lower_j(H, M.compose(M))
    )


# ----- random commuting pairs for the bracket test-bed -----------------------


def _random_poly(rng: random.Random, nvars: int, degree: int, nonzero: bool = True) -> Poly:
    """A small random polynomial with integer coefficients in [-4, 4]."""
    while True:
        terms = {}
        for _ in range(rng.randint(1, 3)):
            d = rng.randint(0, degree)
            exps = [0] * nvars
            for _ in range(d):
                exps[rng.randrange(nvars)] += 1
            mono = tuple((v + 1, e) for v, e in enumerate(exps) if e)
            coeff = rng.choice([-4, -3, -2, -1, 1, 2, 3, 4])
            terms[mono] = terms.get(mono, 0) + coeff
        p = Poly(nvars, terms)
        if not (nonzero and p.is_zero):
            return p


def commuting_triangular_pair(
    n: int, seed: int, degree: int = 2
) -> tuple[OperatorField, OperatorField]:
    """A deterministic pair of commuting strictly upper triangular fields.

    Both operators are polynomial series p_1 N + p_2 N^2 + ... in one shared
    strictly upper triangular nilpotent N with scalar polynomial
    coefficients, so they commute pointwise by construction and every entry
    has total degree at most ``degree``.
    """
    if not isinstance(n, int) or n < 2:
        raise ValueError(f"dimension must be an integer >= 2, got {n!r}")
    if not isinstance(degree, int) or degree < 0:
        raise ValueError(f"degree must be a non-negative integer, got {degree!r}")
    rng = random.Random(seed)
    entry_degree = 1 if degree >= 1 else 0
    rows = [[Poly.zero(n)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            rows[i][j] = _random_poly(rng, n, entry_degree)
    N = OperatorField(rows, nvars=n)

    def series() -> OperatorField:
        # The (1,2)-entry is p_1 * N[1][2] with both factors nonzero, so the
        # result is never the zero operator.
        total = OperatorField.zero(n, n)
        power = OperatorField.identity(n, n)
        for i in range(1, n):
            power = power.compose(N)
            coeff_degree = degree - i * entry_degree
            if coeff_degree < 0:
                break
            total = total + power * _random_poly(rng, n, coeff_degree)
        return total

    return series(), series()
