"""First-order models of regular operator fields and the tensor search.

Around a regular point, an operator field with nilpotent Jordan-block
leading term can be written to first order as

    L(x) = J + J A(x) - A(x) J + O(|x|^2),

where J is the single nilpotent Jordan block and A(x)^i_j = sum_k a^i_{j;k} x_k
collects the unknown first-order coefficients; an optional scalar eigenvalue
part lam(x) = sum_k lam_k x_k enters on the diagonal.  Torsion tensors of
this family, evaluated at x = 0, are linear forms in the unknowns, so each
choice of tensor yields an exact linear system over Q whose row space can
be compared with the integrability conditions

    a^k_{i;j} - a^k_{j;i} = 0   for all  1 <= i < j < k <= n

of the flag of coordinate distributions.  ``search_tensor`` looks for
rational combinations of candidate tensors whose system is equivalent to
those conditions.

Variable layout inside the polynomial ring: variables 1..n are the
coordinates x1..xn, variable n + (i-1) n^2 + (j-1) n + k is the coefficient
a^i_{j;k}, and with the eigenvalue part enabled variable n + n^3 + k is
lam_k.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence, Union

from .geometry import (
    OperatorField,
    Tensor12,
    contract_lower_j,
    contract_lower_k,
    contract_upper,
)
from .polyring import Poly, RationalMatrix
from .torsion import nijenhuis, torsion_level, torsion_step

Rational = Union[int, Fraction]


def _param_var(n: int, i: int, j: int, k: int) -> int:
    """Polynomial variable index (1-based) of the coefficient a^i_{j;k}."""
    for name, index in (("i", i), ("j", j), ("k", k)):
        if not (1 <= index <= n):
            raise ValueError(f"index {name}={index} out of range 1..{n}")
    return n + (i - 1) * n * n + (j - 1) * n + k


def _coefficient_name(n: int, column: int) -> str:
    """The unknown behind a 0-based system column."""
    if column < n ** 3:
        i, rest = divmod(column, n * n)
        j, k = divmod(rest, n)
        return f"a^{i + 1}_{{{j + 1};{k + 1}}}"
    return f"lam_{column - n ** 3 + 1}"


@dataclass(frozen=True)
class ParamOperator:
    """The first-order family J + J A(x) - A(x) J (+ lam(x) Id)."""

    operator: OperatorField
    dim: int
    include_eigenvalue: bool

    @property
    def unknown_count(self) -> int:
        n = self.dim
        return n ** 3 + (n if self.include_eigenvalue else 0)

    def coefficient_index(self, i: int, j: int, k: int) -> int:
        """The polynomial variable carrying a^i_{j;k}."""
        return _param_var(self.dim, i, j, k)

    def eigenvalue_index(self, k: int) -> int:
        """The polynomial variable carrying lam_k."""
        if not self.include_eigenvalue:
            raise ValueError("this family was built without eigenvalue terms")
        if not (1 <= k <= self.dim):
            raise ValueError(f"index k={k} out of range 1..{self.dim}")
        return self.dim + self.dim ** 3 + k

    def specialize(
        self,
        coefficients: Mapping[tuple[int, int, int], Rational],
        eigenvalue: Mapping[int, Rational] | None = None,
    ) -> OperatorField:
        """Substitute numbers for all unknowns (unset ones become 0).

        The result is an honest operator field on Q^dim again.
        """
        values = {
            var: Fraction(0)
            for var in range(self.dim + 1, self.operator.nvars + 1)
        }
        for (i, j, k), value in coefficients.items():
            values[self.coefficient_index(i, j, k)] = Fraction(value)
        for k, value in (eigenvalue or {}).items():
            values[self.eigenvalue_index(k)] = Fraction(value)
        plain = self.operator.set_vars(values)
        return OperatorField(
            [[e.with_nvars(self.dim) for e in row] for row in plain.entries],
            nvars=self.dim,
        )


def build_linearized(n: int, include_eigenvalue: bool = False) -> ParamOperator:
    """The linearized family in dimension n, with symbolic coefficients."""
    if not isinstance(n, int) or n < 2:
        raise ValueError(f"dimension must be an integer >= 2, got {n!r}")
    nvars = n + n ** 3 + (n if include_eigenvalue else 0)
    J = OperatorField.jordan_block(n, nvars=nvars)
    A = OperatorField(
        [
            [
                Poly(
                    nvars,
                    {
                        ((k, 1), (_param_var(n, i, j, k), 1)): 1
                        for k in range(1, n + 1)
                    },
                )
                for j in range(1, n + 1)
            ]
            for i in range(1, n + 1)
        ],
        nvars=nvars,
    )
    L = J + J.compose(A) - A.compose(J)
    if include_eigenvalue:
        lam = Poly(
            nvars,
            {((k, 1), (n + n ** 3 + k, 1)): 1 for k in range(1, n + 1)},
        )
        L = L + lam * OperatorField.identity(n, nvars=nvars)
    return ParamOperator(operator=L, dim=n, include_eigenvalue=include_eigenvalue)


# ----- linear systems over the unknown coefficients ---------------------------


@dataclass(frozen=True)
class LinearSystemQ:
    """A homogeneous linear system in the coefficients a^i_{j;k} (and lam_k).

    Columns are ordered lexicographically in (i, j, k), with the lam block
    appended; ``labels`` names the source of each row.
    """

    matrix: RationalMatrix
    labels: tuple[str, ...]
    dim: int
    include_eigenvalue: bool

    def __post_init__(self):
        expected = self.dim ** 3 + (self.dim if self.include_eigenvalue else 0)
        if self.matrix.nrows != len(self.labels):
            raise ValueError("one label per row is required")
        if self.matrix.nrows and self.matrix.ncols != expected:
            raise ValueError(
                f"system has {self.matrix.ncols} columns, expected {expected}"
            )

    @property
    def rank(self) -> int:
        return self.matrix.rank

    @property
    def unknowns(self) -> tuple[str, ...]:
        count = self.dim ** 3 + (self.dim if self.include_eigenvalue else 0)
        return tuple(_coefficient_name(self.dim, c) for c in range(count))

    def _check_comparable(self, other: "LinearSystemQ") -> None:
        if self.dim != other.dim or self.include_eigenvalue != other.include_eigenvalue:
            raise ValueError("systems are over different unknowns")

    def rowspace_equal(self, other: "LinearSystemQ") -> bool:
        self._check_comparable(other)
        return self.matrix.rowspace_equal(other.matrix)

    def rowspace_contains(self, other: "LinearSystemQ") -> bool:
        self._check_comparable(other)
        return self.matrix.rowspace_contains(other.matrix)

    def equation_strings(self) -> list[str]:
        """Human-readable equations, one per row, zeros omitted."""
        names = self.unknowns
        lines = []
        for label, row in zip(self.labels, self.matrix.rows):
            chunks = []
            for name, coeff in zip(names, row):
                if not coeff:
                    continue
                mag = -coeff if coeff < 0 else coeff
                body = name if mag == 1 else f"{mag}*{name}"
                if not chunks:
                    chunks.append(f"-{body}" if coeff < 0 else body)
                else:
                    chunks.append(f" - {body}" if coeff < 0 else f" + {body}")
            lhs = "".join(chunks) if chunks else "0"
            lines.append(f"{label}: {lhs} = 0")
        return lines

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "include_eigenvalue": self.include_eigenvalue,
            "rank": self.rank,
            "rows": [
                {
                    "label": label,
                    "coefficients": {
                        name: str(c)
                        for name, c in zip(self.unknowns, row)
                        if c
                    },
                }
                for label, row in zip(self.labels, self.matrix.rows)
            ],
        }


def cond3_system(n: int) -> LinearSystemQ:
    """The integrability conditions a^k_{i;j} = a^k_{j;i} for i < j < k.

    These express that all coordinate distributions <d/dx1, ..., d/dxm> stay
    involutive under the linearized family; there are C(n, 3) of them.
    """
    if not isinstance(n, int) or n < 2:
        raise ValueError(f"dimension must be an integer >= 2, got {n!r}")
    rows, labels = [], []
    width = n ** 3
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            for k in range(j + 1, n + 1):
                row = [Fraction(0)] * width
                row[_param_var(n, k, i, j) - n - 1] = Fraction(1)
                row[_param_var(n, k, j, i) - n - 1] = Fraction(-1)
                rows.append(row)
                labels.append(f"a^{k}_{{{i};{j}}} - a^{k}_{{{j};{i}}}")
    return LinearSystemQ(
        matrix=RationalMatrix(rows),
        labels=tuple(labels),
        dim=n,
        include_eigenvalue=False,
    )


def extract_system(S: Tensor12, include_zero_rows: bool = False) -> LinearSystemQ:
    """The linear system { S^i_{jk}(0) = 0 } in the unknown coefficients.

    ``S`` must be a tensor over the extended ring of ``build_linearized``;
    the coordinates are set to zero and every component must then be a
    linear form in the unknowns (a non-affine component is reported by
    name).  By default only components with a nonzero row are kept.
    """
    n = S.dim
    extra = S.nvars - n
    if extra == n ** 3:
        include_eigenvalue = False
    elif extra == n ** 3 + n:
        include_eigenvalue = True
    else:
        raise ValueError(
            f"tensor has {extra} non-coordinate variables, expected {n ** 3} "
            f"or {n ** 3 + n}; not a linearized family tensor"
        )
    origin = {v: 0 for v in range(1, n + 1)}
    rows, labels = [], []
    for i in range(n):
        for j in range(n):
            for k in range(n):
                value = S.comps[i][j][k].set_vars(origin)
                row = [Fraction(0)] * extra
                for mono, coeff in value.terms.items():
                    if len(mono) != 1 or mono[0][1] != 1 or mono[0][0] <= n:
                        raise ValueError(
                            f"component S^{i + 1}_{{{j + 1},{k + 1}}} is not a "
                            f"linear form in the coefficients: {value}"
                        )
                    row[mono[0][0] - n - 1] = coeff
                if include_zero_rows or any(row):
                    rows.append(row)
                    labels.append(f"S^{i + 1}_{{{j + 1},{k + 1}}}")
    matrix = RationalMatrix(rows) if rows else RationalMatrix.zero(0, extra)
    return LinearSystemQ(
        matrix=matrix,
        labels=tuple(labels),
        dim=n,
        include_eigenvalue=include_eigenvalue,
    )


def _origin_tensors(n: int, include_eigenvalue: bool):
    """Nijenhuis tensor and operator of the linearized family at x = 0.

    Levels beyond the first are pure contractions, so they may be computed
    from these two objects; evaluation at the origin commutes with every
    contraction because it is a ring homomorphism.
    """
    family = build_linearized(n, include_eigenvalue)
    origin = {v: 0 for v in range(1, n + 1)}
    N0 = nijenhuis(family.operator).set_vars(origin)
    L0 = family.operator.set_vars(origin)
    return N0, L0


def linearized_system(
    n: int, kind: str = "haantjes", include_eigenvalue: bool = False
) -> LinearSystemQ:
    """The system cut out by a torsion tensor of the linearized family.

    ``kind`` is one of ``nijenhuis``, ``haantjes``, ``level:m`` (the level-m
    torsion) or ``t`` (the dimension-four obstruction contraction).
    """
    level = _resolve_kind(kind)
    N0, L0 = _origin_tensors(n, include_eigenvalue)
    T = N0
    for _ in range((2 if level == "t" else level) - 1):
        T = torsion_step(T, L0)
    if level == "t":
        M = L0.traceless_part()
        MH = contract_upper(M, T)
        T = (
            contract_lower_j(MH, M)
            - contract_lower_k(MH, M)
            + contract_lower_j(T, M.compose(M))
        )
    return extract_system(T)


def _resolve_kind(kind: str):
    if kind == "nijenhuis":
        return 1
    if kind == "haantjes":
        return 2
    if kind == "t":
        return "t"
    if kind.startswith("level:"):
        try:
            level = int(kind.split(":", 1)[1])
        except ValueError:
            level = 0
        if level >= 1:
            return level
    raise ValueError(
        f"unknown tensor kind {kind!r}; expected nijenhuis, haantjes, level:m or t"
    )


# ----- candidate tensors and the search ---------------------------------------


@dataclass(frozen=True)
class Candidate:
    """A candidate tensor: a torsion decorated with traceless-part powers.

    With M the traceless part of L and B the base tensor (the Nijenhuis or
    the Haantjes torsion), the candidate is

        C^i_{jk} = (M^u)^i_s B^s_{rt} (M^p)^r_j (M^q)^t_k,

    encoded as ``powers = (u, p, q)``.
    """

    base: str  # "nijenhuis" or "haantjes"
    powers: tuple[int, int, int]

    def __post_init__(self):
        if self.base not in ("nijenhuis", "haantjes"):
            raise ValueError(f"unknown base tensor {self.base!r}")
        if len(self.powers) != 3 or any(
            not isinstance(p, int) or p < 0 for p in self.powers
        ):
            raise ValueError("powers must be three non-negative integers")

    @property
    def label(self) -> str:
        symbol = "N" if self.base == "nijenhuis" else "H"
        u, p, q = self.powers
        return f"{symbol}({u},{p},{q})"

    def build(self, base_tensor: Tensor12, traceless: OperatorField) -> Tensor12:
        """Contract a precomputed base tensor with traceless-part powers."""
        u, p, q = self.powers
        T = base_tensor
        if p:
            T = contract_lower_j(T, traceless.power(p))
        if q:
            T = contract_lower_k(T, traceless.power(q))
        if u:
            T = contract_upper(traceless.power(u), T)
        return T

    def apply(self, L: OperatorField) -> Tensor12:
        """Evaluate the candidate on an arbitrary operator field."""
        base = nijenhuis(L) if self.base == "nijenhuis" else torsion_level(L, 2)
        return self.build(base, L.traceless_part())


def default_candidates() -> tuple[Candidate, ...]:
    """Both torsions decorated with up to two traceless-part factors.

    Ordered by total decoration degree, then lexicographically; twenty
    candidates in total.
    """
    out = []
    for base in ("nijenhuis", "haantjes"):
        decorations = sorted(
            (
                (u, p, q)
                for u in range(3)
                for p in range(3)
                for q in range(3)
                if u + p + q <= 2
            ),
            key=lambda t: (sum(t), tuple(-v for v in t)),
        )
        out.extend(Candidate(base, powers) for powers in decorations)
    return tuple(out)


def t_pattern_candidates() -> tuple[Candidate, ...]:
    """The three contraction patterns of the dimension-four obstruction.

    The obstruction tensor is their combination with coefficients (1, -1, 1).
    """
    return (
        Candidate("haantjes", (1, 1, 0)),
        Candidate("haantjes", (1, 0, 1)),
        Candidate("haantjes", (0, 2, 0)),
    )


@dataclass(frozen=True)
class SearchResult:
    """Outcome of the search for combinations matching the integrability
    conditions of the linearized family."""

    dim: int
    candidates: tuple[Candidate, ...]
    coefficient_basis: tuple[tuple[Fraction, ...], ...]
    basis_equivalent: tuple[bool, ...]
    random_coefficients: tuple[Fraction, ...] | None
    random_equivalent: bool | None
    _candidate_rows: tuple  # per candidate: aligned full component rows
    _component_labels: tuple[str, ...]

    def combined_system(self, coefficients: Sequence[Rational]) -> LinearSystemQ:
        """The system of the combination sum_m c_m * candidate_m."""
        coeffs = [Fraction(c) for c in coefficients]
        if len(coeffs) != len(self.candidates):
            raise ValueError(
                f"expected {len(self.candidates)} coefficients, got {len(coeffs)}"
            )
        width = self.dim ** 3
        rows, labels = [], []
        for idx, label in enumerate(self._component_labels):
            row = [Fraction(0)] * width
            for c, cand_rows in zip(coeffs, self._candidate_rows):
                if not c:
                    continue
                for col, value in enumerate(cand_rows[idx]):
                    if value:
                        row[col] += c * value
            if any(row):
                rows.append(row)
                labels.append(label)
        matrix = RationalMatrix(rows) if rows else RationalMatrix.zero(0, width)
        return LinearSystemQ(
            matrix=matrix, labels=tuple(labels), dim=self.dim, include_eigenvalue=False
        )

    def contains(self, coefficients: Sequence[Rational]) -> bool:
        """Is the coefficient vector in the span of the solution basis?"""
        coeffs = [Fraction(c) for c in coefficients]
        if len(coeffs) != len(self.candidates):
            raise ValueError(
                f"expected {len(self.candidates)} coefficients, got {len(coeffs)}"
            )
        if not any(coeffs):
            return True
        if not self.coefficient_basis:
            return False
        basis = RationalMatrix(self.coefficient_basis)
        return basis.rowspace_contains(RationalMatrix([coeffs]))

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "candidates": [c.label for c in self.candidates],
            "solution_dimension": len(self.coefficient_basis),
            "basis": [
                {
                    "coefficients": [str(c) for c in vec],
                    "equivalent": flag,
                }
                for vec, flag in zip(self.coefficient_basis, self.basis_equivalent)
            ],
            "random_combination": None
            if self.random_coefficients is None
            else {
                "coefficients": [str(c) for c in self.random_coefficients],
                "equivalent": self.random_equivalent,
            },
        }


def search_tensor(
    n: int,
    candidates: Sequence[Candidate] | None = None,
    seed: int = 0,
) -> SearchResult:
    """Search for combinations of candidate tensors matching the
    integrability conditions.

    For each candidate the linear system of its components at x = 0 is
    computed over the linearized family.  A combination is admissible when
    its row space is contained in that of the integrability conditions;
    the admissible coefficient vectors form a linear space, returned by an
    exact basis.  For every basis vector (and for one seeded random
    combination of them) the stronger property of row-space *equality* is
    recorded.
    """
    cands = tuple(candidates) if candidates is not None else default_candidates()
    if not cands:
        raise ValueError("at least one candidate tensor is required")
    N0, L0 = _origin_tensors(n, include_eigenvalue=False)
    H0 = torsion_step(N0, L0)
    bases = {"nijenhuis": N0, "haantjes": H0}
    traceless = L0.traceless_part()
    width = n ** 3

    component_labels = tuple(
        f"S^{i + 1}_{{{j + 1},{k + 1}}}"
        for i in range(n)
        for j in range(n)
        for k in range(n)
    )
    candidate_rows = []
    for cand in cands:
        tensor = cand.build(bases[cand.base], traceless)
        system = extract_system(tensor, include_zero_rows=True)
        candidate_rows.append(tuple(system.matrix.rows))

    conditions = cond3_system(n)
    kernel = conditions.matrix.nullspace_basis()

    # c is admissible iff sum_m c_m row_m(component) annihilates the kernel
    # of the integrability conditions, for every component row.
    equations = set()
    for idx in range(len(component_labels)):
        for vec in kernel:
            equation = tuple(
                sum(row[idx][col] * vec[col] for col in range(width))
                for row in candidate_rows
            )
            if any(equation):
                equations.add(equation)
    if equations:
        coefficient_space = RationalMatrix(sorted(equations)).nullspace_basis()
    else:
        coefficient_space = [
            tuple(Fraction(1 if m == t else 0) for m in range(len(cands)))
            for t in range(len(cands))
        ]

    result = SearchResult(
        dim=n,
        candidates=cands,
        coefficient_basis=tuple(coefficient_space),
        basis_equivalent=(),
        random_coefficients=None,
        random_equivalent=None,
        _candidate_rows=tuple(candidate_rows),
        _component_labels=component_labels,
    )
    flags = tuple(
        result.combined_system(vec).rowspace_equal(conditions)
        for vec in coefficient_space
    )
    random_coefficients = None
    random_equivalent = None
    if coefficient_space:
        rng = random.Random(seed)
        weights = [Fraction(rng.randint(1, 9)) for _ in coefficient_space]
        random_coefficients = tuple(
            sum(w * vec[m] for w, vec in zip(weights, coefficient_space))
            for m in range(len(cands))
        )
        random_equivalent = result.combined_system(random_coefficients).rowspace_equal(
            conditions
        )
    return SearchResult(
        dim=n,
        candidates=cands,
        coefficient_basis=tuple(coefficient_space),
        basis_equivalent=flags,
        random_coefficients=random_coefficients,
        random_equivalent=random_equivalent,
        _candidate_rows=tuple(candidate_rows),
        _component_labels=component_labels,
    )
