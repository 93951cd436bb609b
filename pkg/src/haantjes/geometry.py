"""Differential-geometric objects on Q^n with polynomial components.

All fields are expressed in the standard coordinates x1..xn.  An object of
dimension ``dim`` may live in a polynomial ring with ``nvars >= dim``
variables: the first ``dim`` variables are the coordinates themselves and
any extra variables act as formal parameters (the linearizer uses this to
carry unknown coefficients through the torsion calculus).  Differentiation
only ever touches the coordinate block x1..x{dim}.

Index conventions: raw component containers are plain 0-based Python
sequences, while the ``component``/``entry`` accessors take 1-based indices
matching the coordinate names, so ``L.entry(1, 2)`` is the coefficient of
dx2 (x-notation: column 2) in the first row.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

from .polyring import Poly, RationalMatrix, sum_of_products

Rational = Union[int, Fraction]


def _as_poly(value, nvars: int) -> Poly:
    if isinstance(value, Poly):
        if value.nvars != nvars:
            raise ValueError(f"component has {value.nvars} variables, expected {nvars}")
        return value
    if isinstance(value, (int, Fraction)):
        return Poly.constant(value, nvars)
    if isinstance(value, str):
        return Poly.parse(value, nvars)
    raise TypeError(f"cannot interpret {value!r} as a polynomial")


class VectorField:
    """A polynomial vector field sum_i f^i d/dx_i on Q^dim."""

    __slots__ = ("dim", "nvars", "components")

    def __init__(self, components: Sequence, nvars: int | None = None, dim: int | None = None):
        comps = list(components)
        if not comps:
            raise ValueError("a vector field needs at least one component")
        if dim is None:
            dim = len(comps)
        if len(comps) != dim:
            raise ValueError(f"expected {dim} components, got {len(comps)}")
        if nvars is None:
            nvars = next((c.nvars for c in comps if isinstance(c, Poly)), dim)
        if nvars < dim:
            raise ValueError(f"nvars={nvars} smaller than dim={dim}")
        self.dim = dim
        self.nvars = nvars
        self.components = tuple(_as_poly(c, nvars) for c in comps)

    @classmethod
    def zero(cls, dim: int, nvars: int | None = None) -> "VectorField":
        nv = nvars or dim
        return cls([Poly.zero(nv)] * dim, nvars=nv, dim=dim)

    @classmethod
    def basis(cls, index: int, dim: int, nvars: int | None = None) -> "VectorField":
        """The coordinate field d/dx{index} (1-based)."""
        if not (1 <= index <= dim):
            raise ValueError(f"basis index {index} out of range 1..{dim}")
        nv = nvars or dim
        comps = [Poly.zero(nv)] * dim
        comps[index - 1] = Poly.constant(1, nv)
        return cls(comps, nvars=nv, dim=dim)

    @property
    def is_zero(self) -> bool:
        return all(c.is_zero for c in self.components)

    def component(self, i: int) -> Poly:
        """The i-th component (1-based)."""
        if not (1 <= i <= self.dim):
            raise ValueError(f"component index {i} out of range 1..{self.dim}")
        return self.components[i - 1]

    def __add__(self, other: "VectorField") -> "VectorField":
        self._check_compatible(other)
        return VectorField(
            [a + b for a, b in zip(self.components, other.components)],
            nvars=self.nvars, dim=self.dim,
        )

    def __sub__(self, other: "VectorField") -> "VectorField":
        self._check_compatible(other)
        return VectorField(
            [a - b for a, b in zip(self.components, other.components)],
            nvars=self.nvars, dim=self.dim,
        )

    def __neg__(self) -> "VectorField":
        return VectorField([-c for c in self.components], nvars=self.nvars, dim=self.dim)

    def __mul__(self, factor) -> "VectorField":
        f = _as_poly(factor, self.nvars)
        return VectorField([f * c for c in self.components], nvars=self.nvars, dim=self.dim)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, VectorField):
            return NotImplemented
        return (self.dim, self.nvars, self.components) == (other.dim, other.nvars, other.components)

    __hash__ = None

    def _check_compatible(self, other: "VectorField") -> None:
        if self.dim != other.dim or self.nvars != other.nvars:
            raise ValueError("vector fields live on different spaces")

    def evaluate(self, point: Sequence[Rational]) -> tuple[Fraction, ...]:
        return tuple(c(point) for c in self.components)

    def set_vars(self, values: Mapping[int, Rational]) -> "VectorField":
        return VectorField(
            [c.set_vars(values) for c in self.components], nvars=self.nvars, dim=self.dim
        )

    def __str__(self) -> str:
        parts = []
        for i, c in enumerate(self.components, start=1):
            if not c.is_zero:
                parts.append(f"({c})*d/dx{i}")
        return " + ".join(parts) if parts else "0"

    def __repr__(self) -> str:
        return f"VectorField([{', '.join(str(c) for c in self.components)}])"


def lie_bracket(xi: VectorField, eta: VectorField) -> VectorField:
    """The Lie bracket [xi, eta]^i = xi^j d_j(eta^i) - eta^j d_j(xi^i).

    Derivatives run over the coordinate block x1..x{dim} only; parameter
    variables are constants for the bracket.
    """
    xi._check_compatible(eta)
    dim, nvars = xi.dim, xi.nvars
    comps = []
    for i in range(dim):
        pairs = []
        for j in range(dim):
            pairs.append((xi.components[j], eta.components[i].diff(j + 1)))
            pairs.append((-eta.components[j], xi.components[i].diff(j + 1)))
        comps.append(sum_of_products(pairs, nvars))
    return VectorField(comps, nvars=nvars, dim=dim)


class OperatorField:
    """A (1,1)-tensor field: a dim x dim matrix of polynomial entries.

    ``entries`` is a tuple of rows; ``entry(i, j)`` reads 1-based.
    """

    __slots__ = ("dim", "nvars", "entries")

    def __init__(self, entries: Sequence[Sequence], nvars: int | None = None):
        rows = [list(r) for r in entries]
        dim = len(rows)
        if dim < 1 or any(len(r) != dim for r in rows):
            raise ValueError("an operator field must be a square matrix")
        if nvars is None:
            nvars = next(
                (e.nvars for row in rows for e in row if isinstance(e, Poly)), dim
            )
        if nvars < dim:
            raise ValueError(f"nvars={nvars} smaller than dim={dim}")
        self.dim = dim
        self.nvars = nvars
        self.entries = tuple(tuple(_as_poly(e, nvars) for e in row) for row in rows)

    # ----- constructors ----------------------------------------------------

    @classmethod
    def identity(cls, dim: int, nvars: int | None = None) -> "OperatorField":
        nv = nvars or dim
        return cls(
            [[1 if i == j else 0 for j in range(dim)] for i in range(dim)], nvars=nv
        )

    @classmethod
    def zero(cls, dim: int, nvars: int | None = None) -> "OperatorField":
        nv = nvars or dim
        return cls([[0] * dim for _ in range(dim)], nvars=nv)

    @classmethod
    def jordan_block(cls, dim: int, eigenvalue=0, nvars: int | None = None) -> "OperatorField":
        """The single Jordan block with ones on the first superdiagonal."""
        nv = nvars or dim
        lam = _as_poly(eigenvalue, nv)
        rows = []
        for i in range(dim):
            row = [Poly.zero(nv)] * dim
            row[i] = lam
            if i + 1 < dim:
                row[i + 1] = Poly.constant(1, nv)
            rows.append(row)
        return cls(rows, nvars=nv)

    @classmethod
    def from_strings(cls, rows: Sequence[Sequence[str]], nvars: int | None = None) -> "OperatorField":
        dim = len(rows)
        nv = nvars or dim
        return cls([[Poly.parse(s, nv) for s in row] for row in rows], nvars=nv)

    # ----- queries -----------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return all(e.is_zero for row in self.entries for e in row)

    def entry(self, i: int, j: int) -> Poly:
        """Entry in row i, column j (1-based)."""
        if not (1 <= i <= self.dim and 1 <= j <= self.dim):
            raise ValueError(f"entry index ({i},{j}) out of range 1..{self.dim}")
        return self.entries[i - 1][j - 1]

    def column(self, j: int) -> VectorField:
        """Column j (1-based) as a vector field: the image of d/dx{j}."""
        if not (1 <= j <= self.dim):
            raise ValueError(f"column index {j} out of range 1..{self.dim}")
        return VectorField(
            [self.entries[i][j - 1] for i in range(self.dim)],
            nvars=self.nvars, dim=self.dim,
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, OperatorField):
            return NotImplemented
        return (self.dim, self.nvars, self.entries) == (other.dim, other.nvars, other.entries)

    __hash__ = None

    def _check_compatible(self, other: "OperatorField") -> None:
        if self.dim != other.dim or self.nvars != other.nvars:
            raise ValueError("operator fields live on different spaces")

    # ----- algebra -----------------------------------------------------------

    def __add__(self, other: "OperatorField") -> "OperatorField":
        self._check_compatible(other)
        return OperatorField(
            [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.entries, other.entries)],
            nvars=self.nvars,
        )

    def __sub__(self, other: "OperatorField") -> "OperatorField":
        self._check_compatible(other)
        return OperatorField(
            [[a - b for a, b in zip(r1, r2)] for r1, r2 in zip(self.entries, other.entries)],
            nvars=self.nvars,
        )

    def __neg__(self) -> "OperatorField":
        return OperatorField([[-e for e in row] for row in self.entries], nvars=self.nvars)

    def __mul__(self, factor) -> "OperatorField":
        """Scalar multiplication by a polynomial or rational."""
        f = _as_poly(factor, self.nvars)
        return OperatorField([[f * e for e in row] for row in self.entries], nvars=self.nvars)

    __rmul__ = __mul__

    def compose(self, other: "OperatorField") -> "OperatorField":
        """Operator composition (matrix product): (self o other)^i_j."""
        self._check_compatible(other)
        n, nv = self.dim, self.nvars
        rows = []
        for i in range(n):
            row = []
            for j in range(n):
                row.append(
                    sum_of_products(
                        ((self.entries[i][s], other.entries[s][j]) for s in range(n)), nv
                    )
                )
            rows.append(row)
        return OperatorField(rows, nvars=nv)

    __matmul__ = compose

    def power(self, k: int) -> "OperatorField":
        """The k-th composition power; power(0) is the identity."""
        if not isinstance(k, int) or k < 0:
            raise ValueError(f"power must be a non-negative integer, got {k!r}")
        result = OperatorField.identity(self.dim, self.nvars)
        base = self
        while k:
            if k & 1:
                result = result.compose(base)
            base = base.compose(base)
            k >>= 1
        return result

    def apply(self, xi: VectorField) -> VectorField:
        """The image vector field (L xi)^i = L^i_j xi^j."""
        if xi.dim != self.dim or xi.nvars != self.nvars:
            raise ValueError("operator and vector field live on different spaces")
        n, nv = self.dim, self.nvars
        return VectorField(
            [
                sum_of_products(
                    ((self.entries[i][j], xi.components[j]) for j in range(n)), nv
                )
                for i in range(n)
            ],
            nvars=nv, dim=n,
        )

    def trace(self) -> Poly:
        total = Poly.zero(self.nvars)
        for i in range(self.dim):
            total = total + self.entries[i][i]
        return total

    def traceless_part(self) -> "OperatorField":
        """L - (trace(L)/dim) * Id, the unique traceless shift of L."""
        shift = self.trace() * Fraction(1, self.dim)
        rows = [
            [
                self.entries[i][j] - shift if i == j else self.entries[i][j]
                for j in range(self.dim)
            ]
            for i in range(self.dim)
        ]
        return OperatorField(rows, nvars=self.nvars)

    # ----- evaluation -----------------------------------------------------------

    def evaluate(self, point: Sequence[Rational]) -> RationalMatrix:
        """The numeric matrix at a rational point (all nvars values given)."""
        return RationalMatrix([[e(point) for e in row] for row in self.entries])

    def set_vars(self, values: Mapping[int, Rational]) -> "OperatorField":
        return OperatorField(
            [[e.set_vars(values) for e in row] for row in self.entries], nvars=self.nvars
        )

    def __str__(self) -> str:
        cells = [[str(e) for e in row] for row in self.entries]
        widths = [max(len(cells[i][j]) for i in range(self.dim)) for j in range(self.dim)]
        return "\n".join(
            "[ " + "  ".join(c.rjust(w) for c, w in zip(row, widths)) + " ]"
            for row in cells
        )

    def __repr__(self) -> str:
        return f"OperatorField(dim={self.dim}, nvars={self.nvars})"


class Tensor12:
    """A (1,2)-tensor field S^i_{jk}: one upper slot, two lower slots.

    Components are stored as a dim x dim x dim nested tuple indexed
    [i-1][j-1][k-1]; ``component(i, j, k)`` reads 1-based.  Torsions are
    antisymmetric in (j, k), but the container itself does not assume it.
    """

    __slots__ = ("dim", "nvars", "comps")

    def __init__(self, comps: Sequence[Sequence[Sequence]], nvars: int | None = None):
        grid = [[list(col) for col in plane] for plane in comps]
        dim = len(grid)
        if dim < 1 or any(len(p) != dim for p in grid) or any(
            len(col) != dim for p in grid for col in p
        ):
            raise ValueError("a (1,2)-tensor needs dim x dim x dim components")
        if nvars is None:
            nvars = next(
                (c.nvars for p in grid for col in p for c in col if isinstance(c, Poly)),
                dim,
            )
        if nvars < dim:
            raise ValueError(f"nvars={nvars} smaller than dim={dim}")
        self.dim = dim
        self.nvars = nvars
        self.comps = tuple(
            tuple(tuple(_as_poly(c, nvars) for c in col) for col in plane)
            for plane in grid
        )

    @classmethod
    def zero(cls, dim: int, nvars: int | None = None) -> "Tensor12":
        nv = nvars or dim
        z = Poly.zero(nv)
        return cls([[[z] * dim for _ in range(dim)] for _ in range(dim)], nvars=nv)

    @property
    def is_zero(self) -> bool:
        return all(c.is_zero for p in self.comps for col in p for c in col)

    def component(self, i: int, j: int, k: int) -> Poly:
        """S^i_{jk} with 1-based indices."""
        d = self.dim
        if not (1 <= i <= d and 1 <= j <= d and 1 <= k <= d):
            raise ValueError(f"component index ({i},{j},{k}) out of range 1..{d}")
        return self.comps[i - 1][j - 1][k - 1]

    def nonzero_components(self) -> list[tuple[tuple[int, int, int], Poly]]:
        """1-based ((i, j, k), value) pairs for all nonzero components, sorted."""
        out = []
        for i in range(self.dim):
            for j in range(self.dim):
                for k in range(self.dim):
                    c = self.comps[i][j][k]
                    if not c.is_zero:
                        out.append(((i + 1, j + 1, k + 1), c))
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, Tensor12):
            return NotImplemented
        return (self.dim, self.nvars, self.comps) == (other.dim, other.nvars, other.comps)

    __hash__ = None

    def _check_compatible(self, other: "Tensor12") -> None:
        if self.dim != other.dim or self.nvars != other.nvars:
            raise ValueError("tensors live on different spaces")

    def __add__(self, other: "Tensor12") -> "Tensor12":
        self._check_compatible(other)
        return Tensor12(
            [
                [
                    [a + b for a, b in zip(c1, c2)]
                    for c1, c2 in zip(p1, p2)
                ]
                for p1, p2 in zip(self.comps, other.comps)
            ],
            nvars=self.nvars,
        )

    def __sub__(self, other: "Tensor12") -> "Tensor12":
        self._check_compatible(other)
        return Tensor12(
            [
                [
                    [a - b for a, b in zip(c1, c2)]
                    for c1, c2 in zip(p1, p2)
                ]
                for p1, p2 in zip(self.comps, other.comps)
            ],
            nvars=self.nvars,
        )

    def __neg__(self) -> "Tensor12":
        return Tensor12(
            [[[-c for c in col] for col in p] for p in self.comps], nvars=self.nvars
        )

    def __mul__(self, factor) -> "Tensor12":
        f = _as_poly(factor, self.nvars)
        return Tensor12(
            [[[f * c for c in col] for col in p] for p in self.comps], nvars=self.nvars
        )

    __rmul__ = __mul__

    def apply(self, xi: VectorField, eta: VectorField) -> VectorField:
        """The vector field S(xi, eta)^i = S^i_{jk} xi^j eta^k."""
        if xi.dim != self.dim or xi.nvars != self.nvars:
            raise ValueError("tensor and vector field live on different spaces")
        xi._check_compatible(eta)
        n, nv = self.dim, self.nvars
        products = [
            [
                sum_of_products(
                    ((self.comps[i][j][k], eta.components[k]) for k in range(n)), nv
                )
                for j in range(n)
            ]
            for i in range(n)
        ]
        return VectorField(
            [
                sum_of_products(((products[i][j], xi.components[j]) for j in range(n)), nv)
                for i in range(n)
            ],
            nvars=nv, dim=n,
        )

    def set_vars(self, values: Mapping[int, Rational]) -> "Tensor12":
        return Tensor12(
            [[[c.set_vars(values) for c in col] for col in p] for p in self.comps],
            nvars=self.nvars,
        )

    def evaluate(self, point: Sequence[Rational]) -> tuple:
        """Nested tuples of Fractions: the component values at a point."""
        return tuple(
            tuple(tuple(c(point) for c in col) for col in p) for p in self.comps
        )

    def __str__(self) -> str:
        nz = self.nonzero_components()
        if not nz:
            return "0"
        return "\n".join(f"S^{i}_{{{j},{k}}} = {val}" for (i, j, k), val in nz)

    def __repr__(self) -> str:
        return f"Tensor12(dim={self.dim}, nvars={self.nvars})"


# ----- slotwise contractions of a (1,2)-tensor with an operator -------------
#
# These three maps are the building blocks of the level recursions: every
# higher torsion level is a sum of compositions of them, with no fresh
# derivatives involved.


def contract_upper(A: OperatorField, S: Tensor12) -> Tensor12:
    """(A S)^i_{jk} = A^i_s S^s_{jk}: compose the output slot with A."""
    if A.dim != S.dim or A.nvars != S.nvars:
        raise ValueError("operator and tensor live on different spaces")
    n, nv = S.dim, S.nvars
    return Tensor12(
        [
            [
                [
                    sum_of_products(
                        ((A.entries[i][s], S.comps[s][j][k]) for s in range(n)), nv
                    )
                    for k in range(n)
                ]
                for j in range(n)
            ]
            for i in range(n)
        ],
        nvars=nv,
    )


def contract_lower_j(S: Tensor12, A: OperatorField) -> Tensor12:
    """S'(xi, eta) = S(A xi, eta): S'^i_{jk} = S^i_{rk} A^r_j."""
    if A.dim != S.dim or A.nvars != S.nvars:
        raise ValueError("operator and tensor live on different spaces")
    n, nv = S.dim, S.nvars
    return Tensor12(
        [
            [
                [
                    sum_of_products(
                        ((S.comps[i][r][k], A.entries[r][j]) for r in range(n)), nv
                    )
                    for k in range(n)
                ]
                for j in range(n)
            ]
            for i in range(n)
        ],
        nvars=nv,
    )


def contract_lower_k(S: Tensor12, A: OperatorField) -> Tensor12:
    """S'(xi, eta) = S(xi, A eta): S'^i_{jk} = S^i_{jt} A^t_k."""
    if A.dim != S.dim or A.nvars != S.nvars:
        raise ValueError("operator and tensor live on different spaces")
    n, nv = S.dim, S.nvars
    return Tensor12(
        [
            [
                [
                    sum_of_products(
                        ((S.comps[i][j][t], A.entries[t][k]) for t in range(n)), nv
                    )
                    for k in range(n)
                ]
                for j in range(n)
            ]
            for i in range(n)
        ],
        nvars=nv,
    )


# ----- affine coordinate changes ---------------------------------------------


class AffineChange:
    """An invertible affine map y = M x + b of Q^n.

    A singular linear part is rejected at construction.  ``pushforward``
    transports operator and tensor fields along the map; since the Jacobian
    is the constant matrix M, the transport is exact matrix conjugation
    combined with substituting the inverse map into each component.
    """

    __slots__ = ("dim", "matrix", "shift", "inverse_matrix")

    def __init__(self, matrix: Iterable[Iterable[Rational]], shift: Sequence[Rational] | None = None):
        mat = RationalMatrix(matrix)
        if mat.nrows != mat.ncols:
            raise ValueError("the linear part must be square")
        self.dim = mat.nrows
        self.matrix = mat
        self.inverse_matrix = mat.inverse()  # raises ValueError when singular
        if shift is None:
            shift = [0] * self.dim
        if len(shift) != self.dim:
            raise ValueError(f"shift has length {len(shift)}, expected {self.dim}")
        self.shift = tuple(Fraction(s) for s in shift)

    @classmethod
    def identity(cls, dim: int) -> "AffineChange":
        return cls(RationalMatrix.identity(dim).rows)

    def apply_point(self, point: Sequence[Rational]) -> tuple[Fraction, ...]:
        image = self.matrix.mul_vector(point)
        return tuple(a + b for a, b in zip(image, self.shift))

    def inverse(self) -> "AffineChange":
        """The inverse map x = M^{-1} y - M^{-1} b."""
        back_shift = self.inverse_matrix.mul_vector(self.shift)
        return AffineChange(self.inverse_matrix.rows, [-s for s in back_shift])

    def compose(self, other: "AffineChange") -> "AffineChange":
        """self o other: first apply ``other``, then ``self``."""
        if self.dim != other.dim:
            raise ValueError("affine changes act on different spaces")
        matrix = self.matrix @ other.matrix
        shift = tuple(
            a + b for a, b in zip(self.matrix.mul_vector(other.shift), self.shift)
        )
        return AffineChange(matrix.rows, shift)

    def _substitution(self, nvars: int) -> dict[int, Poly]:
        """Polynomials for x_r in terms of the new coordinates y (named x again)."""
        inv = self.inverse_matrix
        offset = inv.mul_vector(self.shift)
        sub = {}
        for r in range(self.dim):
            terms = {(): -offset[r]} if offset[r] else {}
            for s in range(self.dim):
                c = inv.rows[r][s]
                if c:
                    terms[((s + 1, 1),)] = c
            sub[r + 1] = Poly(nvars, terms)
        return sub

    def pushforward_operator(self, L: OperatorField) -> OperatorField:
        """The operator field in the new coordinates: M L(x(y)) M^{-1}."""
        if L.dim != self.dim:
            raise ValueError("operator and affine change act on different spaces")
        sub = self._substitution(L.nvars)
        moved = [[e.substitute(sub) for e in row] for row in L.entries]
        n, nv = L.dim, L.nvars
        out = []
        for i in range(n):
            row = []
            for j in range(n):
                total = Poly.zero(nv)
                for s in range(n):
                    for r in range(n):
                        c = self.matrix.rows[i][s] * self.inverse_matrix.rows[r][j]
                        if c:
                            total = total + moved[s][r] * c
                row.append(total)
            out.append(row)
        return OperatorField(out, nvars=nv)

    def pushforward_tensor(self, S: Tensor12) -> Tensor12:
        """Transport of a (1,2)-tensor: one Jacobian up, two inverses down."""
        if S.dim != self.dim:
            raise ValueError("tensor and affine change act on different spaces")
        sub = self._substitution(S.nvars)
        moved = [
            [[c.substitute(sub) for c in col] for col in plane] for plane in S.comps
        ]
        n, nv = S.dim, S.nvars
        M = self.matrix.rows
        W = self.inverse_matrix.rows
        out = []
        for i in range(n):
            plane = []
            for j in range(n):
                col = []
                for k in range(n):
                    total = Poly.zero(nv)
                    for s in range(n):
                        for r in range(n):
                            for t in range(n):
                                c = M[i][s] * W[r][j] * W[t][k]
                                if c:
                                    total = total + moved[s][r][t] * c
                    col.append(total)
                plane.append(col)
            out.append(plane)
        return Tensor12(out, nvars=nv)


# ----- operator files ---------------------------------------------------------
#
# Operator fields are stored as JSON documents:
#
#     {"dim": 3, "matrix": [["x1", "x2", "0"], ...]}
#
# with one polynomial string per entry in the grammar of Poly.parse.


def operator_from_json(text: str, filename: str = "<string>") -> OperatorField:
    """Parse an operator-field document; errors identify the file and entry."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"{filename}: invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ValueError(f"{filename}: expected a JSON object")
    dim = doc.get("dim")
    matrix = doc.get("matrix")
    if not isinstance(dim, int) or dim < 1:
        raise ValueError(f"{filename}: 'dim' must be a positive integer")
    if (
        not isinstance(matrix, list)
        or len(matrix) != dim
        or any(not isinstance(row, list) or len(row) != dim for row in matrix)
    ):
        raise ValueError(f"{filename}: 'matrix' must be a {dim}x{dim} array of strings")
    rows = []
    for i, row in enumerate(matrix):
        parsed = []
        for j, cell in enumerate(row):
            if not isinstance(cell, str):
                raise ValueError(f"{filename}: matrix[{i}][{j}] is not a string")
            try:
                parsed.append(Poly.parse(cell, dim))
            except Exception as exc:
                raise ValueError(f"{filename}: matrix[{i}][{j}]: {exc}") from exc
        rows.append(parsed)
    return OperatorField(rows, nvars=dim)


def load_operator(path) -> OperatorField:
    """Read an operator field from a JSON file."""
    with open(path, "r", encoding="utf-8") as handle:
        text = handle.read()
    return operator_from_json(text, filename=str(path))


def operator_to_json(L: OperatorField) -> str:
    """Serialize an operator field; parse(to_json(L)) round-trips exactly."""
    if L.nvars != L.dim:
        raise ValueError("only operator fields without extra parameters can be saved")
    doc = {
        "dim": L.dim,
        "matrix": [[str(e) for e in row] for row in L.entries],
    }
    return json.dumps(doc, indent=2) + "\n"
