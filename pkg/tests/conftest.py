"""Shared fixtures and random generators for the test suite.

All randomness is seeded; every assertion in the suite is exact (polynomial
identity or exact rational arithmetic), so a failure is a real defect, never
flakiness.
"""

from __future__ import annotations

import random
from fractions import Fraction
from pathlib import Path

import pytest

from haantjes import OperatorField, Poly, VectorField
from haantjes.geometry import AffineChange
from haantjes.polyring import RationalMatrix

OPERATORS = Path(__file__).resolve().parent.parent / "operators"


@pytest.fixture(scope="session")
def operators_dir() -> Path:
    return OPERATORS


def random_poly(rng: random.Random, nvars: int, max_degree: int = 2,
                max_terms: int = 3) -> Poly:
    """A random sparse polynomial with small integer coefficients."""
    terms = {}
    for _ in range(rng.randint(1, max_terms)):
        exponents = [0] * nvars
        for _ in range(rng.randint(0, max_degree)):
            exponents[rng.randrange(nvars)] += 1
        mono = tuple((v + 1, e) for v, e in enumerate(exponents) if e)
        coeff = rng.choice([-3, -2, -1, 1, 2, 3])
        terms[mono] = terms.get(mono, 0) + coeff
    return Poly(nvars, terms)


def random_operator(rng: random.Random, n: int, max_degree: int = 2) -> OperatorField:
    rows = [[random_poly(rng, n, max_degree) for _ in range(n)] for _ in range(n)]
    return OperatorField(rows, nvars=n)


def random_vector_field(rng: random.Random, n: int, max_degree: int = 2) -> VectorField:
    return VectorField(tuple(random_poly(rng, n, max_degree) for _ in range(n)), dim=n)


def random_point(rng: random.Random, n: int) -> tuple[Fraction, ...]:
    return tuple(Fraction(rng.randint(-5, 5), rng.randint(1, 3)) for _ in range(n))


def random_affine_change(rng: random.Random, n: int) -> AffineChange:
    """A random invertible affine coordinate change with rational entries."""
    while True:
        entries = [[Fraction(rng.randint(-3, 3)) for _ in range(n)] for _ in range(n)]
        matrix = RationalMatrix(entries)
        if matrix.rank == n:
            break
    shift = tuple(Fraction(rng.randint(-2, 2)) for _ in range(n))
    return AffineChange(matrix, shift)


def random_sparse_affine_change(rng: random.Random, n: int) -> AffineChange:
    """A random affine change with a sparse Jacobian.

    The Jacobian is a signed, scaled permutation plus one shear entry, so it
    still permutes, rescales, and mixes coordinates, but conjugating by it
    keeps polynomial operator entries sparse — dense Jacobians blow up the
    term count of every pushed-forward entry, which matters for exact
    dimension-4 runs.
    """
    scales = (Fraction(1), Fraction(-1), Fraction(2), Fraction(-2),
              Fraction(1, 2), Fraction(-1, 2), Fraction(3, 2))
    while True:
        perm = list(range(n))
        rng.shuffle(perm)
        entries = [[Fraction(0)] * n for _ in range(n)]
        for i in range(n):
            entries[i][perm[i]] = rng.choice(scales)
        row = rng.randrange(n)
        col = rng.choice([j for j in range(n) if j != perm[row]])
        entries[row][col] = rng.choice(scales)
        matrix = RationalMatrix(entries)
        if matrix.rank == n:
            break
    shift = tuple(Fraction(rng.randint(-2, 2)) for _ in range(n))
    return AffineChange(matrix, shift)
