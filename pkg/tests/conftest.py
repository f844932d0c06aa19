"""Shared fixtures: seeded random objects, fixture bivectors and data paths."""

from __future__ import annotations

import itertools
import logging
import random
from collections.abc import Callable
from fractions import Fraction
from pathlib import Path

import pytest

from dqkit.algebra.dpoly import PolyDiffOp
from dqkit.algebra.tpoly import PolyVector
from dqkit.core.poly import MultiIndex, Poly, monomials_up_to

DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20240917)


def _random_fraction(rng: random.Random) -> Fraction:
    value = Fraction(rng.randint(-3, 3), rng.randint(1, 3))
    return value or Fraction(1)


def _random_index(rng: random.Random, dim: int, max_order: int) -> MultiIndex:
    exps = [0] * dim
    for _ in range(rng.randint(0, max_order)):
        exps[rng.randrange(dim)] += 1
    return tuple(exps)


def random_poly(rng: random.Random, dim: int, max_degree: int, terms: int = 3) -> Poly:
    """A nonzero Poly with up to ``terms`` monomials of degree <= max_degree."""
    monos = monomials_up_to(dim, max_degree)
    total = Poly.zero(dim)
    while total.is_zero():
        for _ in range(terms):
            total = total + rng.choice(monos).scale(_random_fraction(rng))
    return total


def random_op(
    rng: random.Random,
    dim: int,
    arity: int,
    max_order: int = 1,
    coeff_degree: int = 1,
    terms: int = 2,
) -> PolyDiffOp:
    """A nonzero operator with derivative orders <= max_order per slot."""
    op = PolyDiffOp.zero(dim, arity)
    while op.is_zero():
        spec = {}
        for _ in range(terms):
            derivs = tuple(_random_index(rng, dim, max_order) for _ in range(arity))
            spec[derivs] = random_poly(rng, dim, coeff_degree, terms=2)
        op = PolyDiffOp(dim, arity, spec)
    return op


def random_polyvector(rng: random.Random, dim: int, degree: int, coeff_degree: int = 1) -> PolyVector:
    """A nonzero polyvector; each index set gets a coefficient with probability 1/2."""
    index_sets = list(itertools.combinations(range(1, dim + 1), degree))
    while True:
        components = {
            idx: random_poly(rng, dim, coeff_degree, terms=2)
            for idx in index_sets
            if rng.random() < 0.5
        }
        xi = PolyVector(dim, degree, components)
        if not xi.is_zero():
            return xi


@pytest.fixture
def make_poly(rng: random.Random) -> Callable[..., Poly]:
    """make_poly(dim, max_degree, terms=3) -> random nonzero Poly."""

    def make(dim: int, max_degree: int, terms: int = 3) -> Poly:
        return random_poly(rng, dim, max_degree, terms)

    return make


@pytest.fixture
def make_op(rng: random.Random) -> Callable[..., PolyDiffOp]:
    """make_op(dim, arity, max_order=1, coeff_degree=1, terms=2) -> random nonzero operator."""

    def make(
        dim: int, arity: int, max_order: int = 1, coeff_degree: int = 1, terms: int = 2
    ) -> PolyDiffOp:
        return random_op(rng, dim, arity, max_order, coeff_degree, terms)

    return make


@pytest.fixture
def make_vector_field(make_poly: Callable[..., Poly]) -> Callable[..., PolyVector]:
    def make(dim: int, coeff_degree: int = 1) -> PolyVector:
        return PolyVector.vector_field([make_poly(dim, coeff_degree, terms=2) for _ in range(dim)])

    return make


def bivector3(a: Poly, b: Poly, c: Poly) -> PolyVector:
    """Π with {x1, x2} = a, {x2, x3} = b, {x3, x1} = c."""
    return PolyVector(3, 2, {(1, 2): a, (2, 3): b, (1, 3): -c})


def x(dim: int, i: int) -> Poly:
    return Poly.variable(dim, i)


@pytest.fixture
def so3() -> PolyVector:
    return bivector3(x(3, 3), x(3, 1), x(3, 2))


@pytest.fixture
def symplectic2() -> PolyVector:
    return PolyVector.basis(2, [1, 2])


@pytest.fixture(autouse=True)
def _reset_dqkit_logger():
    """Undo handler and propagation changes made by setup_logging in CLI runs."""
    yield
    logger = logging.getLogger("dqkit")
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
    logger.propagate = True
    logger.setLevel(logging.NOTSET)
