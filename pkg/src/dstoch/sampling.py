"""Random exact test data: permutations, doubly stochastic matrices, simplex vectors."""

from __future__ import annotations

import random
from fractions import Fraction

from .domestic import domesticity_margin
from .exact import DSMatrix, Permutation, SimplexVector


def random_permutation(rng: random.Random, n: int) -> Permutation:
    images = list(range(n))
    rng.shuffle(images)
    return Permutation(tuple(images))


def _composition(rng: random.Random, total: int, parts: int) -> list:
    """``parts`` positive integers summing to ``total``."""
    cuts = sorted(rng.sample(range(1, total), parts - 1))
    return [b - a for a, b in zip([0] + cuts, cuts + [total])]


def random_ds(rng: random.Random, n: int, max_den: int = 12, terms: int | None = None) -> DSMatrix:
    """Convex combination of random permutation matrices with weights k/D, D <= max_den.

    Every entry then has a denominator dividing D.
    """
    den = rng.randint(2, max_den)
    if terms is None:
        terms = rng.randint(1, min(den, n + 2))
    terms = max(1, min(terms, den))
    num = [0] * (n * n)
    for w in _composition(rng, den, terms) if terms > 1 else [den]:
        p = random_permutation(rng, n)
        for j, i in enumerate(p.images):
            num[i * n + j] += w
    return DSMatrix._from_ints(n, num, den)


def random_lazy(rng: random.Random, n: int, max_den: int = 12) -> DSMatrix:
    """(1 - t) I + t R with t <= 1/2; always (2n)^-1-domestic."""
    r = random_ds(rng, n, max_den)
    den = rng.randint(2, max_den)
    k = rng.randint(1, den // 2)
    ident = DSMatrix.identity(n)
    num = [(den - k) * a * r.den + k * b for a, b in zip(ident.num, r.num)]
    return DSMatrix._from_ints(n, num, den * r.den)


def random_domestic(rng: random.Random, n: int, eps: Fraction | None = None, max_den: int = 12) -> DSMatrix:
    """A random matrix with margin <= 1 - eps (eps defaults to 1/(2n))."""
    eps = Fraction(1, 2 * n) if eps is None else eps
    for _ in range(20):
        m = random_ds(rng, n, max_den, terms=rng.randint(2, n + 3))
        if domesticity_margin(m).margin <= 1 - eps:
            return m
    return random_lazy(rng, n, max_den)


def random_simplex(rng: random.Random, n: int, max_den: int = 12) -> SimplexVector:
    den = rng.randint(1, max_den)
    weights = [0] * n
    for _ in range(den):
        weights[rng.randrange(n)] += 1
    return SimplexVector(tuple(Fraction(w, den) for w in weights))
