"""Majorization on the probability simplex.

``p`` majorizes ``q`` when some doubly stochastic ``M`` has ``q = M p``;
equivalently the descending prefix sums of ``p`` dominate those of ``q``.
Both characterizations are implemented and checked against each other in
the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import accumulate

from .errors import ChainNotMajorized, DimensionMismatch, NotMajorized
from .exact import DSMatrix, Permutation, SimplexVector, linf, multiply, permutation_matrix


def _descending_order(p: SimplexVector) -> list:
    # stable: equal coordinates keep ascending original index
    return sorted(range(p.n), key=lambda i: (-p.coords[i], i))


def sort_desc(p: SimplexVector) -> SimplexVector:
    return SimplexVector._trusted(tuple(p.coords[i] for i in _descending_order(p)))


def _sorting_permutation(p: SimplexVector) -> Permutation:
    """The permutation S with S p = sort_desc(p)."""
    order = _descending_order(p)
    images = [0] * p.n
    for k, i in enumerate(order):
        images[i] = k
    return Permutation(tuple(images))


def _check_dims(p: SimplexVector, q: SimplexVector):
    if p.n != q.n:
        raise DimensionMismatch(f"vectors of dimension {p.n} and {q.n}")


def majorizes(p: SimplexVector, q: SimplexVector) -> bool:
    _check_dims(p, q)
    ps = accumulate(sort_desc(p).coords)
    qs = accumulate(sort_desc(q).coords)
    return all(a >= b for a, b in zip(ps, qs))


@dataclass(frozen=True)
class MajorizationWitness:
    M: DSMatrix
    steps: int


def t_transform(n: int, i: int, j: int, lam: Fraction) -> DSMatrix:
    """lam * I + (1 - lam) * (transposition of i and j)."""
    rows = [[Fraction(int(a == b)) for b in range(n)] for a in range(n)]
    rows[i][i] = rows[j][j] = lam
    rows[i][j] = rows[j][i] = 1 - lam
    return DSMatrix.from_fractions(rows)


def majorization_witness(p: SimplexVector, q: SimplexVector) -> MajorizationWitness:
    """Return a doubly stochastic ``M`` with ``M p = q``.

    Works in the sorted frame: while ``a = p_desc`` differs from
    ``b = q_desc``, take the largest ``j`` with ``a[j] > b[j]`` and the
    smallest ``k > j`` with ``a[k] < b[k]`` and move
    ``min(a[j] - b[j], b[k] - a[k])`` from ``j`` to ``k`` with one
    T-transform. Each step matches at least one more coordinate and keeps
    ``a`` sorted, so at most ``n - 1`` steps are needed. The product is then
    conjugated back by the two sorting permutations.
    """
    if not majorizes(p, q):
        raise NotMajorized("prefix sums of p do not dominate those of q")
    n = p.n
    a = list(sort_desc(p).coords)
    b = list(sort_desc(q).coords)
    w = DSMatrix.identity(n)
    steps = 0
    while a != b:
        j = max(i for i in range(n) if a[i] > b[i])
        k = min(i for i in range(j + 1, n) if a[i] < b[i])
        delta = min(a[j] - b[j], b[k] - a[k])
        lam = 1 - delta / (a[j] - a[k])
        w = multiply(t_transform(n, j, k, lam), w)
        a[j] -= delta
        a[k] += delta
        steps += 1
    sp = permutation_matrix(_sorting_permutation(p))
    sq_inv = permutation_matrix(_sorting_permutation(q).inverse())
    return MajorizationWitness(multiply(multiply(sq_inv, w), sp), steps)


@dataclass(frozen=True)
class SandwichCheck:
    lhs: Fraction
    rhs: Fraction
    holds: bool


def sandwich_bound_check(p: SimplexVector, q: SimplexVector, r: SimplexVector) -> SandwichCheck:
    """For p > q > r: compare |p_desc - q_desc| against 2n |p_desc - r_desc| (sup norms)."""
    _check_dims(p, q)
    _check_dims(q, r)
    if not (majorizes(p, q) and majorizes(q, r)):
        raise ChainNotMajorized("expected p majorizes q and q majorizes r")
    ps, qs, rs = sort_desc(p).coords, sort_desc(q).coords, sort_desc(r).coords
    lhs = linf(ps, qs)
    rhs = 2 * p.n * linf(ps, rs)
    return SandwichCheck(lhs, rhs, lhs <= rhs)
