"""Permutation factorization and Birkhoff decomposition."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .errors import DimensionTooLarge, InternalError
from .exact import (
    DSMatrix,
    Permutation,
    SubsetPair,
    UnionFind,
    fmt,
    iter_bits,
    mask_of,
)
from .domestic import BRUTE_FORCE_LIMIT, DEFAULT_LIMIT, domesticity_margin


def tight_pairs(m: DSMatrix, limit: int = BRUTE_FORCE_LIMIT) -> list:
    """Every (X, Y) with X != Y, |X| = |Y| and block sum exactly |X|.

    Exponential; kept as the oracle for :func:`support_components`.
    """
    n = m.n
    if n > limit:
        raise DimensionTooLarge(n, limit)
    rows = m.rows
    out = []
    for k in range(1, n + 1):
        sets = [mask_of(c) for c in combinations(range(n), k)]
        for x in sets:
            for y in sets:
                if x == y:
                    continue
                total = sum(rows[i][j] for i in iter_bits(x) for j in iter_bits(y))
                if total == k:
                    out.append(SubsetPair(x, y))
    return sorted(out)


def support_components(m: DSMatrix) -> list:
    """Connected components of the bipartite support graph as (rows, cols) bitmask pairs.

    Rows are nodes ``0..n-1``, columns ``n..2n-1``; an edge joins row i and
    column j when ``M[i, j] > 0``. Components are listed by smallest row.
    """
    n = m.n
    uf = UnionFind(2 * n)
    for i, j in m.support():
        uf.union(i, n + j)
    comps = []
    for group in uf.groups():
        x = mask_of(v for v in group if v < n)
        y = mask_of(v - n for v in group if v >= n)
        comps.append((x, y))
    comps.sort(key=lambda c: (c[0] & -c[0]))
    return comps


def tight_pairs_from_components(components: list) -> list:
    """Coordinate-wise unions of components, restricted to X != Y."""
    out = set()
    k = len(components)
    for r in range(1, k + 1):
        for chosen in combinations(components, r):
            x = y = 0
            for cx, cy in chosen:
                x |= cx
                y |= cy
            if x != y:
                out.add((x, y))
    return sorted(SubsetPair(x, y) for x, y in out) if out else []


@dataclass(frozen=True)
class PermutationFactorization:
    P: Permutation
    Mprime: DSMatrix
    eps: Fraction | None

    def to_json(self) -> dict:
        return {
            "P": self.P.to_one_based(),
            "M_prime": self.Mprime.to_json(),
            "eps": fmt(self.eps) if self.eps is not None else None,
        }


def factor_permutation(
    m: DSMatrix, compute_eps: bool = True, limit: int = DEFAULT_LIMIT
) -> PermutationFactorization:
    """Split ``M = P M'`` with ``M'`` domestic.

    Inside each support component, P sends the sorted column indices onto
    the sorted row indices, so every tight pair of ``M'`` has X = Y. The
    returned eps is ``min(1/(2n), 1 - margin(M'))``.
    """
    n = m.n
    if compute_eps and n > limit:
        raise DimensionTooLarge(n, limit)
    images = [0] * n
    for x, y in support_components(m):
        for col, row in zip(iter_bits(y), iter_bits(x)):
            images[col] = row
    perm = Permutation(tuple(images))
    mprime = m.permute_rows(perm.inverse())
    eps = None
    if compute_eps:
        margin = domesticity_margin(mprime, limit).margin
        if margin >= 1:
            raise InternalError("factor M' still has a tight off-diagonal pair")
        eps = min(Fraction(1, 2 * n), 1 - margin)
    return PermutationFactorization(perm, mprime, eps)


@dataclass(frozen=True)
class BirkhoffDecomposition:
    terms: tuple  # (coefficient, Permutation) pairs

    def to_json(self) -> dict:
        return {"terms": [{"coeff": fmt(c), "perm": p.to_one_based()} for c, p in self.terms]}

    def reconstruct(self, n: int) -> DSMatrix:
        acc = [[Fraction(0)] * n for _ in range(n)]
        for c, p in self.terms:
            for j, i in enumerate(p.images):
                acc[i][j] += c
        return DSMatrix.from_fractions(acc)


def _perfect_matching(n: int, residual: list) -> list | None:
    """Kuhn's augmenting-path matching on positive entries; columns tried in ascending order."""
    match_col = [-1] * n  # column -> row

    def augment(i: int, seen: list) -> bool:
        base = i * n
        for j in range(n):
            if residual[base + j] > 0 and not seen[j]:
                seen[j] = True
                if match_col[j] < 0 or augment(match_col[j], seen):
                    match_col[j] = i
                    return True
        return False

    for i in range(n):
        if not augment(i, [False] * n):
            return None
    return match_col


def birkhoff_decompose(m: DSMatrix) -> BirkhoffDecomposition:
    """Greedy extraction of permutation matrices from the support.

    Each round finds a perfect matching on the positive entries of the
    residual and subtracts the smallest matched entry along it, which zeroes
    at least one entry. Terms are returned sorted by permutation.
    """
    n, den = m.n, m.den
    residual = list(m.num)
    terms = []
    while any(residual):
        match_col = _perfect_matching(n, residual)
        if match_col is None:
            raise InternalError("support of a doubly stochastic residual has no perfect matching")
        lam = min(residual[match_col[j] * n + j] for j in range(n))
        for j in range(n):
            residual[match_col[j] * n + j] -= lam
        # column j is matched to row match_col[j], so P(j) = match_col[j]
        terms.append((Fraction(lam, den), Permutation(tuple(match_col))))
    terms.sort(key=lambda t: t[1].images)
    return BirkhoffDecomposition(tuple(terms))
