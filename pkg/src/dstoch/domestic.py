"""Domesticity margin and epsilon-domestic tests.

The margin of ``M`` is the largest normalized block sum
``(1/|X|) * sum(M[i, j] for i in X for j in Y)`` over index sets with
``|X| = |Y|`` and ``X != Y``. ``M`` is eps-domestic iff its margin is at
most ``1 - eps``. A margin of 1 means some block of rows sends all of its
mass to a different block of columns, i.e. the matrix moves mass like a
permutation.

``domesticity_margin`` scans all row sets ``X`` once. For each ``X`` the
column sums ``r_X[j] = sum(M[i, j] for i in X)`` are built incrementally,
and the best ``Y`` of size ``|X|`` is the top-``|X|`` coordinates of
``r_X`` (ties to lower index). When that set equals ``X`` the best
admissible ``Y`` differs by one swap: drop the last selected coordinate,
take the first unselected one. ``brute_force_margin`` is the naive oracle.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations

from .errors import DimensionTooLarge, EpsilonOutOfRange, NotDomestic
from .exact import DSMatrix, SimplexVector, SubsetPair, fmt, linf, mask_of, to_rational
from .majorization import sort_desc

DEFAULT_LIMIT = 14
BRUTE_FORCE_LIMIT = 8
_LOW_BITS = 10


@dataclass(frozen=True)
class MarginReport:
    margin: Fraction
    witness: SubsetPair | None  # None only for n == 1, where no pair exists

    def largest_eps(self, n: int) -> Fraction | None:
        """min(1/(2n), 1 - margin), or None when the matrix is not domestic for any eps."""
        if self.margin >= 1:
            return None
        return min(Fraction(1, 2 * n), 1 - self.margin)

    def to_json(self, n: int) -> dict:
        eps = self.largest_eps(n)
        return {
            "margin": fmt(self.margin),
            "witness": self.witness.to_json() if self.witness else None,
            "domestic_for_eps": fmt(eps) if eps is not None else None,
        }


def _better(a, b) -> bool:
    """Total order on candidates (S, k, X, Y): larger S/k wins, then smaller X."""
    if b is None:
        return True
    lhs, rhs = a[0] * b[1], b[0] * a[1]
    if lhs != rhs:
        return lhs > rhs
    return a[2] < b[2]


def _scan_chunk(n: int, rows: tuple, high_masks) -> tuple | None:
    """Best candidate over every X whose high bits lie in ``high_masks``."""
    lo_bits = min(n, _LOW_BITS)
    # incremental column sums for every subset of the low rows
    low = [(0,) * n]
    for m in range(1, 1 << lo_bits):
        i = (m & -m).bit_length() - 1
        prev = low[m & (m - 1)]
        row = rows[i]
        low.append(tuple(a + b for a, b in zip(prev, row)))

    full = (1 << n) - 1
    idx = range(n)
    best = None
    for h in high_masks:
        base = [0] * n
        hm = h
        while hm:
            i = (hm & -hm).bit_length() - 1 + lo_bits
            base = [a + b for a, b in zip(base, rows[i])]
            hm &= hm - 1
        for l, lsum in enumerate(low):
            x = (h << lo_bits) | l
            if x == 0 or x == full:
                continue
            r = [a + b for a, b in zip(base, lsum)] if h else lsum
            k = x.bit_count()
            order = sorted(idx, key=lambda j: (-r[j], j))
            top = order[:k]
            y = mask_of(top)
            s = sum(r[j] for j in top)
            if y == x:
                drop, add = order[k - 1], order[k]
                y ^= (1 << drop) | (1 << add)
                s += r[add] - r[drop]
            cand = (s, k, x, y)
            if _better(cand, best):
                best = cand
    return best


@lru_cache(maxsize=8192)
def _margin_exact(m: DSMatrix, workers: int = 1) -> tuple:
    n = m.n
    if n == 1:
        return Fraction(0), None
    rows = tuple(m.num[i * n:(i + 1) * n] for i in range(n))
    lo_bits = min(n, _LOW_BITS)
    highs = list(range(1 << (n - lo_bits)))
    if workers > 1 and len(highs) > 1:
        chunks = [highs[w::workers] for w in range(workers)]
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_scan_chunk, [n] * len(chunks), [rows] * len(chunks), chunks))
    else:
        results = [_scan_chunk(n, rows, highs)]
    best = None
    for cand in results:
        if cand is not None and _better(cand, best):
            best = cand
    s, k, x, y = best
    return Fraction(s, k * m.den), SubsetPair(x, y)


def domesticity_margin(m: DSMatrix, limit: int = DEFAULT_LIMIT, workers: int = 1) -> MarginReport:
    if m.n > limit:
        raise DimensionTooLarge(m.n, limit)
    margin, witness = _margin_exact(m, max(1, int(workers)))
    return MarginReport(margin, witness)


def brute_force_margin(m: DSMatrix, limit: int = BRUTE_FORCE_LIMIT) -> MarginReport:
    """Naive oracle: every admissible (X, Y), block sums added entry by entry.

    Ties go to the smallest X, then the smallest Y (as bitmasks).
    """
    n = m.n
    if n > limit:
        raise DimensionTooLarge(n, limit)
    rows = m.rows
    best = None
    for k in range(1, n):
        sets = [mask_of(c) for c in combinations(range(n), k)]
        for x in sets:
            xs = [i for i in range(n) if x >> i & 1]
            for y in sets:
                if y == x:
                    continue
                total = sum(rows[i][j] for i in xs for j in range(n) if y >> j & 1)
                cand = (total / k, -x, -y)
                if best is None or cand > best:
                    best = cand
    if best is None:
        return MarginReport(Fraction(0), None)
    return MarginReport(best[0], SubsetPair(-best[1], -best[2]))


def check_eps(eps, n: int) -> Fraction:
    eps = to_rational(eps)
    if not (0 < eps <= Fraction(1, 2 * n)):
        raise EpsilonOutOfRange(f"eps must lie in (0, 1/{2 * n}], got {eps}")
    return eps


def is_domestic(m: DSMatrix, eps, limit: int = DEFAULT_LIMIT) -> tuple:
    """Return ``(True, None)`` or ``(False, pair)`` with block sum > (1 - eps)|X|."""
    eps = check_eps(eps, m.n)
    rep = domesticity_margin(m, limit)
    if rep.margin <= 1 - eps:
        return True, None
    return False, rep.witness


def common_eps(matrices, limit: int = DEFAULT_LIMIT) -> Fraction:
    """Largest eps for which every matrix in ``matrices`` (name -> matrix) is domestic.

    Raises NotDomestic naming the first matrix with margin 1.
    """
    eps = None
    for name, m in matrices.items():
        rep = domesticity_margin(m, limit)
        e = rep.largest_eps(m.n)
        if e is None:
            raise NotDomestic(
                f"generator {name!r} is not domestic for any eps: block "
                f"{rep.witness.to_json()} carries all of its mass",
                name=name, witness=rep.witness,
            )
        eps = e if eps is None else min(eps, e)
    return eps


def contraction_diagnostic(m: DSMatrix, p: SimplexVector, eps) -> tuple:
    """With q = M p, return (|p - q|, |p_desc - q_desc|) in the sup norm.

    For eps-domestic ``M`` the first value never exceeds ``2n/eps`` times
    the second.
    """
    ok, pair = is_domestic(m, eps)
    if not ok:
        raise NotDomestic(f"matrix is not {fmt(to_rational(eps))}-domestic", witness=pair)
    q = m.apply(p)
    return linf(p.coords, q.coords), linf(sort_desc(p).coords, sort_desc(q).coords)
