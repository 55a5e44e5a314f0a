"""Exact enumeration of generated semigroups and what can be read off them."""

from __future__ import annotations

import os
from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .convergence import averaging_core, support_partition
from .domestic import common_eps
from .errors import (
    BudgetExceeded,
    DimensionMismatch,
    DimensionTooSmall,
    FactorizationFailed,
    InputError,
    NoSubUnitEntry,
    OutOfRange,
)
from .exact import (
    DSMatrix,
    GeneratorSet,
    Partition,
    Permutation,
    SimplexVector,
    canonical_key,
    fmt,
    multiply,
    to_rational,
)
from .factorization import factor_permutation

DEFAULT_BUDGET = 1_000_000


def budget_from_env(default: int = DEFAULT_BUDGET) -> int:
    raw = os.environ.get("DSTOCH_BUDGET")
    if raw is None:
        return default
    try:
        value = int(raw)
    except ValueError as exc:
        raise InputError(f"DSTOCH_BUDGET must be an integer, got {raw!r}") from exc
    if value < 1:
        raise InputError("DSTOCH_BUDGET must be positive")
    return value


@dataclass
class SemigroupSnapshot:
    generators: GeneratorSet
    depth: int
    elements: dict  # canonical key -> DSMatrix, in discovery order
    words: dict  # canonical key -> shortest, lexicographically least word
    truncated: bool = False

    def __len__(self) -> int:
        return len(self.elements)

    def to_json(self, matrices: bool = True) -> dict:
        out = {
            "n": self.generators.n,
            "depth": self.depth,
            "count": len(self.elements),
            "truncated": self.truncated,
        }
        if matrices:
            out["elements"] = [
                {"key": k.decode(), "word": list(self.words[k]), "matrix": m.to_json()}
                for k, m in self.elements.items()
            ]
        return out


def generate(
    gens: GeneratorSet,
    depth: int,
    budget: int = DEFAULT_BUDGET,
    strict: bool = False,
) -> SemigroupSnapshot:
    """Breadth-first enumeration of all products of at most ``depth`` generators.

    Frontier elements are expanded in the order of their witness words and
    generators are tried in generator order, so the first word found for
    an element is the lexicographically least among its shortest words.
    Stops with ``truncated=True`` once ``budget`` elements exist; with
    ``strict`` a BudgetExceeded carrying the partial snapshot is raised
    instead.
    """
    if depth < 1:
        raise InputError("depth must be at least 1")
    if budget < 1:
        raise InputError("budget must be at least 1")
    names = gens.names
    mats = [gens[k] for k in names]
    elements: dict = {}
    words: dict = {}
    snap = SemigroupSnapshot(gens, depth, elements, words)

    frontier = []
    for name, m in zip(names, mats):
        key = canonical_key(m)
        if key not in elements:
            if len(elements) >= budget:
                snap.truncated = True
                break
            elements[key] = m
            words[key] = (name,)
            frontier.append(key)

    level = 1
    while frontier and level < depth and not snap.truncated:
        nxt = []
        for key in frontier:
            base, word = elements[key], words[key]
            for name, m in zip(names, mats):
                prod = multiply(base, m)
                pk = canonical_key(prod)
                if pk in elements:
                    continue
                if len(elements) >= budget:
                    snap.truncated = True
                    break
                elements[pk] = prod
                words[pk] = word + (name,)
                nxt.append(pk)
            if snap.truncated:
                break
        frontier = nxt
        level += 1

    if snap.truncated and strict:
        err = BudgetExceeded(f"element budget {budget} exhausted at depth {level}")
        err.snapshot = snap
        raise err
    return snap


def entry_set(snapshot: SemigroupSnapshot) -> list:
    seen = set()
    for m in snapshot.elements.values():
        d = m.den
        for a in set(m.num):
            seen.add(Fraction(a, d))
    return sorted(seen)


@dataclass(frozen=True)
class GapReport:
    entries: tuple
    gaps: tuple  # (a, b) open intervals
    truncated: bool = False

    def to_json(self) -> dict:
        return {
            "entries": [fmt(e) for e in self.entries],
            "gaps": [[fmt(a), fmt(b)] for a, b in self.gaps],
            "evidence": "truncated" if self.truncated else "exhaustive",
        }


def gap_report(entries: Sequence, min_gap, truncated: bool = False) -> GapReport:
    """Maximal open subintervals of [0, 1] free of entries and at least ``min_gap`` long.

    0 and 1 bound the ambient interval even when they are not entries.
    """
    entries = sorted({to_rational(e) for e in entries})
    if not entries:
        raise InputError("entry list is empty")
    if entries[0] < 0 or entries[-1] > 1:
        raise OutOfRange("entries must lie in [0, 1]")
    min_gap = to_rational(min_gap)
    points = sorted(set(entries) | {Fraction(0), Fraction(1)})
    gaps = tuple((a, b) for a, b in zip(points, points[1:]) if b - a >= min_gap)
    return GapReport(tuple(entries), gaps, truncated)


@dataclass(frozen=True)
class GapLawCheck:
    x: Fraction
    holds: bool
    counterexample: tuple | None  # (word, entry)
    max_sub_unit: Fraction | None
    truncated: bool

    def to_json(self) -> dict:
        return {
            "x": fmt(self.x),
            "holds": self.holds,
            "counterexample": (
                {"word": list(self.counterexample[0]), "entry": fmt(self.counterexample[1])}
                if self.counterexample else None
            ),
            "max_sub_unit_entry": fmt(self.max_sub_unit) if self.max_sub_unit is not None else None,
            "evidence": "truncated" if self.truncated else "exhaustive",
        }


def sub_unit_ceiling(gens: GeneratorSet) -> Fraction:
    """Largest generator entry strictly below 1.

    Undefined when every generator is a permutation matrix: products then
    only ever hold 0 and 1.
    """
    if all(m.is_permutation() for m in gens.values()):
        raise NoSubUnitEntry("every generator is a permutation matrix")
    return max(e for m in gens.values() for e in set(m.entries()) if e < 1)


def entry_gap_law_check(gens: GeneratorSet, depth: int, budget: int = DEFAULT_BUDGET) -> GapLawCheck:
    """Check that every generated entry is 1 or at most the largest generator entry below 1."""
    x = sub_unit_ceiling(gens)
    snap = generate(gens, depth, budget)
    worst = None
    counter = None
    for key, m in snap.elements.items():
        d = m.den
        for a in m.num:
            if a == d:
                continue
            e = Fraction(a, d)
            if worst is None or e > worst:
                worst = e
            if e > x and counter is None:
                counter = (snap.words[key], e)
    return GapLawCheck(x, counter is None, counter, worst, snap.truncated)


# -- normal form --------------------------------------------------------------

@dataclass(frozen=True)
class NormalForm:
    P: Permutation
    domestic_word: tuple  # DSMatrix letters

    def evaluate(self, n: int) -> DSMatrix:
        acc = self.P.matrix()
        for m in self.domestic_word:
            acc = multiply(acc, m)
        return acc

    def to_json(self) -> dict:
        return {"P": self.P.to_one_based(), "domestic_word": [m.to_json() for m in self.domestic_word]}


def normal_form(gens: GeneratorSet, word: Sequence[str]) -> NormalForm:
    """Rewrite ``M_1 ... M_k`` as ``P`` times a word of domestic conjugates.

    With ``M_i = P_i M_i'`` and ``Q_i = P_{i+1} ... P_k``, the word equals
    ``(P_1 ... P_k) * prod(Q_i^-1 M_i' Q_i)``. Letters equal to the
    identity are dropped.
    """
    if not word:
        raise InputError("word must be nonempty")
    factors = []
    for name in word:
        f = factor_permutation(gens[name], compute_eps=False)
        if f.P.matrix() @ f.Mprime != gens[name]:
            raise FactorizationFailed(f"P M' does not reproduce generator {name!r}")
        factors.append(f)
    n = gens.n
    suffix = Permutation.identity(n)
    letters = []
    for f in reversed(factors):
        c = f.Mprime.conjugate(suffix)
        if not c.is_identity():
            letters.append(c)
        suffix = f.P.compose(suffix)
    letters.reverse()
    return NormalForm(suffix, tuple(letters))


# -- bilinear reduction and entry embedding -------------------------------------

def complete_to_ds(p: SimplexVector) -> DSMatrix:
    """Doubly stochastic matrix with first column ``p``; the rest of row i is spread evenly."""
    n = p.n
    if n == 1:
        if p[0] != 1:
            raise DimensionTooSmall("a 1x1 doubly stochastic matrix is [1]")
        return DSMatrix.identity(1)
    rows = [[p[i]] + [(1 - p[i]) / (n - 1)] * (n - 1) for i in range(n)]
    return DSMatrix.from_fractions(rows)


def _fresh_name(taken, base: str) -> str:
    name, k = base, 1
    while name in taken:
        k += 1
        name = f"{base}_{k}"
    return name


def bilinear_reduction(gens: GeneratorSet, p: SimplexVector, q: SimplexVector) -> tuple:
    """Add ``A = complete_to_ds(p)`` and ``B^T`` (``B = complete_to_ds(q)``) to the generators.

    For every word w, ``q^T w p == (B^T w A)[0, 0]``. Returns the augmented
    set together with the names given to ``A`` and ``B^T``.
    """
    if p.n != gens.n or q.n != gens.n:
        raise DimensionMismatch(f"vectors must have dimension {gens.n}")
    a = complete_to_ds(p)
    bt = complete_to_ds(q).transpose()
    a_name = _fresh_name(gens, "A_p")
    bt_name = _fresh_name(set(gens) | {a_name}, "B_q_T")
    return gens.union({a_name: a, bt_name: bt}), a_name, bt_name


def bilinear_value(m: DSMatrix, p: SimplexVector, q: SimplexVector) -> Fraction:
    mp = m.apply(p)
    return sum((qi * x for qi, x in zip(q.coords, mp.coords)), Fraction(0))


def entry_embed(a, n: int) -> DSMatrix:
    """The matrix with [0,0] = a whose other rows/columns are as even as possible."""
    a = to_rational(a)
    if not 0 <= a <= 1:
        raise OutOfRange(f"a must lie in [0, 1], got {a}")
    if n < 2:
        raise OutOfRange("n must be at least 2")
    edge = (1 - a) / (n - 1)
    inner = (1 - edge) / (n - 1)
    rows = [[a] + [edge] * (n - 1)] + [[edge] + [inner] * (n - 1) for _ in range(n - 1)]
    return DSMatrix.from_fractions(rows)


# -- closure containment --------------------------------------------------------

def _core_name(part: Partition) -> str:
    return "avg[" + "|".join(",".join(str(i + 1) for i in b) for b in part.blocks) + "]"


def core_augmented(gens: GeneratorSet) -> GeneratorSet:
    """Generators plus every core averaging not already among them."""
    present = set(gens.values())
    extra = []
    for a in averaging_core(gens):
        if a not in present:
            extra.append((_core_name(support_partition(a)), a))
            present.add(a)
    return gens.union(dict(extra)) if extra else gens


@dataclass(frozen=True)
class ContainmentProbe:
    word: tuple
    power: int
    distance: float
    nearest_word: tuple

    def to_json(self) -> dict:
        return {
            "word": list(self.word),
            "power": self.power,
            "distance": self.distance,
            "nearest_word": list(self.nearest_word),
        }


@dataclass(frozen=True)
class ContainmentReport:
    probes: tuple
    element_count: int
    truncated: bool
    tol: float

    @property
    def within_tol(self) -> bool:
        return all(p.distance <= self.tol for p in self.probes)

    def to_json(self) -> dict:
        return {
            "tol": self.tol,
            "element_count": self.element_count,
            "truncated": self.truncated,
            "probes": [p.to_json() for p in self.probes],
        }


def closure_containment_check(
    gens: GeneratorSet,
    probe_words: Sequence[Sequence[str]],
    power: int | Sequence[int],
    depth: int,
    tol: float = 1e-8,
    budget: int = DEFAULT_BUDGET,
) -> ContainmentReport:
    """Distance from ``(prod w)^power`` to the nearest element of the core-augmented semigroup.

    ``power`` may be a list, giving one probe per (word, power) so that the
    shrinking of the distance can be read off a single report.
    """
    if not probe_words:
        raise InputError("need at least one probe word")
    powers = [power] if isinstance(power, int) else list(power)
    if any(t < 1 for t in powers):
        raise InputError("powers must be positive")
    common_eps(gens)
    snap = generate(core_augmented(gens), depth, budget, strict=True)
    keys = list(snap.elements)
    stack = np.stack([snap.elements[k].to_float() for k in keys])
    probes = []
    for w in probe_words:
        base = gens.evaluate(tuple(w)).to_float()
        for t in powers:
            proxy = np.linalg.matrix_power(base, t)
            dists = np.max(np.abs(stack - proxy), axis=(1, 2))
            k = int(np.argmin(dists))
            probes.append(ContainmentProbe(tuple(w), t, float(dists[k]), snap.words[keys[k]]))
    return ContainmentReport(tuple(probes), len(snap), snap.truncated, tol)
