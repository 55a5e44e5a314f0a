"""Infinite products of domestic matrices and their averaging limits.

Exact predictions live next to a floating-point iteration that checks
them. For a set T of domestic matrices applied infinitely often, the limit
of the right product is the averaging over the partition generated by
``i ~ j  iff  M[i, j] > 0 for some M in T``.
"""

from __future__ import annotations

import itertools
import math
import random
from collections.abc import Iterator, Mapping, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .domestic import DEFAULT_LIMIT, check_eps, common_eps, is_domestic
from .errors import InputError, NonConvergent, NotDomestic, SubsetBudgetExceeded
from .exact import DSMatrix, GeneratorSet, Partition, UnionFind, averaging

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 100_000
MAX_CORE_SUBSETS = 12


def support_partition(m: DSMatrix) -> Partition:
    uf = UnionFind(m.n)
    for i, j in m.support():
        uf.union(i, j)
    return Partition.from_labels([uf.find(i) for i in range(m.n)])


def _require_domestic(tail: Mapping, eps=None, limit: int = DEFAULT_LIMIT):
    if eps is None:
        common_eps(tail, limit)
        return
    for name, m in tail.items():
        ok, pair = is_domestic(m, check_eps(eps, m.n), limit)
        if not ok:
            raise NotDomestic(f"generator {name!r} is not {eps}-domestic", name=name, witness=pair)


def predict_limit_partition(tail: Mapping, eps=None, limit: int = DEFAULT_LIMIT) -> Partition:
    """Partition whose averaging is the limit of any product using exactly ``tail`` infinitely often.

    ``tail`` maps names to matrices. Each matrix must be domestic for a
    common eps (for ``eps`` itself when given).
    """
    _require_domestic(tail, eps, limit)
    n = next(iter(tail.values())).n
    uf = UnionFind(n)
    for m in tail.values():
        for i, j in m.support():
            uf.union(i, j)
    return Partition.from_labels([uf.find(i) for i in range(n)])


# -- schedules ----------------------------------------------------------------

@dataclass(frozen=True)
class ProductSchedule:
    """Which generator multiplies the partial product on the right at each step.

    ``rule`` is ``"round-robin"``, ``"word"`` (cycle ``word`` forever) or
    ``"random"`` (uniform choice seeded by ``seed``).
    """

    generators: GeneratorSet
    rule: str = "round-robin"
    word: tuple = ()
    seed: int = 0

    def __post_init__(self):
        if self.rule not in ("round-robin", "word", "random"):
            raise InputError(f"unknown schedule rule {self.rule!r}")
        if self.rule == "word":
            if not self.word:
                raise InputError("word schedule needs a nonempty word")
            for w in self.word:
                self.generators[w]

    def recurring(self) -> list:
        """Names used infinitely often, in generator order."""
        if self.rule == "word":
            letters = set(self.word)
            return [k for k in self.generators.names if k in letters]
        return self.generators.names

    def letters(self) -> Iterator[str]:
        if self.rule == "round-robin":
            return itertools.cycle(self.generators.names)
        if self.rule == "word":
            return itertools.cycle(self.word)
        rng = random.Random(self.seed)
        names = self.generators.names
        return (rng.choice(names) for _ in itertools.count())


@dataclass
class LimitReport:
    value: np.ndarray
    iterations: int
    residual: float
    converged: bool = True
    predicted_partition: Partition | None = None
    matched_averaging: Partition | None = None
    match_error: float | None = None
    previous: np.ndarray | None = field(default=None, repr=False)

    def to_json(self) -> dict:
        return {
            "converged": self.converged,
            "iterations": self.iterations,
            "residual": self.residual,
            "matched_partition": self.matched_averaging.to_one_based() if self.matched_averaging else None,
            "match_error": self.match_error,
            "predicted_partition": (
                self.predicted_partition.to_one_based() if self.predicted_partition else None
            ),
            "value_approx": self.value.tolist(),
        }


def _linf(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.max(np.abs(a - b)))


def nearest_averaging(value: np.ndarray, tol: float) -> tuple:
    """Read a partition off the entries above ``sqrt(tol)`` and measure the distance to its averaging."""
    n = value.shape[0]
    cut = math.sqrt(tol)
    uf = UnionFind(n)
    for i, j in zip(*np.nonzero(value > cut)):
        uf.union(int(i), int(j))
    part = Partition.from_labels([uf.find(i) for i in range(n)])
    return part, _linf(value, averaging(part).to_float())


def iterate_product(
    schedule: ProductSchedule,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> LimitReport:
    """Right-multiply generators onto the partial product until it settles.

    Stops once the successive difference (max abs entry) stays at or below
    ``tol`` over a window of at least ``n`` consecutive steps that also
    applies every recurring generator; a window that skips a generator can
    sit on an idempotent plateau without having converged.
    Raises NonConvergent after ``max_iter`` factors.
    """
    if not tol > 0:
        raise InputError("tol must be positive")
    if max_iter < 1:
        raise InputError("max_iter must be at least 1")
    gens = schedule.generators
    n = gens.n
    mats = {k: gens[k].to_float() for k in gens}
    recurring = set(schedule.recurring())
    letters = schedule.letters()

    prod = mats[next(letters)]
    prev = None
    window: dict = {}  # letter -> step of its latest application in the current quiet run
    quiet = 0
    residual = math.inf
    steps = 1
    while steps < max_iter:
        name = next(letters)
        nxt = prod @ mats[name]
        steps += 1
        residual = _linf(nxt, prod)
        prev, prod = prod, nxt
        if residual <= tol:
            quiet += 1
            window[name] = steps
            if quiet >= n and recurring.issubset(window):
                break
        else:
            quiet = 0
            window.clear()
    else:
        err = NonConvergent(
            f"no convergence within {max_iter} factors (last step moved {residual:.3g})",
        )
        err.report = LimitReport(prod, steps, residual, converged=False, previous=prev)
        raise err

    report = LimitReport(prod, steps, residual, previous=prev)
    try:
        report.predicted_partition = predict_limit_partition(gens.subset(schedule.recurring()))
    except NotDomestic:
        report.predicted_partition = None
    part, err = nearest_averaging(prod, tol)
    if err <= math.sqrt(tol) and report.predicted_partition in (None, part):
        report.matched_averaging = part
        report.match_error = err
    return report


# -- convergence cores --------------------------------------------------------

@dataclass(frozen=True)
class SubsetCheck:
    names: tuple
    predicted: Partition
    distance: float
    iterations: int
    ok: bool

    def to_json(self) -> dict:
        return {
            "subset": list(self.names),
            "predicted_partition": self.predicted.to_one_based(),
            "distance": self.distance,
            "iterations": self.iterations,
            "ok": self.ok,
        }


@dataclass(frozen=True)
class CoreReport:
    subsets: tuple
    ok: bool

    def to_json(self) -> dict:
        return {"ok": self.ok, "subsets": [s.to_json() for s in self.subsets]}


def _check_subset(gens: GeneratorSet, names: tuple, tol: float, match_tol: float, max_iter: int):
    sub = gens.subset(names)
    predicted = predict_limit_partition(sub)
    rep = iterate_product(ProductSchedule(sub, "round-robin"), tol, max_iter)
    dist = _linf(rep.value, averaging(predicted).to_float())
    return SubsetCheck(names, predicted, dist, rep.iterations, dist <= match_tol)


def verify_convergence_core(
    gens: GeneratorSet,
    tol: float = DEFAULT_TOL,
    match_tol: float = 1e-8,
    max_iter: int = DEFAULT_MAX_ITER,
    workers: int = 1,
) -> CoreReport:
    """Round-robin every nonempty subset and compare against its predicted averaging.

    Subsets are listed by size, then by generator order.
    """
    if len(gens) > MAX_CORE_SUBSETS:
        raise SubsetBudgetExceeded(
            f"{len(gens)} generators means {2 ** len(gens) - 1} subsets; the cap is {MAX_CORE_SUBSETS} generators"
        )
    common_eps(gens)
    subsets = [c for r in range(1, len(gens) + 1) for c in itertools.combinations(gens.names, r)]
    args = [(gens, s, tol, match_tol, max_iter) for s in subsets]
    if workers > 1 and len(subsets) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            checks = list(ex.map(_check_subset, *zip(*args)))
    else:
        checks = [_check_subset(*a) for a in args]
    return CoreReport(tuple(checks), all(c.ok for c in checks))


def averaging_core(gens: Mapping) -> list:
    """Least set of averagings closed under taking limits of subsets.

    The limit of a subset is the averaging over the join of the support
    partitions of its members, and an averaging's support partition is its
    own partition, so the core is reached by closing the generators'
    support partitions under pairwise joins. Returned sorted by partition.
    """
    common_eps(gens)
    parts = {support_partition(m) for m in gens.values()}
    frontier = set(parts)
    while frontier:
        new = set()
        for a in frontier:
            for b in parts:
                j = a.join(b)
                if j not in parts:
                    new.add(j)
        parts |= new
        frontier = new
    return [averaging(p) for p in sorted(parts, key=lambda p: p.blocks)]


def core_partitions(gens: Mapping) -> list:
    return [support_partition(a) for a in averaging_core(gens)]


def absorption_gap(report: LimitReport, m: DSMatrix) -> float:
    """|A S - A| for the numeric limit A; vanishes for every recurring S."""
    a = report.value
    return _linf(a @ m.to_float(), a)


def anti_cycling_pairs(elements: Sequence[DSMatrix], connectors: Sequence[DSMatrix]) -> list:
    """Pairs A != B among ``elements`` with A S = B and B T = A for connectors S, T.

    A convergent semigroup has none; used as an exhaustive desk-scale check.
    """
    index = {e: k for k, e in enumerate(elements)}
    succ: dict = {k: set() for k in range(len(elements))}
    for k, a in enumerate(elements):
        for s in connectors:
            b = a @ s
            if b in index and index[b] != k:
                succ[k].add(index[b])
    return [(a, b) for a in succ for b in succ[a] if a < b and a in succ[b]]
