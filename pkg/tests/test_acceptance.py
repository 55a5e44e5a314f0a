"""Acceptance gate: one test per criterion, each at its stated size and tolerance.

Run ``pytest tests/test_acceptance.py`` to get a PASS/FAIL line per
criterion in the terminal summary. Quantities are recomputed through an
independent Fraction route wherever that is cheap, so the package is
never the only witness of its own correctness.
"""

import random
import time
from fractions import Fraction as F

import numpy as np
import pytest

from conftest import A, naive_mul
from dstoch.convergence import ProductSchedule, iterate_product, verify_convergence_core
from dstoch.domestic import _margin_exact, brute_force_margin, contraction_diagnostic, domesticity_margin
from dstoch.exact import GeneratorSet, Partition, averaging
from dstoch.explorer import bilinear_reduction, closure_containment_check, entry_embed, entry_gap_law_check
from dstoch.factorization import birkhoff_decompose, factor_permutation, support_components, tight_pairs, tight_pairs_from_components
from dstoch.majorization import sandwich_bound_check
from dstoch.sampling import random_domestic, random_ds, random_permutation, random_simplex


@pytest.fixture
def criterion(record_property):
    def label(text):
        record_property("criterion", text)

    return label


def sup(a, b):
    return max(abs(x - y) for x, y in zip(a, b))


def mat_vec(rows, p):
    return [sum((r[j] * p[j] for j in range(len(p))), F(0)) for r in rows]


def test_c01_entry_gap_law(criterion):
    criterion("C1  entry-gap law: 200 random sets, depth 6, no entry in (x, 1)")
    rng = random.Random(101)
    start = time.perf_counter()
    failures, checked = [], 0
    while checked < 200:
        n = rng.randint(2, 5)
        gens = GeneratorSet.of(*(random_ds(rng, n, max_den=12) for _ in range(rng.randint(2, 4))))
        if all(m.is_permutation() for m in gens.values()):
            continue
        rep = entry_gap_law_check(gens, depth=6, budget=100_000)
        # independent rescan of the generator entries for x
        x = max(e for m in gens.values() for e in m.entries() if e < 1)
        assert rep.x == x
        if not rep.holds:
            failures.append(rep.counterexample)
        checked += 1
    elapsed = time.perf_counter() - start
    assert failures == []
    assert elapsed < 60, f"{elapsed:.1f}s"


def test_c02_averaging_limits(criterion):
    criterion("C2  averaging limits: n=4 chain reaches all-1/4 within 1e-10; 7 subsets within 1e-8")
    start = time.perf_counter()
    gens = GeneratorSet.of(A(4, [1, 2]), A(4, [2, 3]), A(4, [3, 4]))
    rep = iterate_product(ProductSchedule(gens, "round-robin"), tol=1e-10, max_iter=500)
    assert rep.converged and rep.iterations <= 500
    assert np.max(np.abs(rep.value - 0.25)) <= 1e-10
    assert rep.matched_averaging == Partition.from_one_based([[1, 2, 3, 4]])
    core = verify_convergence_core(gens, tol=1e-10, match_tol=1e-8)
    assert len(core.subsets) == 7
    assert all(c.distance <= 1e-8 for c in core.subsets)
    # the predicted partitions, derived by hand from which blocks chain together
    expected = {
        ("M1",): [[1, 2], [3], [4]], ("M2",): [[1], [2, 3], [4]], ("M3",): [[1], [2], [3, 4]],
        ("M1", "M2"): [[1, 2, 3], [4]], ("M1", "M3"): [[1, 2], [3, 4]], ("M2", "M3"): [[1], [2, 3, 4]],
        ("M1", "M2", "M3"): [[1, 2, 3, 4]],
    }
    assert {c.names: c.predicted.to_one_based() for c in core.subsets} == expected
    assert time.perf_counter() - start < 5


def test_c03_domestic_closure(criterion):
    criterion("C3  domestic closure: 500 pairs, n <= 8, product margin <= 1 - 1/(2n)")
    rng = random.Random(303)
    start = time.perf_counter()
    violations = 0
    for _ in range(500):
        n = rng.randint(2, 8)
        eps = F(1, 2 * n)
        a, b = random_domestic(rng, n, eps), random_domestic(rng, n, eps)
        assert domesticity_margin(a).margin <= 1 - eps and domesticity_margin(b).margin <= 1 - eps
        if domesticity_margin(a @ b).margin > 1 - eps:
            violations += 1
    assert violations == 0
    assert time.perf_counter() - start < 120


def test_c04_contraction_bound(criterion):
    criterion("C4  contraction bound: 1000 (M, p), |p - Mp| <= 2n/eps |sorted gap|")
    rng = random.Random(404)
    violations = 0
    for _ in range(1000):
        n = rng.randint(2, 8)
        m = random_domestic(rng, n)
        eps = min(F(1, 2 * n), 1 - domesticity_margin(m).margin)
        p = random_simplex(rng, n)
        q = mat_vec(m.rows, p.coords)
        lhs = sup(p.coords, q)
        gap = sup(sorted(p.coords, reverse=True), sorted(q, reverse=True))
        assert contraction_diagnostic(m, p, eps) == (lhs, gap)
        if lhs > 2 * n / eps * gap:
            violations += 1
    assert violations == 0


def test_c05_sandwich_bound(criterion):
    criterion("C5  sandwich bound: 1000 chains p > Mp > M'Mp hold the sandwich bound")
    rng = random.Random(505)
    violations = 0
    for _ in range(1000):
        n = rng.randint(1, 8)
        p = random_simplex(rng, n)
        m1, m2 = random_ds(rng, n), random_ds(rng, n)
        q = m1.apply(p)
        r = m2.apply(q)
        check = sandwich_bound_check(p, q, r)
        ps, qs, rs = (sorted(v.coords, reverse=True) for v in (p, q, r))
        assert (check.lhs, check.rhs) == (sup(ps, qs), 2 * n * sup(ps, rs))
        if not check.holds:
            violations += 1
    assert violations == 0


def test_c06_factorization_round_trip(criterion):
    criterion("C6  factorization: 500 P * domestic round trips; components match oracle for n <= 6")
    rng = random.Random(606)
    failures = 0
    for _ in range(500):
        n = rng.randint(1, 8)
        p = random_permutation(rng, n)
        m = p.matrix() @ random_domestic(rng, n) if n > 1 else p.matrix()
        f = factor_permutation(m)
        ok = [list(r) for r in m.rows] == naive_mul(f.P.matrix().rows, f.Mprime.rows)
        ok = ok and domesticity_margin(f.Mprime).margin <= 1 - f.eps
        if n <= 6:
            ok = ok and tight_pairs_from_components(support_components(m)) == tight_pairs(m)
        failures += not ok
    assert failures == 0


def test_c07_birkhoff(criterion):
    criterion("C7  Birkhoff: 500 matrices, n <= 8, exact with <= n^2 - 2n + 2 terms")
    rng = random.Random(707)
    failures = 0
    for _ in range(500):
        n = rng.randint(1, 8)
        m = random_ds(rng, n, terms=rng.randint(1, 2 * n + 2))
        d = birkhoff_decompose(m)
        acc = [[F(0)] * n for _ in range(n)]
        for c, perm in d.terms:
            for j in range(n):
                acc[perm.images[j]][j] += c
        ok = acc == [list(r) for r in m.rows]
        ok = ok and sum(c for c, _ in d.terms) == 1 and all(c > 0 for c, _ in d.terms)
        ok = ok and len(d.terms) <= n * n - 2 * n + 2
        failures += not ok
    assert failures == 0


def test_c08_closure_containment(criterion):
    criterion("C8  closure containment: distance <= 1e-8 at t=30 and smaller than at t=5")
    start = time.perf_counter()
    gens = GeneratorSet.of(A(3, [1, 2]), A(3, [2, 3]))
    rep = closure_containment_check(gens, [("M1", "M2")], [5, 30], depth=3, tol=1e-8)
    d5, d30 = (p.distance for p in rep.probes)
    assert d30 <= 1e-8
    assert d30 < d5
    # the proxy approaches the uniform averaging, which is in the augmented semigroup
    proxy = np.linalg.matrix_power(A(3, [1, 2]).to_float() @ A(3, [2, 3]).to_float(), 30)
    assert np.max(np.abs(proxy - 1 / 3)) <= 1e-8
    assert time.perf_counter() - start < 5


def test_c09_entry_embed_identity(criterion):
    criterion("C9  M_a identity: 200 random M, entry_embed(M[1,1]) = A' M A'")
    rng = random.Random(909)
    failures = 0
    for _ in range(200):
        n = rng.randint(2, 6)
        m = random_ds(rng, n)
        a1 = averaging(Partition.from_one_based([[1], list(range(2, n + 1))]))
        sandwich = naive_mul(naive_mul(a1.rows, m.rows), a1.rows)
        failures += [list(r) for r in entry_embed(m[0, 0], n).rows] != sandwich
    assert failures == 0


def test_c10_bilinear_reduction(criterion):
    criterion("C10 bilinear reduction: 100 random (M, p, q, word), q^T w p = (B^T w A)[1,1]")
    rng = random.Random(1010)
    failures = 0
    for _ in range(100):
        n = rng.randint(1, 6)
        gens = GeneratorSet.of(*(random_ds(rng, n) for _ in range(rng.randint(1, 3))))
        p, q = random_simplex(rng, n), random_simplex(rng, n)
        word = tuple(rng.choice(gens.names) for _ in range(rng.randint(1, 6)))
        acc = [list(r) for r in gens[word[0]].rows]
        for name in word[1:]:
            acc = naive_mul(acc, gens[name].rows)
        direct = sum((qi * x for qi, x in zip(q.coords, mat_vec(acc, p.coords))), F(0))
        aug, a_name, bt_name = bilinear_reduction(gens, p, q)
        failures += aug.evaluate((bt_name,) + word + (a_name,))[0, 0] != direct
    assert failures == 0


def test_c11_margin_performance(criterion):
    criterion("C11 margin: n=12 under 5 s; exact agreement with brute force for n <= 6")
    rng = random.Random(1111)
    m = random_ds(rng, 12, terms=8)
    start = time.perf_counter()
    _margin_exact.__wrapped__(m, 1)  # bypass the cache so the full scan is timed
    elapsed = time.perf_counter() - start
    assert elapsed < 5, f"{elapsed:.2f}s"
    mismatches = 0
    for _ in range(300):
        n = rng.randint(1, 6)
        m = random_ds(rng, n, terms=rng.randint(1, n + 2))
        fast, slow = domesticity_margin(m), brute_force_margin(m)
        mismatches += fast.margin != slow.margin
    assert mismatches == 0
