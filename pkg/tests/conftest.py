import random
from fractions import Fraction

import pytest
from hypothesis import settings
from hypothesis import strategies as st

from dstoch.exact import DSMatrix, SimplexVector, averaging_over

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

F = Fraction


def A(n, *blocks):
    """Averaging over the given 1-based blocks; other indices fixed."""
    return averaging_over(n, *blocks)


def naive_mul(a, b):
    """Textbook triple loop over Fractions; independent of the integer fast path."""
    n = len(a)
    return [[sum((a[i][k] * b[k][j] for k in range(n)), F(0)) for j in range(n)] for i in range(n)]


@st.composite
def ds_matrices(draw, n=None, min_n=1, max_n=5, max_den=12):
    """Convex combinations of permutation matrices with weights k/D."""
    if n is None:
        n = draw(st.integers(min_n, max_n))
    den = draw(st.integers(1, max_den))
    terms = draw(st.integers(1, min(den, n + 2)))
    cuts = sorted(draw(st.lists(st.integers(1, den - 1), min_size=terms - 1, max_size=terms - 1,
                                unique=True))) if terms > 1 and den > 1 else []
    weights = [b - a for a, b in zip([0] + cuts, cuts + [den])]
    num = [0] * (n * n)
    for w in weights:
        perm = draw(st.permutations(range(n)))
        for j, i in enumerate(perm):
            num[i * n + j] += w
    return DSMatrix._from_ints(n, num, den)


@st.composite
def simplex_vectors(draw, n, max_den=12):
    den = draw(st.integers(1, max_den))
    counts = [0] * n
    for slot in draw(st.lists(st.integers(0, n - 1), min_size=den, max_size=den)):
        counts[slot] += 1
    return SimplexVector(tuple(F(c, den) for c in counts))


@pytest.fixture
def rng():
    return random.Random(20261019)


# -- acceptance summary -------------------------------------------------------

_ACCEPTANCE = []


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        label = dict(report.user_properties).get("criterion", report.nodeid.split("::")[-1])
        _ACCEPTANCE.append((label, report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label, outcome in _ACCEPTANCE:
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{status}  {label}")
