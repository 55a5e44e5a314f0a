from fractions import Fraction as F
from itertools import accumulate

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import ds_matrices, simplex_vectors
from dstoch.errors import ChainNotMajorized, DimensionMismatch, NotMajorized
from dstoch.exact import DSMatrix, Permutation, SimplexVector, ds_from_rows
from dstoch.majorization import majorization_witness, majorizes, sandwich_bound_check, sort_desc


def V(*coords):
    return SimplexVector(tuple(F(c) for c in coords))


def prefix_oracle(p, q):
    """Prefix-sum criterion written out independently (sorted() descending)."""
    ps = list(accumulate(sorted(p.coords, reverse=True)))
    qs = list(accumulate(sorted(q.coords, reverse=True)))
    return all(a >= b for a, b in zip(ps, qs))


class TestSortDesc:
    def test_constant(self):
        v = V("1/3", "1/3", "1/3")
        assert sort_desc(v) == v

    def test_basis(self):
        assert sort_desc(V(0, 1, 0)) == V(1, 0, 0)

    def test_mixed(self):
        assert sort_desc(V("1/6", "1/2", "1/3")) == V("1/2", "1/3", "1/6")

    @given(st.data())
    def test_idempotent_and_permutation_invariant(self, data):
        n = data.draw(st.integers(1, 6))
        p = data.draw(simplex_vectors(n))
        perm = Permutation(tuple(data.draw(st.permutations(range(n)))))
        s = sort_desc(p)
        assert sort_desc(s) == s
        assert sort_desc(p.permuted(perm)) == s
        assert sorted(p.coords) == sorted(s.coords)


class TestMajorizes:
    def test_extreme_point(self):
        assert majorizes(V(1, 0, 0), V("1/3", "1/3", "1/3"))

    def test_reflexive(self):
        p = V("1/2", "1/6", "1/3")
        assert majorizes(p, p)

    def test_prefix_failure(self):
        assert not majorizes(V("1/2", "1/2", 0), V("2/3", "1/6", "1/6"))

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            majorizes(V(1, 0), V(1, 0, 0))

    @given(st.data())
    def test_soundness(self, data):
        m = data.draw(ds_matrices())
        p = data.draw(simplex_vectors(m.n))
        assert majorizes(p, m.apply(p))

    @given(st.data())
    def test_matches_oracle(self, data):
        n = data.draw(st.integers(1, 5))
        p, q = data.draw(simplex_vectors(n)), data.draw(simplex_vectors(n))
        assert majorizes(p, q) == prefix_oracle(p, q)


class TestWitness:
    def test_equal_vectors_identity(self):
        p = V("1/2", "1/3", "1/6")
        w = majorization_witness(p, p)
        assert w.M == DSMatrix.identity(3)
        assert w.steps == 0

    def test_single_t_transform(self):
        # 5/8 = lam * 3/4 + (1 - lam) * 1/4  =>  lam = 3/4
        lam = (F(5, 8) - F(1, 4)) / (F(3, 4) - F(1, 4))
        assert lam == F(3, 4)
        w = majorization_witness(V("3/4", "1/4"), V("5/8", "3/8"))
        assert w.M == ds_from_rows([["3/4", "1/4"], ["1/4", "3/4"]])
        assert w.steps == 1

    def test_full_mix(self):
        w = majorization_witness(V(1, 0), V("1/2", "1/2"))
        assert w.M == DSMatrix.uniform(2)

    def test_not_majorized(self):
        with pytest.raises(NotMajorized):
            majorization_witness(V("1/2", "1/2", 0), V("2/3", "1/6", "1/6"))

    @given(st.data())
    def test_completeness(self, data):
        m = data.draw(ds_matrices(min_n=2, max_n=6))
        p = data.draw(simplex_vectors(m.n))
        q = m.apply(p)
        w = majorization_witness(p, q)
        assert w.M.apply(p) == q
        assert w.steps <= m.n - 1
        assert ds_from_rows(w.M.rows) == w.M

    def test_unsorted_inputs_with_ties(self):
        p = V("1/6", "1/3", "1/6", "1/3")
        q = V("1/4", "1/4", "1/4", "1/4")
        assert majorization_witness(p, q).M.apply(p) == q


class TestSandwich:
    def test_degenerate(self):
        p = V("1/2", "1/2")
        c = sandwich_bound_check(p, p, p)
        assert (c.lhs, c.rhs, c.holds) == (0, 0, True)

    def test_two_dim(self):
        c = sandwich_bound_check(V(1, 0), V("3/4", "1/4"), V("1/2", "1/2"))
        assert (c.lhs, c.rhs, c.holds) == (F(1, 4), F(2), True)

    def test_three_dim(self):
        c = sandwich_bound_check(V(1, 0, 0), V("1/2", "1/2", 0), V("1/3", "1/3", "1/3"))
        assert (c.lhs, c.rhs, c.holds) == (F(1, 2), F(4), True)

    def test_broken_chain(self):
        with pytest.raises(ChainNotMajorized):
            sandwich_bound_check(V("1/2", "1/2"), V(1, 0), V("1/2", "1/2"))

    @given(st.data())
    def test_random_chains(self, data):
        n = data.draw(st.integers(1, 6))
        m1, m2 = data.draw(ds_matrices(n=n)), data.draw(ds_matrices(n=n))
        p = data.draw(simplex_vectors(n))
        q = m1.apply(p)
        assert sandwich_bound_check(p, q, m2.apply(q)).holds
