import numpy as np
import pytest
from hypothesis import given

from cspr.counting import (
    K_INDEX,
    PAIRS,
    count_lag_pairs,
    count_pairs,
    f_full,
    f_vector,
    lambda_matrix,
    pair_index,
)
from cspr.sequence_io import Sequence, reverse_complement

from conftest import dna, random_sequence
from oracles import COMP, naive_lag_counts, naive_pair_counts


def circ(bases):
    return Sequence("x", bases, "circular")


class TestCountPairs:
    def test_circular_acgt(self):
        pc = count_pairs(circ("ACGT"))
        assert pc.n == 4
        assert {p: pc[p] for p in PAIRS if pc[p]} == {"AC": 1, "CG": 1, "GT": 1, "TA": 1}

    def test_constant(self):
        pc = count_pairs(circ("AAAA"))
        assert pc["AA"] == 4 and pc.n == 4

    def test_linear_acgt(self):
        pc = count_pairs(Sequence("x", "ACGT", "linear"))
        assert pc.n == 3
        assert {p: pc[p] for p in PAIRS if pc[p]} == {"AC": 1, "CG": 1, "GT": 1}

    @given(dna)
    def test_total_and_oracle(self, bases):
        pc = count_pairs(circ(bases))
        n, naive = naive_pair_counts(bases)
        assert pc.counts.sum() == pc.n == n
        assert all(pc[p] == naive[p] for p in PAIRS)

    @given(dna)
    def test_linear_oracle(self, bases):
        pc = count_pairs(Sequence("x", bases, "linear"))
        n, naive = naive_pair_counts(bases, circular=False)
        assert pc.n == n == len(bases) - 1
        assert all(pc[p] == naive[p] for p in PAIRS)


class TestCountLagPairs:
    def test_acgt_lag2(self):
        lp = count_lag_pairs(circ("ACGT"), 2)
        nz = {(PAIRS[i], PAIRS[j]): int(lp.counts[i, j]) for i, j in zip(*np.nonzero(lp.counts))}
        assert nz == {("AC", "GT"): 1, ("CG", "TA"): 1, ("GT", "AC"): 1, ("TA", "CG"): 1}

    def test_constant_lag1(self):
        assert count_lag_pairs(circ("AAAA"), 1)[("AA", "AA")] == 4

    @given(dna)
    def test_lag_zero_is_diagonal(self, bases):
        s = circ(bases)
        lp = count_lag_pairs(s, 0)
        assert np.array_equal(lp.counts, np.diag(count_pairs(s).counts))

    @given(dna)
    def test_marginals(self, bases):
        s = circ(bases)
        pc = count_pairs(s)
        for i in range(len(bases)):
            lp = count_lag_pairs(s, i)
            assert lp.counts.sum() == len(bases)
            assert np.array_equal(lp.counts.sum(axis=1), pc.counts)

    @given(dna)
    def test_oracle_every_lag(self, bases):
        s = circ(bases)
        for i in range(len(bases) + 2):
            lp = count_lag_pairs(s, i)
            naive = naive_lag_counts(bases, i)
            assert sum(naive.values()) == lp.counts.sum()
            assert all(lp[key] == v for key, v in naive.items())

    def test_linear_bounds(self):
        s = Sequence("x", "ACGTA", "linear")
        assert count_lag_pairs(s, 3).counts.sum() == 1
        with pytest.raises(ValueError):
            count_lag_pairs(s, 4)
        with pytest.raises(ValueError):
            count_lag_pairs(circ("ACGT"), -1)

    def test_random_long_against_oracle(self):
        s = random_sequence(2000, seed=3)
        for lag in (1, 7, 1999):
            naive = naive_lag_counts(s.bases, lag)
            lp = count_lag_pairs(s, lag)
            assert all(lp[key] == v for key, v in naive.items())


class TestFVector:
    def test_aacgt(self):
        f = f_vector(count_pairs(circ("AACGT")))
        assert f.values.tolist() == [0.2, 0.0, 0.0, 0.0, 0.0]

    def test_acgt_zero(self):
        assert f_vector(count_pairs(circ("ACGT"))).values.tolist() == [0.0] * 5

    def test_as_dict_order(self):
        assert list(f_vector(count_pairs(circ("ACGT"))).as_dict()) == ["AA", "AC", "AG", "CA", "CC"]

    @given(dna)
    def test_reverse_complement_negates(self, bases):
        s = circ(bases)
        f = f_vector(count_pairs(s)).values
        g = f_vector(count_pairs(reverse_complement(s))).values
        assert np.array_equal(g, -f)

    @given(dna)
    def test_full_structure(self, bases):
        f = f_full(count_pairs(circ(bases)))
        for a in range(4):
            assert f[a, 3 - a] == 0
            for b in range(4):
                assert f[a, b] == -f[3 - b, 3 - a]
        # circular counts balance in- and out-flow of each base
        assert np.allclose(f.sum(axis=1), f.sum(axis=0), atol=1e-15)

    @given(dna)
    def test_lambda_identity(self, bases):
        pc = count_pairs(circ(bases))
        f = f_vector(pc).values
        assert np.allclose(f, lambda_matrix() @ pc.counts / pc.n, rtol=1e-15, atol=0)

    @given(dna)
    def test_bounds(self, bases):
        f = f_vector(count_pairs(circ(bases))).values
        assert np.all(np.abs(f) <= 1)


class TestLambda:
    def test_rows(self):
        lam = lambda_matrix()
        assert lam[0, pair_index("AA")] == 1 and lam[0, pair_index("TT")] == -1
        assert lam[1, pair_index("AC")] == 1 and lam[1, pair_index("GT")] == -1
        assert np.all((lam == 1).sum(axis=1) == 1)
        assert np.all((lam == -1).sum(axis=1) == 1)
        assert np.linalg.matrix_rank(lam) == 5

    def test_gram(self):
        lam = lambda_matrix()
        assert np.array_equal(lam @ lam.T, 2 * np.eye(5))

    def test_definition(self):
        lam = lambda_matrix()
        for r, (a, b) in enumerate(K_INDEX):
            assert b != COMP[a]
            for c_idx, cd in enumerate(PAIRS):
                c, d = cd
                expected = 1 if (a, b) == (c, d) else (-1 if (a, b) == (COMP[d], COMP[c]) else 0)
                assert lam[r, c_idx] == expected
