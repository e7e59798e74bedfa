import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cspsparse.demos import CUT, FULL, R1
from cspsparse.instance import (Instance, clause_values, complete, random_instance,
                                sat_value)
from cspsparse.relation_core import RelationError, ValuedRelation, max_and_arity
from cspsparse.sparsify import iid_sample
from cspsparse.verify import (BudgetError, codeword_census, exhaustive_verify,
                              fit_census_exponent, min_sat_profile, part_invariant,
                              profile_value, sat_table, tight_coverage_statistic,
                              value_separation, witness_family_rpartite,
                              witness_family_uniform)

from . import oracles
from .test_relation_core import valued_relations

AND2 = ValuedRelation.from_strings(2, ["000", "001"])
WT1 = ValuedRelation.from_strings(2, ["001", "010", "100"])
DECOMP = ValuedRelation.from_strings(2, ["00", "01"])


# -- exhaustive verification --------------------------------------------------------

@pytest.mark.parametrize("R, C", [
    (CUT, complete("uniform", 6, 2)),
    (R1, random_instance("uniform", 7, 2, 25, seed=3)),
    (AND2, complete("rpartite", 3, 3)),
])
def test_identity_has_zero_deviation(R, C):
    rep = exhaustive_verify(R, C, C, Fraction(1, 100))
    assert rep.max_deviation == 0 and rep.zero_violations == 0 and rep.passed


def test_doubled_weights_deviate_by_exactly_one():
    C = random_instance("uniform", 6, 2, 20, seed=1)
    rep = exhaustive_verify(CUT, C, C.scaled(2), Fraction(1, 2))
    assert rep.max_deviation == 1 and not rep.passed
    rep = exhaustive_verify(CUT, C, C.scaled(2), Fraction(1))
    assert rep.passed


def test_argmax_attains_the_deviation():
    C = random_instance("uniform", 6, 2, 30, seed=2)
    S = iid_sample(C, 8, seed=5)
    rep = exhaustive_verify(R1, C, S, Fraction(1, 2))
    a, b = sat_value(R1, C, rep.argmax), sat_value(R1, S, rep.argmax)
    assert rep.zero_violations or abs(b - a) / a == rep.max_deviation


def test_zero_violation_detected():
    C = complete("uniform", 4, 2)
    S = Instance("uniform", 4, 2, [[0, 1]], [12])
    rep = exhaustive_verify(CUT, C, S, Fraction(1, 2))
    assert rep.zero_violations > 0 and not rep.passed


def test_budget_is_enforced():
    with pytest.raises(BudgetError):
        exhaustive_verify(CUT, complete("uniform", 12, 2), complete("uniform", 12, 2),
                          Fraction(1, 2), budget=1000)


def test_mismatched_instances_rejected():
    with pytest.raises(ValueError):
        exhaustive_verify(CUT, complete("uniform", 5, 2), complete("uniform", 6, 2), 0.5)


@pytest.mark.parametrize("threads", [1, 2, 5])
def test_result_independent_of_threads(threads):
    C = complete("uniform", 14, 2)
    S = iid_sample(C, 500, seed=3)
    ref = exhaustive_verify(CUT, C, S, Fraction(1, 4), threads=1)
    assert exhaustive_verify(CUT, C, S, Fraction(1, 4), threads=threads) == ref


@settings(max_examples=30, deadline=None)
@given(valued_relations(max_r=2), st.integers(2, 6), st.integers(1, 15), st.integers(0, 50))
def test_sat_table_matches_brute_force(R, n, m, seed):
    if n < R.r:
        return
    C = random_instance("uniform", n, R.r, m, seed)
    T = oracles.table(R)
    vals = sat_table(R, C)
    for idx in (0, len(vals) // 3, len(vals) - 1):
        psi = [(idx // R.q ** v) % R.q for v in range(n)]
        assert Fraction(int(vals[idx]), C.weight_den) == oracles.sat_instance(
            T, C.clauses, C.weights, psi)


# -- witness families ---------------------------------------------------------------

def test_cut_uniform_witness():
    fam = witness_family_uniform(CUT, 4)
    assert (fam.size, fam.c, fam.max_shared, fam.implied_bound) == (4, 1, 2, 2)


def test_weight_one_uniform_witness():
    fam = witness_family_uniform(WT1, 6)
    assert (fam.size, fam.c, fam.symbol) == (15, 2, 0)
    assert fam.size == math.comb(6, 2)
    assert fam.max_shared == math.comb(3, 2)
    assert fam.implied_bound == 5


def test_weight_one_other_symbol_breaks_sharing_bound():
    C = complete("uniform", 6, 3)
    X = []
    for pos in itertools.combinations(range(6), 2):
        x = np.zeros(6, dtype=np.int64)
        x[list(pos)] = 1
        X.append(x)
    shared = (clause_values(WT1, C, np.array(X)) != 0).sum(axis=0).max()
    assert shared == 9 > math.comb(3, 2)


@pytest.mark.parametrize("words", [["01", "10"], ["001", "010", "100"], ["111"],
                                   ["000", "001"], ["011", "101", "110", "111"]])
def test_uniform_witness_members_satisfy_something(words):
    fam = witness_family_uniform(ValuedRelation.from_strings(2, words), 6)
    assert all(fam.satisfied)
    assert fam.max_shared <= math.comb(len(words[0]), fam.c)


def test_uniform_witness_needs_positive_c():
    with pytest.raises(RelationError):
        witness_family_uniform(ValuedRelation.from_strings(2, ["000", "111"]), 5)


@pytest.mark.parametrize("R, n, size, each", [
    (AND2, 3, 9, 3),
    (AND2, 5, 25, 5),
    (CUT, 5, 5, 5),
])
def test_rpartite_witness(R, n, size, each):
    fam = witness_family_rpartite(R, max_and_arity(R)[1], n)
    assert fam.size == size and fam.disjoint
    assert all(len(s) == each for s in fam.satisfied)
    assert fam.implied_bound == size


def test_too_small_sample_fails_verification():
    C = complete("rpartite", 3, 3)
    for seed in range(10):
        rep = exhaustive_verify(AND2, C, iid_sample(C, 8, seed), Fraction(1, 2))
        assert not rep.passed and rep.zero_violations > 0


# -- codeword census ----------------------------------------------------------------

def brute_census(R, C, threshold, dominant):
    T = oracles.table(R)
    n, parts = C.n, C.r
    seen = set()
    for psi in itertools.product(range(R.q), repeat=n * parts):
        ok = True
        for i in range(parts):
            block = psi[i * n:(i + 1) * n]
            counts = [block.count(d) for d in range(R.q)]
            ok &= counts[dominant[i]] == max(counts)
        if ok:
            seen.add(tuple(T[tuple(psi[i * n + v] for i, v in enumerate(cl))]
                           for cl in C.clauses))
    return sum(1 for w in seen if sum(x != 0 for x in w) <= threshold)


# frozen from exact enumeration at lambda = 2, threshold 2 * (n / 2)
CENSUS = {4: 5, 6: 7, 8: 9}


def test_census_matches_brute_force():
    C = complete("rpartite", 4, 2)
    got = codeword_census(DECOMP, C, [4], dominant=(1, 0)).counts[0]
    assert got == brute_census(DECOMP, C, 4, (1, 0)) == CENSUS[4]


@pytest.mark.parametrize("n", [6, 8])
def test_census_frozen_counts(n):
    C = complete("rpartite", n, 2)
    assert codeword_census(DECOMP, C, [n], dominant=(1, 0)).counts[0] == CENSUS[n]


def test_census_monotone_in_threshold():
    res = codeword_census(AND2, complete("rpartite", 3, 3), [0, 3, 9, 27])
    assert list(res.counts) == sorted(res.counts)
    assert res.counts[-1] == res.distinct


def test_census_exponent_fit():
    A = fit_census_exponent({4: CENSUS[4], 6: CENSUS[6]}, 2)
    assert A == pytest.approx(math.log(5) / (2 * math.log(4)))
    assert CENSUS[8] / CENSUS[6] <= (8 / 6) ** (A * 2)


def test_full_relation_has_one_nonzero_codeword():
    res = codeword_census(FULL, complete("uniform", 5, 2), [100])
    assert res.nonzero_distinct == 1 == res.distinct


def test_codewords_ignore_the_free_part():
    C = complete("rpartite", 3, 3)
    assert part_invariant(AND2, C, 2)
    assert not part_invariant(AND2, C, 0)


# -- coverage statistic -------------------------------------------------------------

def test_single_clause_coverage():
    C = random_instance("uniform", 10, 4, 1, seed=0)
    assert tight_coverage_statistic(C, 2) == math.comb(4, 2)


def test_coverage_saturates_for_large_m():
    n = 12
    hits = sum(tight_coverage_statistic(random_instance("uniform", n, 4, 4 * math.comb(n, 2), s), 2)
               >= math.comb(n, 2) / 2 for s in range(20))
    assert hits >= 18


def test_coverage_bad_size():
    with pytest.raises(ValueError):
        tight_coverage_statistic(complete("uniform", 4, 2), 3)


# -- closed-form values -------------------------------------------------------------

@pytest.mark.parametrize("words", [["01", "10"], ["000", "001"], ["011", "101", "110"]])
@pytest.mark.parametrize("n", [4, 5])
def test_min_sat_profile_matches_enumeration(words, n):
    R = ValuedRelation.from_strings(2, words)
    T = oracles.table(R)
    assert min_sat_profile(R, n) == [oracles.profile_sat(T, 2, (n - w, w)) for w in range(n + 1)]


@settings(max_examples=30, deadline=None)
@given(valued_relations(max_r=3), st.integers(3, 5), st.data())
def test_profile_value_matches_enumeration(R, n, data):
    counts = data.draw(st.lists(st.integers(0, n), min_size=R.q, max_size=R.q)
                       .filter(lambda c: sum(c) == n))
    assert profile_value(R, counts) == oracles.profile_sat(oracles.table(R), R.q, counts)


# delta recorded as the floor of the ratios found at n = 8, 12, 16
@pytest.mark.parametrize("words, delta, ratios", [
    (["00", "11"], 1, [Fraction(7, 3), Fraction(11, 5), Fraction(15, 7)]),
    (["000", "111"], 4, [Fraction(7), Fraction(11, 2), Fraction(5)]),
])
def test_value_separation(words, delta, ratios):
    R = ValuedRelation.from_strings(2, words)
    for n, ratio in zip((8, 12, 16), ratios):
        sep = value_separation(R, n)
        assert sep.ratio == ratio and sep.delta >= delta
        assert sep.distance <= n // 2


def test_separation_needs_positive_value():
    with pytest.raises(RelationError):
        value_separation(ValuedRelation((2, 2), np.zeros((2, 2), dtype=int)), 4)
