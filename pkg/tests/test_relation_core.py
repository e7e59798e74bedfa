import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cspsparse.relation_core import (EmptySupportError, NotExtremeError, ParseError,
                                     RelationError, ValuedRelation, boolean_uniform_exponent,
                                     closure_violations, distance_and_extremality,
                                     extreme_tuples, first_nonuniform_and, format_relation,
                                     generalized_ands, hat_c, irrelevance_structure,
                                     is_decomposable, max_and_arity, parse_relation,
                                     sandwich_decomposable)

from . import oracles


def rel(*words, q=2, values=None):
    return ValuedRelation.from_strings(q, words, values)


@st.composite
def valued_relations(draw, max_r=3, max_q=3, max_value=3, nonzero=True):
    r = draw(st.integers(1, max_r))
    q = draw(st.integers(2, max_q))
    cells = draw(st.lists(st.integers(0, max_value), min_size=q ** r, max_size=q ** r))
    if nonzero and not any(cells):
        cells[draw(st.integers(0, q ** r - 1))] = 1
    return ValuedRelation((q,) * r, np.array(cells).reshape((q,) * r))


# -- representation and file format --------------------------------------

def test_table_is_total_and_W_is_max():
    R = rel("01", "11", values=[3, 5])
    assert R.table.shape == (2, 2)
    assert R.W == 5
    assert R.support() == [(0, 1), (1, 1)]


@pytest.mark.parametrize("text, line", [
    ("r=2 domains=2\n", 1),
    ("r=2 domains=2,2\n0 1\n0 2\n", 3),
    ("r=2 domains=2,2\n0 1\n0 1\n", 3),
    ("r=2 domains=2,2\n0 1 -1\n", 2),
    ("r=2 domains=2,2\n\n# note\n0 x\n", 4),
    ("r=2 domains=2,2\n0 1 2 3\n", 2),
])
def test_parse_errors_report_line(text, line):
    with pytest.raises(ParseError) as info:
        parse_relation(text)
    assert info.value.line == line
    assert str(info.value).startswith(f"line {line}:")


@settings(max_examples=60, deadline=None)
@given(valued_relations(nonzero=False))
def test_relation_file_round_trip(R):
    assert parse_relation(format_relation(R)) == R


def test_zero_one_relation_omits_values():
    assert format_relation(rel("01", "10")) == "r=2 domains=2,2\n0 1\n1 0\n"


# -- AND restrictions -----------------------------------------------------

@pytest.mark.parametrize("words, c", [
    (("000", "001"), 2),
    (("00", "01", "10", "11"), 0),
    (("01", "10"), 1),
    (("111",), 3),
    (("001", "010", "100"), 2),
])
def test_max_and_arity_fixtures(words, c):
    R = rel(*words)
    assert max_and_arity(R)[0] == c == oracles.and_arity(R.domains, oracles.table(R))


def test_cut_witness_is_first_found():
    c, w = max_and_arity(rel("01", "10"))
    assert c == 1
    assert w.sets == ((0, 1), (1,))
    assert w.survivor == (0, 1)
    assert w.distinguished == (0,)


def test_empty_support_is_an_error():
    with pytest.raises(EmptySupportError):
        max_and_arity(ValuedRelation((2, 2), np.zeros((2, 2), dtype=int)))


@settings(max_examples=80, deadline=None)
@given(valued_relations())
def test_max_and_arity_matches_brute_force(R):
    c, w = max_and_arity(R)
    assert c == oracles.and_arity(R.domains, oracles.table(R))
    box = list(itertools.product(*w.sets))
    assert [t for t in box if R(t)] == [w.survivor]
    assert len(w.distinguished) == sum(len(E) == 2 for E in w.sets)


@settings(max_examples=50, deadline=None)
@given(valued_relations(), st.randoms(use_true_random=False))
def test_max_and_arity_isomorphism_invariant(R, rnd):
    order = list(range(R.r))
    rnd.shuffle(order)
    perms = []
    for q in R.domains:
        p = list(range(q))
        rnd.shuffle(p)
        perms.append(p)
    assert max_and_arity(R.transposed(order).permuted(perms))[0] == max_and_arity(R)[0]


# -- Boolean exponent and extremality ---------------------------------------

@pytest.mark.parametrize("words, c", [
    (("000", "111"), 0),
    (("111",), 3),
    (("001", "010", "100"), 2),
])
def test_boolean_uniform_exponent(words, c):
    assert boolean_uniform_exponent(rel(*words)) == c


def test_boolean_uniform_exponent_needs_boolean_domain():
    with pytest.raises(RelationError):
        boolean_uniform_exponent(rel("02", q=3))


@pytest.mark.parametrize("t, expected", [
    ((1, 1, 0), (2, True)),
    ((0, 0, 0), (0, False)),
    ((1, 1, 1), (2, True)),
])
def test_distance_and_extremality(t, expected):
    assert distance_and_extremality(t, rel("000", "001")) == expected


def test_support_tuple_is_extreme_only_for_c_zero():
    assert distance_and_extremality((0, 1), rel("00", "01", "10", "11")) == (0, True)


# -- irrelevance, decomposability, sandwiches --------------------------------

def test_irrelevance_and_fixture():
    s = irrelevance_structure(rel("000", "001"), (1, 1, 0))
    assert s.c == 2
    assert s.family == ((0, 0, 0),)
    assert s.covered == (0, 1)
    assert s.irrelevant_coordinates == (2,)


def test_irrelevance_no_irrelevant_coordinates():
    s = irrelevance_structure(rel("11"), (0, 0))
    assert s.family == ((1, 1),)
    assert s.irrelevant_coordinates == ()


def test_irrelevance_two_coordinate_fixture():
    R = rel("00", "01")
    s = irrelevance_structure(R, (1, 0))
    assert (s.c, s.family, s.irrelevant_coordinates) == (1, ((0, 0),), (1,))
    assert is_decomposable(R, (1, 0), s)


def test_non_extreme_tuple_rejected():
    with pytest.raises(NotExtremeError):
        irrelevance_structure(rel("000", "001"), (0, 0, 0))


def test_smallest_non_decomposable_boolean_fixture():
    # regression fixture from exhaustive search: fewest support tuples, then lex
    R = rel("000", "001", "010", "101", "110")
    assert not is_decomposable(R, (0, 1, 1))
    smaller = []
    for size in range(1, 5):
        for sup in itertools.combinations(itertools.product((0, 1), repeat=3), size):
            S = ValuedRelation.from_support((2, 2, 2), sup)
            smaller += [t for t in extreme_tuples(S) if not is_decomposable(S, t)]
    assert smaller == []


@settings(max_examples=60, deadline=None)
@given(valued_relations())
def test_closure_and_irrelevant_pairs_match_brute_force(R):
    T = oracles.table(R)
    for t in extreme_tuples(R):
        s = irrelevance_structure(R, t)
        c, irr, fam = oracles.irrelevant_pairs(T, R.domains, t)
        assert (s.c, set(s.irrelevant), sorted(s.family)) == (c, irr, sorted(fam))
        assert closure_violations(R, s) == []
        assert oracles.closure_violations(T, R.domains, t) == 0


@settings(max_examples=60, deadline=None)
@given(valued_relations())
def test_sandwich_bounds_and_decomposability(R):
    for t in extreme_tuples(R):
        s = irrelevance_structure(R, t)
        R0, R1 = sandwich_decomposable(R, t, s)
        assert (R0.flat <= R.flat).all() and (R.flat <= R1.flat).all()
        assert is_decomposable(R0, t, s) and is_decomposable(R1, t, s)
        if is_decomposable(R, t, s):
            assert R0 == R == R1
        if hat_c(R) != s.c:
            continue
        for u in map(tuple, R.tuples()):
            relevant = sum(not s.is_irrelevant(i, x) for i, x in enumerate(u))
            if R1(u) > R0(u):
                assert relevant >= s.c + 1
            if sum(a != b for a, b in zip(u, t)) == s.c:
                assert R0(u) == R(u) == R1(u)


# -- generalized ANDs -------------------------------------------------------

def test_nonuniform_and_fixture():
    R = rel("10", "11", values=[1, 2])
    assert max_and_arity(R)[0] == 1
    w = first_nonuniform_and(R, 1)
    assert w is not None and w.values == (1, 2)
    assert hat_c(R) == 2


def test_uniform_valued_and():
    R = rel("10", "11", values=[5, 5])
    ands = generalized_ands(R, 1)
    assert ands and all(w.uniform for w in ands)
    assert hat_c(R) == max_and_arity(R)[0] == 1


@settings(max_examples=40, deadline=None)
@given(valued_relations(max_value=1))
def test_zero_one_relations_have_hat_c_equal_c(R):
    c = max_and_arity(R)[0]
    assert all(w.uniform for w in generalized_ands(R, c))
    assert hat_c(R) == c


@settings(max_examples=40, deadline=None)
@given(valued_relations())
def test_generalized_and_condition_holds(R):
    c = max_and_arity(R)[0]
    for w in generalized_ands(R, c):
        for t in itertools.product(*w.sets):
            marked = all(t[i] == e for i, e in zip(w.distinguished, w.marked))
            assert (R(t) > 0) == marked
