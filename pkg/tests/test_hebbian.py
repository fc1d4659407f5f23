from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hoplogic.dyadic import DyadicRational as D
from hoplogic.energy import WeightSet, compile_program
from hoplogic.hebbian import (
    Event,
    LearningSchedule,
    apply_hebb,
    clause_events,
    learn_exhaustive,
    learn_sampled,
)
from hoplogic.logic import LogicProgram, generate_random_program, parse_program

from oracles import hebb_sum_by_enumeration


def test_clause_events_fact():
    (c,) = parse_program("C.").clauses
    assert [dict(e.assignment) for e in clause_events(c)] == [{0: 1}]


def test_clause_events_binary(section2):
    c = section2.clauses[1]  # D <- B, B:1 D:3
    got = [dict(e.assignment) for e in clause_events(c)]
    assert got == [{1: 1, 3: 1}, {1: -1, 3: 1}, {1: -1, 3: -1}]


def test_clause_events_ternary(section2):
    events = clause_events(section2.clauses[0])
    assert len(events) == 7
    assert {0: -1, 1: 1, 2: 1} not in [dict(e.assignment) for e in events]


def test_event_must_satisfy(section2):
    with pytest.raises(ValueError):
        Event(section2.clauses[1], {1: 1, 3: -1})


def test_apply_hebb_examples(section2):
    fact = parse_program("C.")
    w = apply_hebb(WeightSet(1), Event(fact.clauses[0], {0: 1}))
    assert w.weights == {(0,): D(1, 1)}

    c = section2.clauses[1]
    w = apply_hebb(WeightSet(4), Event(c, {1: -1, 3: 1}))
    assert w.weights == {(1,): D(-1, 2), (3,): D(1, 2), (1, 3): D(-1, 2)}
    w = apply_hebb(WeightSet(4), Event(c, {1: 1, 3: 1}))
    assert w.weights == {(1,): D(1, 2), (3,): D(1, 2), (1, 3): D(1, 2)}
    assert w.constant == 0


def test_learn_exhaustive_section2(section2):
    learned = learn_exhaustive(section2)
    compiled = compile_program(section2)
    assert learned == compiled.nonconstant()
    assert learned.constant == 0
    assert len(learned.weights) == 9  # the nonzero compiled weights


def test_learn_exhaustive_small():
    assert learn_exhaustive(parse_program("C.")).weights == {(0,): D(1, 1)}
    assert learn_exhaustive(parse_program("", num_atoms=3)) == WeightSet(3)


programs = st.builds(
    lambda nn, c1, c2, c3, c4, seed: generate_random_program(nn, {1: c1, 2: c2, 3: c3, 4: c4}, seed),
    st.integers(4, 10), st.integers(0, 4), st.integers(0, 6), st.integers(0, 6), st.integers(0, 2),
    st.integers(0, 2**32),
)


@settings(max_examples=60, deadline=None)
@given(programs)
def test_equivalence_with_compilation(p):
    assert learn_exhaustive(p) == compile_program(p).nonconstant()


@settings(max_examples=30, deadline=None)
@given(programs)
def test_matches_enumeration_oracle(p):
    expected = hebb_sum_by_enumeration(p, lambda n: Fraction(1, 2**n))
    got = {k: v.as_fraction() for k, v in learn_exhaustive(p).weights.items()}
    assert got == expected


@settings(max_examples=30, deadline=None)
@given(programs, st.randoms(use_true_random=False))
def test_clause_order_invariance(p, rnd):
    clauses = list(p.clauses)
    rnd.shuffle(clauses)
    assert learn_exhaustive(LogicProgram(p.atoms, tuple(clauses))) == learn_exhaustive(p)


@settings(max_examples=20, deadline=None)
@given(programs, st.integers(0, 5))
def test_rate_rescaling(p, k):
    scaled = LearningSchedule(lambda n: D(1, n) * (1 << k))
    assert learn_exhaustive(p, scaled) == learn_exhaustive(p).scaled(1 << k)


def test_sampled_single_event_clause():
    # rate 1/2 times the (2**1 - 1) event-probability correction, ten times
    w = learn_sampled(parse_program("C."), 10, seed=0)
    assert w.weights == {(0,): D(5)}


def test_sampled_requires_events(section2):
    with pytest.raises(ValueError):
        learn_sampled(section2, 0, seed=0)


def test_sampled_reproducible(section2):
    assert learn_sampled(section2, 500, seed=9) == learn_sampled(section2, 500, seed=9)
    assert learn_sampled(section2, 500, seed=9) != learn_sampled(section2, 500, seed=10)


def test_sampled_converges(section2):
    exact = compile_program(section2).nonconstant()
    m = 30000
    w = learn_sampled(section2, m, seed=0)
    scale = Fraction(m, len(section2.clauses))
    keys = set(exact.weights) | set(w.weights)
    err = max(abs(w.weight(k).as_fraction() / scale - exact.weight(k).as_fraction()) for k in keys)
    assert err / max(abs(v.as_fraction()) for v in exact.weights.values()) <= Fraction(5, 100)
