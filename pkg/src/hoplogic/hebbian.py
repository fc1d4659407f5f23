"""Generalized Hebbian learning of definite clauses.

Each event is a satisfying assignment of one clause's atoms. Presenting an
event increments every weight over a nonempty subset ``T`` of the clause's
atoms by ``rate * prod_{i in T} s_i``. Summed over all ``2**n - 1``
satisfying assignments of an arity-``n`` clause, the products equal
``-prod_{i in T} s*_i`` (the full sum over ``2**n`` assignments vanishes), so a
rate of ``1/2**n`` reproduces the compiled weights exactly.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product
from typing import Callable, Mapping

import numpy as np

from .dyadic import ZERO, DyadicRational
from .energy import Monomial, WeightSet
from .logic import Clause, LogicProgram


@dataclass(frozen=True)
class Event:
    clause: Clause
    assignment: Mapping[int, int]

    def __post_init__(self):
        if dict(self.assignment) == self.clause.violating_assignment():
            raise ValueError("an event must satisfy its clause")


def default_rate(n: int) -> DyadicRational:
    return DyadicRational(1, n)


@dataclass(frozen=True)
class LearningSchedule:
    rate: Callable[[int], DyadicRational] = default_rate

    def __call__(self, n: int) -> DyadicRational:
        r = DyadicRational.coerce(self.rate(n))
        if r <= 0:
            raise ValueError(f"learning rate for arity {n} must be positive")
        return r


DEFAULT_SCHEDULE = LearningSchedule()


def clause_events(c: Clause) -> list[Event]:
    """All satisfying assignments, counting in binary over atoms in index order.

    The lowest index is the most significant digit and ``+1`` precedes ``-1``.
    """
    idx = sorted(a.index for a in c.atoms)
    violating = c.violating_assignment()
    events = []
    for values in product((1, -1), repeat=len(idx)):
        assignment = dict(zip(idx, values))
        if assignment != violating:
            events.append(Event(c, assignment))
    return events


def _increment(acc: dict, e: Event, rate: DyadicRational) -> None:
    idx = sorted(e.assignment)
    for r in range(1, len(idx) + 1):
        for subset in combinations(idx, r):
            p = 1
            for i in subset:
                p *= e.assignment[i]
            acc[subset] = acc.get(subset, ZERO) + rate * p


def apply_hebb(
    w: WeightSet, e: Event, schedule: LearningSchedule = DEFAULT_SCHEDULE
) -> WeightSet:
    acc = dict(w.weights)
    _increment(acc, e, schedule(e.clause.arity))
    return WeightSet(w.num_atoms, acc, w.constant)


def learn_exhaustive(
    p: LogicProgram, schedule: LearningSchedule = DEFAULT_SCHEDULE
) -> WeightSet:
    acc: dict[Monomial, DyadicRational] = {}
    for c in p.clauses:
        rate = schedule(c.arity)
        for e in clause_events(c):
            _increment(acc, e, rate)
    return WeightSet(p.num_atoms, acc)


def learn_sampled(
    p: LogicProgram,
    num_events: int,
    schedule: LearningSchedule = DEFAULT_SCHEDULE,
    seed=None,
) -> WeightSet:
    """Hebbian learning from ``num_events`` randomly drawn events.

    Each step picks a clause uniformly, then one of its satisfying assignments
    uniformly, and applies the Hebb rule at ``rate(n) * (2**n - 1)``. That
    factor undoes the ``1/(2**n - 1)`` probability of each event, so the
    expected weights after ``M`` steps are ``M / len(p.clauses)`` times the
    exhaustive result for every arity.
    """
    if num_events < 1:
        raise ValueError("num_events must be >= 1")
    if not p.clauses:
        return WeightSet(p.num_atoms)
    rng = np.random.default_rng(seed)
    events = [clause_events(c) for c in p.clauses]
    rates = [schedule(c.arity) * ((1 << c.arity) - 1) for c in p.clauses]
    # Integer tallies per (clause, event); weights are formed once at the end.
    tallies = [np.zeros(len(ev), dtype=np.int64) for ev in events]
    picks = rng.integers(len(p.clauses), size=num_events)
    for ci, count in enumerate(np.bincount(picks, minlength=len(p.clauses))):
        if count:
            draws = rng.integers(len(events[ci]), size=int(count))
            tallies[ci] += np.bincount(draws, minlength=len(events[ci]))
    acc: dict[Monomial, DyadicRational] = {}
    for ci, ev in enumerate(events):
        for e, n in zip(ev, tallies[ci]):
            if n:
                _increment(acc, e, rates[ci] * int(n))
    return WeightSet(p.num_atoms, acc)
