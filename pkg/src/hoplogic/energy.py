"""Compile definite programs to higher-order Hopfield weights.

The inconsistency cost of a program is a multilinear polynomial in bipolar
spins whose value at any state is the number of violated clauses. Matching it
term by term against the network energy

    E(s) = constant - sum_T w_T * prod_{i in T} s_i

gives the weights. ``w_T`` (one coefficient per unordered atom set) is the
canonical storage; :func:`to_paper_convention` converts to the per-order
tensor entries ``J^(n)_T = w_T / (n-1)!`` used when energies are written with
``1/n`` prefactors over ordered index sums.
"""
from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import Iterable, Mapping, Sequence, TextIO

from .dyadic import ZERO, DyadicRational
from .logic import Clause, LogicProgram

Monomial = tuple[int, ...]


def monomial(indices: Iterable[int]) -> Monomial:
    m = tuple(sorted(indices))
    if len(set(m)) != len(m):
        raise ValueError(f"repeated index in monomial {m}")
    return m


def _product(indices: Monomial, s: Sequence[int]) -> int:
    p = 1
    for i in indices:
        p *= s[i]
    return p


class CostPolynomial:
    """Sparse multilinear polynomial with dyadic coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Monomial, DyadicRational] | None = None):
        clean = {}
        for k, v in (terms or {}).items():
            v = DyadicRational.coerce(v)
            if v:
                clean[monomial(k)] = clean.get(monomial(k), ZERO) + v
        self.terms: dict[Monomial, DyadicRational] = {k: v for k, v in clean.items() if v}

    def __add__(self, other: "CostPolynomial") -> "CostPolynomial":
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, ZERO) + v
        return CostPolynomial(out)

    def __eq__(self, other):
        return isinstance(other, CostPolynomial) and self.terms == other.terms

    def __repr__(self):
        return f"CostPolynomial({self.terms!r})"

    def coefficient(self, m: Iterable[int]) -> DyadicRational:
        return self.terms.get(monomial(m), ZERO)

    def evaluate(self, s: Sequence[int]) -> DyadicRational:
        total = ZERO
        for m, c in self.terms.items():
            total = total + c * _product(m, s)
        return total

    __call__ = evaluate


@dataclass(frozen=True)
class WeightSet:
    """Symmetric zero-diagonal weights of every order, keyed by atom set."""

    num_atoms: int
    weights: Mapping[Monomial, DyadicRational] = field(default_factory=dict)
    constant: DyadicRational = ZERO

    def __post_init__(self):
        clean = {}
        for k, v in self.weights.items():
            k = monomial(k)
            if not k:
                raise ValueError("order-0 term belongs in `constant`")
            if k[-1] >= self.num_atoms or k[0] < 0:
                raise ValueError(f"monomial {k} outside universe of {self.num_atoms}")
            v = DyadicRational.coerce(v)
            if v:
                clean[k] = v
        object.__setattr__(self, "weights", clean)
        object.__setattr__(self, "constant", DyadicRational.coerce(self.constant))

    @property
    def max_order(self) -> int:
        return max((len(k) for k in self.weights), default=0)

    def weight(self, atoms: Iterable[int]) -> DyadicRational:
        return self.weights.get(monomial(atoms), ZERO)

    def scaled(self, factor) -> "WeightSet":
        f = DyadicRational.coerce(factor)
        return WeightSet(
            self.num_atoms, {k: v * f for k, v in self.weights.items()}, self.constant * f
        )

    def nonconstant(self) -> "WeightSet":
        return WeightSet(self.num_atoms, self.weights)

    @cached_property
    def scaled_terms(self) -> tuple[int, int, list[tuple[Monomial, int]]]:
        """``(exponent, constant, [(monomial, weight)])`` with integers scaled by ``2**exponent``."""
        e = max([v.exponent for v in self.weights.values()] + [self.constant.exponent])
        terms = [(k, v.scaled_int(e)) for k, v in self.weights.items()]
        return e, self.constant.scaled_int(e), terms

    @cached_property
    def incidence(self) -> dict[int, list[Monomial]]:
        by_atom: dict[int, list[Monomial]] = defaultdict(list)
        for k in sorted(self.weights, key=lambda m: (len(m), m)):
            for i in k:
                by_atom[i].append(k)
        return dict(by_atom)

    def __eq__(self, other):
        return (
            isinstance(other, WeightSet)
            and self.num_atoms == other.num_atoms
            and self.constant == other.constant
            and self.weights == other.weights
        )

    def __hash__(self):
        return hash((self.num_atoms, self.constant, frozenset(self.weights.items())))


# --------------------------------------------------------------------------
# compilation


def clause_cost(c: Clause) -> CostPolynomial:
    """Expand prod_i (1 + s*_i S_i)/2 over the clause's violating assignment s*."""
    violating = c.violating_assignment()
    idx = sorted(violating)
    n = len(idx)
    terms = {}
    for r in range(n + 1):
        for subset in combinations(idx, r):
            terms[subset] = DyadicRational(_product_dict(subset, violating), n)
    return CostPolynomial(terms)


def _product_dict(indices, assignment) -> int:
    p = 1
    for i in indices:
        p *= assignment[i]
    return p


def program_cost(p: LogicProgram) -> CostPolynomial:
    acc: dict[Monomial, DyadicRational] = {}
    for c in p.clauses:
        for k, v in clause_cost(c).terms.items():
            acc[k] = acc.get(k, ZERO) + v
    return CostPolynomial(acc)


def cost_to_weights(e: CostPolynomial, num_atoms: int | None = None) -> WeightSet:
    if num_atoms is None:
        num_atoms = max((k[-1] + 1 for k in e.terms if k), default=0)
    return WeightSet(
        num_atoms,
        {k: -v for k, v in e.terms.items() if k},
        e.terms.get((), ZERO),
    )


def compile_program(p: LogicProgram) -> WeightSet:
    """Weights whose energy equals the violated-clause count at every state."""
    return cost_to_weights(program_cost(p), p.num_atoms)


def energy(w: WeightSet, s: Sequence[int]) -> DyadicRational:
    if len(s) != w.num_atoms:
        raise ValueError(f"state has {len(s)} spins, weights cover {w.num_atoms} atoms")
    exponent, total, terms = w.scaled_terms
    for k, v in terms:
        total -= v * _product(k, s)
    return DyadicRational(total, exponent)


def local_field(w: WeightSet, s: Sequence[int], i: int) -> DyadicRational:
    if not 0 <= i < w.num_atoms:
        raise IndexError(f"atom index {i} out of range")
    h = ZERO
    for k in w.incidence.get(i, ()):
        p = 1
        for j in k:
            if j != i:
                p *= s[j]
        h = h + w.weights[k] * p
    return h


# --------------------------------------------------------------------------
# reporting convention


@dataclass(frozen=True)
class PaperWeights:
    """Per-order tensor entries ``J^(n)_T = w_T / (n-1)!`` (exact rationals)."""

    num_atoms: int
    tensors: Mapping[int, Mapping[Monomial, Fraction]]

    def get(self, atoms: Iterable[int]) -> Fraction:
        m = monomial(atoms)
        return self.tensors.get(len(m), {}).get(m, Fraction(0))

    def to_weightset(self, constant=ZERO) -> WeightSet:
        weights = {}
        for n, entries in self.tensors.items():
            for k, v in entries.items():
                weights[k] = DyadicRational.coerce(v * math.factorial(n - 1))
        return WeightSet(self.num_atoms, weights, constant)


def to_paper_convention(w: WeightSet) -> PaperWeights:
    tensors: dict[int, dict[Monomial, Fraction]] = defaultdict(dict)
    for k, v in w.weights.items():
        tensors[len(k)][k] = v.as_fraction() / math.factorial(len(k) - 1)
    return PaperWeights(w.num_atoms, {n: dict(t) for n, t in sorted(tensors.items())})


def format_fraction(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}" if x.denominator != 1 else str(x.numerator)


# --------------------------------------------------------------------------
# weights file


class WeightsFormatError(ValueError):
    pass


def dump_weights(w: WeightSet) -> str:
    """Serialize: ``const`` line, then ``n i_1 .. i_n value`` by order, then index set."""
    lines = [f"const {w.constant}"]
    for k in sorted(w.weights, key=lambda m: (len(m), m)):
        lines.append(f"{len(k)} {' '.join(map(str, k))} {w.weights[k]}")
    return "\n".join(lines) + "\n"


def load_weights(text: str, num_atoms: int | None = None) -> WeightSet:
    constant = ZERO
    weights: dict[Monomial, DyadicRational] = {}
    seen_const = False
    for lineno, line in enumerate(text.splitlines(), 1):
        parts = line.split()
        if not parts:
            continue
        try:
            if parts[0] == "const":
                if len(parts) != 2 or seen_const:
                    raise ValueError("bad const line")
                constant = DyadicRational.parse(parts[1])
                seen_const = True
                continue
            n = int(parts[0])
            if n < 1 or len(parts) != n + 2:
                raise ValueError(f"expected {n} indices and a value")
            k = monomial(int(x) for x in parts[1:-1])
            if k in weights:
                raise ValueError(f"monomial {k} listed twice")
            weights[k] = DyadicRational.parse(parts[-1])
        except ValueError as exc:
            raise WeightsFormatError(f"line {lineno}: {exc}") from None
    if num_atoms is None:
        num_atoms = max((k[-1] + 1 for k in weights), default=0)
    return WeightSet(num_atoms, weights, constant)


def write_weights(w: WeightSet, fh: TextIO) -> None:
    fh.write(dump_weights(w))
