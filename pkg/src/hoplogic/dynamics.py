"""Zero-temperature asynchronous dynamics over higher-order weights.

A neuron takes the sign of its local field. What a zero field does is the
``tie`` rule: ``"retain"`` keeps the spin, so every flip strictly lowers the
energy; ``"up"`` turns a false neuron true, a flip that leaves the energy
unchanged. Relaxation terminates under both: energy never rises, and at
constant energy the only possible flips are -1 -> +1, so no cycle exists.
``update_neuron`` and ``sweep`` are the exact reference implementation;
``relax`` runs the same rule through a sweep kernel (compiled when available)
on weights scaled to integers.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import _kernel_py
from .dyadic import DyadicRational
from .energy import CostPolynomial, WeightSet, local_field
from .logic import NetworkState

try:
    from . import _kernel as _compiled
except ImportError:  # extension not built
    _compiled = None

if _compiled is not None and not os.environ.get("HOPLOGIC_PURE_PYTHON"):
    _backend = _compiled
else:
    _backend = _kernel_py

BACKEND = _backend.NAME
DEFAULT_MAX_SWEEPS = 100
DEFAULT_TOLERANCE = Fraction(1, 1000)
# Sweep orders are drawn this many at a time; part of the RNG-stream contract.
PERMUTATION_BATCH = 8
TIE_RULES = ("retain", "up")
DEFAULT_TIE = "retain"
_INT64_SAFE = 1 << 61


def available_backends() -> dict:
    out = {"python": _kernel_py}
    if _compiled is not None:
        out["cython"] = _compiled
    return out


def random_state(num_atoms: int, seed=None) -> NetworkState:
    if num_atoms < 1:
        raise ValueError("num_atoms must be >= 1")
    rng = np.random.default_rng(seed)
    return tuple(int(x) for x in rng.integers(0, 2, size=num_atoms) * 2 - 1)


def _check_tie(tie: str) -> None:
    if tie not in TIE_RULES:
        raise ValueError(f"unknown tie rule {tie!r}; expected one of {TIE_RULES}")


def _sign_update(s_i: int, h: DyadicRational, tie: str) -> int:
    sg = h.sign()
    if sg:
        return sg
    return 1 if tie == "up" else s_i


def update_neuron(
    w: WeightSet, s: Sequence[int], i: int, tie: str = DEFAULT_TIE
) -> tuple[NetworkState, bool]:
    _check_tie(tie)
    new = _sign_update(s[i], local_field(w, s, i), tie)
    s = tuple(s)
    if new == s[i]:
        return s, False
    return s[:i] + (new,) + s[i + 1:], True


def sweep(
    w: WeightSet, s: Sequence[int], order: Sequence[int], tie: str = DEFAULT_TIE
) -> tuple[NetworkState, int]:
    _check_tie(tie)
    if sorted(order) != list(range(w.num_atoms)):
        raise ValueError("order must be a permutation of the atom indices")
    state = list(s)
    flips = 0
    for i in order:
        new = _sign_update(state[i], local_field(w, state, i), tie)
        if new != state[i]:
            state[i] = new
            flips += 1
    return tuple(state), flips


@dataclass(frozen=True)
class RelaxationResult:
    final_state: NetworkState
    final_energy: DyadicRational
    sweeps_used: int
    total_flips: int
    stable: bool
    energy_trace: tuple[DyadicRational, ...]
    # states after each sweep; filled only when relax(record_states=True)
    state_trace: tuple[NetworkState, ...] = ()


class PackedWeights:
    """Integer-scaled CSR layout of a :class:`WeightSet` for the sweep kernels."""

    def __init__(self, w: WeightSet):
        self.num_atoms = w.num_atoms
        self.exponent, self.constant, scaled = w.scaled_terms
        scaled = sorted(scaled, key=lambda kv: (len(kv[0]), kv[0]))
        keys = [k for k, _ in scaled]
        self.term_w = [v for _, v in scaled]
        self.terms = keys
        self.term_ptr = np.zeros(len(keys) + 1, dtype=np.int64)
        self.term_ptr[1:] = np.cumsum([len(k) for k in keys])
        self.term_idx = np.fromiter((i for k in keys for i in k), dtype=np.int64,
                                    count=int(self.term_ptr[-1]))
        by_atom: list[list[int]] = [[] for _ in range(w.num_atoms)]
        for t, k in enumerate(keys):
            for i in k:
                by_atom[i].append(t)
        self.atom_ptr = np.zeros(w.num_atoms + 1, dtype=np.int64)
        self.atom_ptr[1:] = np.cumsum([len(b) for b in by_atom])
        self.atom_terms = np.fromiter((t for b in by_atom for t in b), dtype=np.int64,
                                      count=int(self.atom_ptr[-1]))
        bound = abs(self.constant) + sum(abs(x) for x in self.term_w)
        self.fits_int64 = bound < _INT64_SAFE
        self.term_w_arr = np.array(self.term_w, dtype=np.int64) if self.fits_int64 else None

    def _pick(self, backend):
        backend = backend or _backend
        if backend is not _kernel_py and not self.fits_int64:
            backend = _kernel_py
        return backend, (self.term_w_arr if backend is not _kernel_py else self.term_w)

    def energy_int(self, state: np.ndarray, backend=None) -> int:
        backend, term_w = self._pick(backend)
        return int(backend.state_energy(self.term_ptr, self.term_idx, term_w, self.constant, state))

    def to_dyadic(self, value: int) -> DyadicRational:
        return DyadicRational(int(value), self.exponent)

    def run(self, state, orders, energy: int, backend=None, tie: str = DEFAULT_TIE):
        backend, term_w = self._pick(backend)
        return backend.run_sweeps(
            self.term_ptr, self.term_idx, term_w, self.atom_ptr, self.atom_terms,
            state, orders, energy, tie == "up",
        )


_PACK_ATTR = "_packed"


def packed(w: WeightSet) -> PackedWeights:
    p = w.__dict__.get(_PACK_ATTR)
    if p is None:
        p = PackedWeights(w)
        w.__dict__[_PACK_ATTR] = p
    return p


def relax(
    w: WeightSet,
    s0: Sequence[int],
    max_sweeps: int = DEFAULT_MAX_SWEEPS,
    seed=None,
    backend=None,
    tie: str = DEFAULT_TIE,
    record_states: bool = False,
) -> RelaxationResult:
    """Sweep in fresh random orders until a sweep flips nothing or ``max_sweeps``."""
    _check_tie(tie)
    if max_sweeps < 1:
        raise ValueError("max_sweeps must be >= 1")
    if len(s0) != w.num_atoms:
        raise ValueError(f"state has {len(s0)} spins, weights cover {w.num_atoms} atoms")
    if backend is not None and isinstance(backend, str):
        backend = available_backends()[backend]
    net = packed(w)
    rng = np.random.default_rng(seed)
    state = np.array(s0, dtype=np.int64)
    energy = net.energy_int(state, backend)
    base = np.arange(w.num_atoms, dtype=np.int64)
    trace: list[int] = []
    states: list[NetworkState] = []
    flips = 0
    stable = False
    while len(trace) < max_sweeps and not stable:
        batch = min(PERMUTATION_BATCH, max_sweeps - len(trace))
        orders = rng.permuted(np.tile(base, (batch, 1)), axis=1)
        # one kernel call per sweep when recording; the RNG stream is unchanged
        chunks = [orders[r:r + 1] for r in range(batch)] if record_states else [orders]
        for chunk in chunks:
            _, f, stable, energies = net.run(state, chunk, energy, backend, tie)
            flips += int(f)
            trace.extend(int(e) for e in energies)
            energy = trace[-1]
            if record_states:
                states.append(tuple(int(x) for x in state))
            if stable:
                break
    return RelaxationResult(
        final_state=tuple(int(x) for x in state),
        final_energy=net.to_dyadic(energy),
        sweeps_used=len(trace),
        total_flips=flips,
        stable=bool(stable),
        energy_trace=tuple(net.to_dyadic(e) for e in trace),
        state_trace=tuple(states),
    )


def relax_reference(
    w: WeightSet,
    s0: Sequence[int],
    max_sweeps: int = DEFAULT_MAX_SWEEPS,
    seed=None,
    tie: str = DEFAULT_TIE,
) -> RelaxationResult:
    """``relax`` built from :func:`sweep` in exact arithmetic, with the same RNG stream."""
    from .energy import energy as energy_of

    rng = np.random.default_rng(seed)
    base = np.arange(w.num_atoms, dtype=np.int64)
    s = tuple(s0)
    trace = []
    flips = 0
    stable = False
    while len(trace) < max_sweeps and not stable:
        batch = min(PERMUTATION_BATCH, max_sweeps - len(trace))
        for order in rng.permuted(np.tile(base, (batch, 1)), axis=1):
            s, f = sweep(w, s, [int(i) for i in order], tie)
            flips += f
            trace.append(energy_of(w, s))
            if f == 0:
                stable = True
                break
            if len(trace) == max_sweeps:
                break
    return RelaxationResult(s, trace[-1], len(trace), flips, stable, tuple(trace))


def is_global(cost: CostPolynomial, s: Sequence[int], tolerance=DEFAULT_TOLERANCE) -> bool:
    if tolerance < 0:
        raise ValueError("tolerance must be >= 0")
    return cost.evaluate(s).as_fraction() <= Fraction(tolerance)
