"""Pure-Python sweep kernel (fallback for the compiled ``_kernel``).

Weights arrive scaled by a common power of two so every field and energy is an
integer. Terms are stored CSR-style: ``term_idx[term_ptr[t]:term_ptr[t+1]]``
are the atoms of term ``t`` with weight ``term_w[t]``, and
``atom_terms[atom_ptr[i]:atom_ptr[i+1]]`` are the terms containing atom ``i``.

``run_sweeps`` applies one full asynchronous sweep per row of ``orders``,
mutating ``state`` in place, and stops after the first zero-flip sweep. It
returns ``(sweeps_done, total_flips, stable, energy_after_each_sweep)``.
A zero field keeps the spin unless ``tie_up`` is set, in which case a false
(-1) neuron with zero field turns true; such a flip leaves the energy unchanged.
Python integers never overflow, so this path also serves weights too large for
the int64 kernel.
"""
from __future__ import annotations

NAME = "python"


def run_sweeps(
    term_ptr, term_idx, term_w, atom_ptr, atom_terms, state, orders, energy, tie_up=False
):
    term_ptr = list(term_ptr)
    term_idx = list(term_idx)
    term_w = [int(x) for x in term_w]
    atom_ptr = list(atom_ptr)
    atom_terms = list(atom_terms)
    s = [int(x) for x in state]
    energy = int(energy)
    terms = [
        (term_w[t], term_idx[term_ptr[t]:term_ptr[t + 1]]) for t in range(len(term_w))
    ]
    incident = [
        [terms[t] for t in atom_terms[atom_ptr[i]:atom_ptr[i + 1]]]
        for i in range(len(atom_ptr) - 1)
    ]

    energies = []
    flips_total = 0
    stable = False
    for row in orders:
        flips = 0
        for i in row:
            i = int(i)
            h = 0
            for w, atoms in incident[i]:
                for j in atoms:
                    w *= s[j]
                h += w
            h *= s[i]
            if (h > 0) != (s[i] > 0) if h else (tie_up and s[i] < 0):
                s[i] = -s[i]
                energy -= 2 * abs(h)
                flips += 1
        energies.append(energy)
        flips_total += flips
        if flips == 0:
            stable = True
            break
    state[:] = s
    return len(energies), flips_total, stable, energies


def state_energy(term_ptr, term_idx, term_w, constant, state):
    """``constant - sum_t term_w[t] * prod(state[term atoms])`` in integers."""
    s = [int(x) for x in state]
    total = int(constant)
    for t, w in enumerate(term_w):
        w = int(w)
        for q in range(int(term_ptr[t]), int(term_ptr[t + 1])):
            w *= s[term_idx[q]]
        total -= w
    return total
