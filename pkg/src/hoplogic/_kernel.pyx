# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False
"""Compiled asynchronous sweep kernel over integer-scaled weights.

Mirrors ``_kernel_py.run_sweeps`` exactly; see that module for the contract.
"""
import numpy as np

from libc.stdint cimport int64_t

NAME = "cython"


def run_sweeps(
    const int64_t[::1] term_ptr,
    const int64_t[::1] term_idx,
    const int64_t[::1] term_w,
    const int64_t[::1] atom_ptr,
    const int64_t[::1] atom_terms,
    int64_t[::1] state,
    const int64_t[:, ::1] orders,
    int64_t energy,
    bint tie_up=False,
):
    cdef Py_ssize_t nrows = orders.shape[0]
    cdef Py_ssize_t n = orders.shape[1]
    cdef Py_ssize_t r, k, a, q, t
    cdef Py_ssize_t done = 0
    cdef int64_t i, s_i, h, prod
    cdef int64_t flips_sweep, flips_total = 0
    cdef bint stable = False
    energies = np.empty(nrows, dtype=np.int64)
    cdef int64_t[::1] ev = energies

    for r in range(nrows):
        flips_sweep = 0
        for k in range(n):
            i = orders[r, k]
            s_i = state[i]
            h = 0
            for a in range(atom_ptr[i], atom_ptr[i + 1]):
                t = atom_terms[a]
                prod = term_w[t]
                for q in range(term_ptr[t], term_ptr[t + 1]):
                    prod *= state[term_idx[q]]
                h += prod
            # each product included s_i once; s_i * s_i == 1 removes it
            h *= s_i
            if (h > 0 and s_i < 0) or (h < 0 and s_i > 0) or (tie_up and h == 0 and s_i < 0):
                state[i] = -s_i
                energy -= 2 * (h if h > 0 else -h)
                flips_sweep += 1
        ev[r] = energy
        flips_total += flips_sweep
        done = r + 1
        if flips_sweep == 0:
            stable = True
            break
    return done, flips_total, stable, energies[:done]


def state_energy(
    const int64_t[::1] term_ptr,
    const int64_t[::1] term_idx,
    const int64_t[::1] term_w,
    int64_t constant,
    const int64_t[::1] state,
):
    cdef Py_ssize_t t, q
    cdef int64_t prod, total = constant
    for t in range(term_w.shape[0]):
        prod = term_w[t]
        for q in range(term_ptr[t], term_ptr[t + 1]):
            prod *= state[term_idx[q]]
        total -= prod
    return total
