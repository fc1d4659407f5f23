"""Exit criteria. Each test records one PASS/FAIL line shown in the terminal summary."""
import statistics
import time
from fractions import Fraction
from itertools import product

import numpy as np
import pytest

from hoplogic.cli import main
from hoplogic.dynamics import random_state, relax
from hoplogic.energy import compile_program, energy, to_paper_convention
from hoplogic.experiment import ExperimentConfig, run_experiment, run_trial
from hoplogic.hebbian import learn_exhaustive, learn_sampled
from hoplogic.logic import count_violations, generate_random_program, parse_program

from conftest import SECTION2_SOURCE, record

F = Fraction


def test_c1_table1_reproduction():
    start = time.perf_counter()
    p = parse_program(SECTION2_SOURCE)
    pw = to_paper_convention(compile_program(p))
    elapsed = time.perf_counter() - start
    A, B, C, D = range(4)
    expected = {
        (A, B, C): F(1, 16), (A, B, D): 0, (A, C, D): 0, (B, C, D): 0,
        (A, B): F(1, 8), (A, C): F(1, 8), (A, D): 0, (B, C): F(-1, 8), (B, D): F(1, 4), (C, D): 0,
        (A,): F(1, 8), (B,): F(-3, 8), (C,): F(3, 8), (D,): F(1, 4),
    }
    wrong = [k for k, v in expected.items() if pw.get(k) != v]
    extra = [k for t in pw.tensors.values() for k in t if k not in expected]
    ok = not wrong and not extra and elapsed < 1.0
    record("C1 weight table", ok, f"{14 - len(wrong)}/14 totals exact, {elapsed * 1000:.1f} ms")
    assert ok


def test_c2_hebbian_equivalence_oracle():
    rng = np.random.default_rng(2024)
    start = time.perf_counter()
    mismatches = 0
    n = 250
    for i in range(n):
        nn = int(rng.integers(3, 11))
        counts = {k: int(rng.integers(0, 6)) for k in (1, 2, 3)}
        p = generate_random_program(nn, counts, seed=[2024, i])
        mismatches += learn_exhaustive(p) != compile_program(p).nonconstant()
    elapsed = time.perf_counter() - start
    ok = mismatches == 0 and elapsed < 10
    record("C2 equivalence", ok, f"{n - mismatches}/{n} programs bit-exact, {elapsed:.2f} s")
    assert ok


def test_c3_cost_semantics_oracle():
    start = time.perf_counter()
    bad = 0
    n = 50
    states = list(product((-1, 1), repeat=12))
    for i in range(n):
        counts = {1: i % 4, 2: 3 + i % 5, 3: 3 + (i * 7) % 9}
        p = generate_random_program(12, counts, seed=[3, i])
        w = compile_program(p)
        bad += sum(energy(w, s) != count_violations(p, s) for s in states)
    elapsed = time.perf_counter() - start
    ok = bad == 0 and elapsed < 60
    record("C3 cost semantics", ok,
           f"{n} programs x {len(states)} states, {bad} mismatches, {elapsed:.1f} s")
    assert ok


def test_c4_dynamics_properties():
    start = time.perf_counter()
    runs = non_monotone = unstable = diverged = 0
    rng = np.random.default_rng(4)
    for i in range(200):
        nn = int(rng.integers(4, 41))
        counts = {k: int(rng.integers(0, nn + 1)) for k in (1, 2, 3) if k <= nn}
        p = generate_random_program(nn, counts, seed=[4, i])
        w = compile_program(p)
        w7 = w.scaled(7)
        for t in range(50):
            tie = ("retain", "up")[t % 2]
            s0 = random_state(nn, [4, i, t])
            a = relax(w, s0, 100, [4, i, t, 1], tie=tie, record_states=True)
            b = relax(w7, s0, 100, [4, i, t, 1], tie=tie, record_states=True)
            runs += 1
            trace = (energy(w, s0),) + a.energy_trace
            non_monotone += any(x < y for x, y in zip(trace, trace[1:]))
            unstable += not a.stable
            diverged += (a.state_trace != b.state_trace
                         or b.energy_trace != tuple(e * 7 for e in a.energy_trace))
    elapsed = time.perf_counter() - start
    ok = runs >= 10_000 and non_monotone == unstable == diverged == 0
    record("C4 dynamics", ok,
           f"{runs} runs: {non_monotone} non-monotone, {unstable} unstable, "
           f"{diverged} x7 trajectory mismatches, {elapsed:.1f} s")
    assert ok


@pytest.mark.slow
def test_c5_random_program_sweep():
    start = time.perf_counter()
    failures = []
    summary = []
    for k in (1, 2, 3):
        cfg = ExperimentConfig(master_seed=2009, num_atoms=40, num_programs=10, num_restarts=100,
                               sweep=(f"nc{k}", (5, 10, 20, 40)))
        for r in run_experiment(cfg):
            summary.append(f"NC{k}={r.sweep_value}:{float(r.global_ratio_wa):.3f}")
            if abs(r.global_ratio_wa - 1) > F(1, 100) or abs(r.global_ratio_hebb - 1) > F(1, 100):
                failures.append(f"NC{k}={r.sweep_value} ratio {float(r.global_ratio_wa):.3f}")
            if r.mean_paired_hamming != 0:
                failures.append(f"NC{k}={r.sweep_value} hamming {r.mean_paired_hamming}")
            if r.median_sweeps > 5:
                failures.append(f"NC{k}={r.sweep_value} median sweeps {r.median_sweeps}")
            if r.num_trials != 1000:
                failures.append(f"NC{k}={r.sweep_value} trials {r.num_trials}")
    elapsed = time.perf_counter() - start
    ok = not failures
    record("C5 random-program sweep", ok,
           f"12 points x 1000 paired trials, min ratio "
           f"{min(float(s.split(':')[1]) for s in summary):.3f}, {elapsed:.1f} s"
           + ("" if ok else f"; failing: {', '.join(failures)}"))
    assert ok


def test_c6_sampled_hebbian():
    p = parse_program(SECTION2_SOURCE)
    wa = compile_program(p)
    exact = wa.nonconstant()
    m = 30_000
    w = learn_sampled(p, m, seed=0)
    scale = F(m, len(p.clauses))
    keys = set(exact.weights) | set(w.weights)
    err = max(abs(w.weight(k).as_fraction() / scale - exact.weight(k).as_fraction()) for k in keys)
    rel = err / max(abs(v.as_fraction()) for v in exact.weights.values())
    outcomes = [run_trial(p, wa, w, [0, t]) for t in range(100)]
    same_state = sum(o.paired_hamming == 0 for o in outcomes)
    same_energy = sum(o.energies_equal for o in outcomes)
    ok_err = rel <= F(5, 100)
    ok_states = all(o.energies_equal and o.paired_hamming == 0 for o in outcomes)
    record("C6 sampled Hebbian", ok_err and ok_states,
           f"relative max-norm error {float(rel):.4f} (<= 0.05: {ok_err}); stable states equal "
           f"in {same_state}/100 paired trials, cost equal in {same_energy}/100")
    assert ok_err
    assert ok_states, f"stable states differ in {100 - same_state}/100 paired trials"


def test_c7_experiment_determinism(tmp_path):
    common = ["experiment", "--seed", "77", "--nn", "40", "--sweep", "nc3=5,10,20,40",
              "--programs", "3", "--restarts", "20"]
    outs = []
    for i, extra in enumerate(([], [], ["--jobs", "2"])):
        out = tmp_path / f"run{i}"
        assert main(common + extra + ["--out", str(out)]) == 0
        outs.append({f: (out / f).read_bytes() for f in ("metrics.csv", "global_ratio.svg", "hamming.svg")})
    ok = outs[0] == outs[1] == outs[2]
    record("C7 determinism", ok, "CSV and both SVGs byte-identical across two runs and --jobs 2")
    assert ok
