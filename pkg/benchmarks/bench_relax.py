"""Compare the compiled and pure-Python sweep kernels on NN=40 networks.

    python benchmarks/bench_relax.py [--runs 2000] [--nn 40]

Both kernels relax the same (weights, initial state, seed) triples; results
are checked for equality before timings are reported.
"""
import argparse
import time

from hoplogic.dynamics import available_backends, random_state, relax
from hoplogic.energy import compile_program
from hoplogic.logic import generate_random_program


def workload(nn, runs, counts):
    progs = [compile_program(generate_random_program(nn, counts, seed=[1, i])) for i in range(10)]
    return [(progs[i % 10], random_state(nn, [2, i]), [3, i]) for i in range(runs)]


def bench(backend, jobs, tie):
    t0 = time.perf_counter()
    results = [relax(w, s0, 100, seed, backend=backend, tie=tie) for w, s0, seed in jobs]
    return time.perf_counter() - t0, results


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--runs", type=int, default=2000)
    ap.add_argument("--nn", type=int, default=40)
    ap.add_argument("--tie", default="up")
    args = ap.parse_args()
    backends = available_backends()
    print(f"backends: {', '.join(sorted(backends))}")
    for label, counts in (("NC3=40", {3: 40}), ("NC1=NC2=NC3=20", {1: 20, 2: 20, 3: 20}),
                          ("NC3=160", {3: 160})):
        jobs = workload(args.nn, args.runs, counts)
        timings = {}
        reference = None
        for name in sorted(backends):
            elapsed, results = bench(name, jobs, args.tie)
            if reference is None:
                reference = results
            elif results != reference:
                raise SystemExit(f"{name} disagrees with {sorted(backends)[0]}")
            timings[name] = elapsed
        line = "  ".join(f"{n} {t * 1e6 / args.runs:8.1f} us/run" for n, t in sorted(timings.items()))
        if len(timings) == 2:
            line += f"  speedup x{timings['python'] / timings['cython']:.1f}"
        print(f"{label:18s} NN={args.nn}  {line}")


if __name__ == "__main__":
    main()
