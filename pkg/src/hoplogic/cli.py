"""Command-line interface: ``hoplogic <subcommand> ...``.

Exit status: 0 on success (and equivalence), 1 when compiled and learned
networks disagree, 2 for usage, parse or configuration errors.
"""
from __future__ import annotations

import argparse
import csv
import sys
from fractions import Fraction
from itertools import combinations
from pathlib import Path

from . import __version__
from .dynamics import BACKEND, DEFAULT_MAX_SWEEPS, TIE_RULES, random_state, relax
from .energy import (
    WeightsFormatError,
    compile_program,
    dump_weights,
    format_fraction,
    load_weights,
    program_cost,
    to_paper_convention,
)
from .experiment import (
    CSV_HEADER,
    ConfigError,
    ExperimentConfig,
    read_csv,
    render_plot,
    run_experiment,
    run_trial,
    write_csv,
)
from .hebbian import learn_exhaustive, learn_sampled
from .logic import LogicProgram, ProgramError, format_program, parse_program

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE = 0, 1, 2
ZERO_ROWS_LIMIT = 12


class UsageError(Exception):
    pass


def _read_program(path: str, nn: int | None = None) -> LogicProgram:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return parse_program(text, nn)
    except ProgramError as exc:
        raise UsageError(f"{path}: {exc}") from None


def _read_weights(path: str, num_atoms: int):
    try:
        w = load_weights(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    except WeightsFormatError as exc:
        raise UsageError(f"{path}: {exc}") from None
    if w.num_atoms > num_atoms:
        raise UsageError(f"{path}: weights reference atom {w.num_atoms - 1}, program has {num_atoms}")
    return type(w)(num_atoms, w.weights, w.constant)


def _out_dir(path: str | None) -> Path | None:
    if path is None:
        return None
    d = Path(path)
    d.mkdir(parents=True, exist_ok=True)
    return d


def _state_str(p: LogicProgram, s) -> str:
    return " ".join(f"{a.name}={'+' if v > 0 else '-'}" for a, v in zip(p.atoms, s))


# --------------------------------------------------------------------------
# subcommands


def cmd_parse(args) -> int:
    p = _read_program(args.program, args.nn)
    print(f"% {p.num_atoms} atoms, {len(p.clauses)} clauses")
    print("% atom indices: " + " ".join(f"{a.name}:{a.index}" for a in p.atoms))
    sys.stdout.write(format_program(p))
    return EXIT_OK


def compile_report(p: LogicProgram, zeros: bool = False) -> str:
    """Per-clause and total weights in the ``J^(n)`` reporting convention."""
    total = to_paper_convention(compile_program(p))
    per_clause = [
        to_paper_convention(compile_program(LogicProgram(p.atoms, (c,)))) for c in p.clauses
    ]
    max_order = max((c.arity for c in p.clauses), default=0)
    if zeros and p.num_atoms <= ZERO_ROWS_LIMIT:
        keys = [k for n in range(max_order, 0, -1) for k in combinations(range(p.num_atoms), n)]
    else:
        seen = set()
        for pw in per_clause:
            for t in pw.tensors.values():
                seen.update(t)
        keys = sorted(seen, key=lambda k: (-len(k), k))

    def label(k):
        return f"J{len(k)} " + " ".join(p.atoms[i].name for i in k)

    lines = ["% synaptic strengths, J^(n) = w / (n-1)!", "% per clause:"]
    header = ["synapse"] + [str(c) for c in p.clauses] + ["total"]
    table = [header] + [
        [label(k)] + [format_fraction(pw.get(k)) for pw in per_clause] + [format_fraction(total.get(k))]
        for k in keys
    ]
    widths = [max(len(r[i]) for r in table) for i in range(len(header))]
    for r in table:
        lines.append("  ".join(cell.ljust(w) for cell, w in zip(r, widths)).rstrip())
    lines.append("% totals:")
    for k in keys:
        lines.append(f"{label(k)} {format_fraction(total.get(k))}")
    return "\n".join(lines) + "\n"


def cmd_compile(args) -> int:
    p = _read_program(args.program, args.nn)
    w = compile_program(p)
    report = compile_report(p, args.zeros)
    sys.stdout.write(report)
    out = _out_dir(args.out)
    if out is not None:
        (out / "weights.txt").write_text(dump_weights(w), encoding="utf-8")
        (out / "report.txt").write_text(report, encoding="utf-8")
    return EXIT_OK


def _hebbian(p: LogicProgram, args):
    if args.sampled is None:
        return learn_exhaustive(p)
    if args.seed is None:
        raise UsageError("--sampled requires --seed")
    if args.sampled < 1:
        raise UsageError("--sampled must be >= 1")
    return learn_sampled(p, args.sampled, seed=args.seed)


def cmd_learn(args) -> int:
    p = _read_program(args.program, args.nn)
    w = _hebbian(p, args)
    text = dump_weights(w)
    sys.stdout.write(text)
    out = _out_dir(args.out)
    if out is not None:
        (out / "learned_weights.txt").write_text(text, encoding="utf-8")
    return EXIT_OK


def cmd_relax(args) -> int:
    p = _read_program(args.program, args.nn)
    if p.num_atoms == 0:
        raise UsageError("program has no atoms")
    w = _read_weights(args.weights, p.num_atoms) if args.weights else compile_program(p)
    cost = program_cost(p)
    s0 = random_state(p.num_atoms, [args.seed, 0])
    r = relax(w, s0, args.max_sweeps, [args.seed, 1], tie=args.tie)
    print(f"initial   {_state_str(p, s0)}")
    for i, e in enumerate(r.energy_trace, 1):
        print(f"sweep {i:3d} energy {e}")
    print(f"final     {_state_str(p, r.final_state)}")
    print(f"stable {str(r.stable).lower()}  sweeps {r.sweeps_used}  flips {r.total_flips}")
    violated = cost.evaluate(r.final_state)
    print(f"violated clauses {violated}  global {str(violated.as_fraction() <= args.tolerance).lower()}")
    return EXIT_OK


def cmd_compare(args) -> int:
    p = _read_program(args.program, args.nn)
    if p.num_atoms == 0:
        raise UsageError("program has no atoms")
    wa = compile_program(p)
    hebb = _read_weights(args.hebb_weights, p.num_atoms) if args.hebb_weights else _hebbian(p, args)
    if args.scale != 1:
        hebb = hebb.scaled(args.scale)
    cost = program_cost(p)
    rows, bad = [], []
    for t in range(args.restarts):
        seed = [args.seed, t]
        o = run_trial(p, wa, hebb, seed, cost=cost, tolerance=args.tolerance,
                      max_sweeps=args.max_sweeps, tie=args.tie)
        ok = o.energies_equal and o.paired_hamming == 0
        rows.append([t, o.paired_hamming, int(o.energies_equal), int(o.wa_global),
                     int(o.hebb_global), o.wa_result.sweeps_used, o.hebb_result.sweeps_used])
        if not ok:
            bad.append((t, o))
    out = _out_dir(args.out)
    if out is not None:
        with open(out / "compare.csv", "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["trial", "paired_hamming", "energies_equal", "wa_global", "hebb_global",
                        "wa_sweeps", "hebb_sweeps"])
            w.writerows(rows)
    n = len(rows)
    print(f"trials {n}  equal {n - len(bad)}  "
          f"wa_global {sum(r[3] for r in rows)}  hebb_global {sum(r[4] for r in rows)}")
    if bad:
        for t, o in bad:
            print(f"mismatch: trial {t} (seed {args.seed},{t}) hamming {o.paired_hamming} "
                  f"energies_equal {str(o.energies_equal).lower()}", file=sys.stderr)
        return EXIT_MISMATCH
    return EXIT_OK


def _parse_sweep(text: str) -> tuple[str, tuple[int, ...]]:
    param, sep, values = text.partition("=")
    if not sep:
        raise UsageError(f"--sweep expects PARAM=V1,V2,..., got {text!r}")
    try:
        vals = tuple(int(v) for v in values.split(",") if v.strip())
    except ValueError:
        raise UsageError(f"--sweep values must be integers: {values!r}") from None
    return param.strip().lower(), vals


def _experiment_config(args) -> ExperimentConfig:
    counts = {k: v for k, v in ((1, args.nc1), (2, args.nc2), (3, args.nc3)) if v}
    cfg = ExperimentConfig(
        master_seed=args.seed,
        num_atoms=args.nn if args.nn is not None else 40,
        clause_counts=counts,
        num_programs=args.programs,
        num_restarts=args.restarts,
        tolerance=args.tolerance,
        max_sweeps=args.max_sweeps,
        sweep=_parse_sweep(args.sweep) if args.sweep else None,
        tie=args.tie,
        sampled_events=args.sampled,
        jobs=args.jobs,
    )
    try:
        cfg.validate()
    except ConfigError as exc:
        raise UsageError(str(exc)) from None
    return cfg


def _write_plots(rows, out: Path) -> list[Path]:
    written = []
    for metric in ("global_ratio", "hamming"):
        path = out / f"{metric}.svg"
        path.write_text(render_plot(rows, metric), encoding="utf-8")
        written.append(path)
    return written


def cmd_experiment(args) -> int:
    cfg = _experiment_config(args)
    rows = run_experiment(cfg)
    out = _out_dir(args.out or "results")
    write_csv(rows, out / "metrics.csv")
    paths = [out / "metrics.csv", *_write_plots(rows, out)]
    print(",".join(CSV_HEADER[:4]) + ",mean_hamming,median_sweeps")
    for r in rows:
        print(f"{r.sweep_param},{r.sweep_value},{float(r.global_ratio_wa):.6f},"
              f"{float(r.global_ratio_hebb):.6f},{r.mean_paired_hamming:.6f},{r.median_sweeps:g}")
    print("wrote " + " ".join(str(p) for p in paths))
    return EXIT_OK


def cmd_plot(args) -> int:
    try:
        rows = read_csv(args.csv)
    except OSError as exc:
        raise UsageError(f"cannot read {args.csv}: {exc.strerror}") from None
    except ValueError as exc:
        raise UsageError(f"{args.csv}: {exc}") from None
    out = _out_dir(args.out or ".")
    paths = _write_plots(rows, out)
    print("wrote " + " ".join(str(p) for p in paths))
    return EXIT_OK


# --------------------------------------------------------------------------
# argument parsing


def _tolerance(text: str) -> Fraction:
    try:
        t = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"invalid tolerance {text!r}") from None
    if t < 0:
        raise argparse.ArgumentTypeError("tolerance must be >= 0")
    return t


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hoplogic", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__} ({BACKEND} kernel)")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, seed_required=False, dynamics=False):
        p.add_argument("--seed", type=int, required=seed_required, help="RNG seed (u64)")
        p.add_argument("--out", help="output directory")
        p.add_argument("--nn", type=_positive, help="atom universe size (pads with unused atoms)")
        if dynamics:
            p.add_argument("--max-sweeps", type=_positive, default=DEFAULT_MAX_SWEEPS)
            p.add_argument("--tolerance", type=_tolerance, default=Fraction(1, 1000))
            p.add_argument("--tie", choices=TIE_RULES, default="up",
                           help="zero-field rule: keep the spin, or turn it true (default)")

    p = sub.add_parser("parse", help="parse and normalize a program")
    p.add_argument("program")
    common(p)
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("compile", help="compile a program to weights (per-clause weight table)")
    p.add_argument("program")
    p.add_argument("--zeros", action="store_true", help=f"list zero synapses too (<= {ZERO_ROWS_LIMIT} atoms)")
    common(p)
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("learn", help="Hebbian-learn weights from clause events")
    p.add_argument("program")
    p.add_argument("--sampled", type=int, metavar="EVENTS", help="learn from sampled events")
    common(p)
    p.set_defaults(func=cmd_learn)

    p = sub.add_parser("relax", help="relax a network from a random state")
    p.add_argument("program")
    p.add_argument("--weights", help="weights file (default: compile the program)")
    common(p, seed_required=True, dynamics=True)
    p.set_defaults(func=cmd_relax)

    p = sub.add_parser("compare", help="paired relaxation of compiled vs learned networks")
    p.add_argument("program")
    p.add_argument("--restarts", "--trials", type=_positive, default=100, dest="restarts",
                   help="number of paired trials")
    p.add_argument("--hebb-weights", help="weights file to compare instead of learning")
    p.add_argument("--scale", type=_positive, default=1, help="multiply learned weights by this")
    p.add_argument("--sampled", type=int, metavar="EVENTS")
    common(p, seed_required=True, dynamics=True)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("experiment", help="sweep random programs; write CSV and SVG plots")
    for k in (1, 2, 3):
        p.add_argument(f"--nc{k}", type=int, default=0, help=f"clauses with {k} literals")
    p.add_argument("--sweep", default="nc3=5,10,20,40", help="PARAM=V1,V2,... (nn or nc<k>)")
    p.add_argument("--programs", type=_positive, default=10, help="programs per point")
    p.add_argument("--restarts", type=_positive, default=100, help="relaxations per program")
    p.add_argument("--sampled", type=_positive, metavar="EVENTS")
    p.add_argument("--jobs", type=_positive, default=1)
    common(p, seed_required=True, dynamics=True)
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("plot", help="render SVG plots from an experiment CSV")
    p.add_argument("csv")
    p.add_argument("--out")
    p.set_defaults(func=cmd_plot)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"hoplogic: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
