"""Paired comparison of compiled and Hebbian-learned networks.

For every data point a batch of random programs is generated; each program is
compiled and learned, and each restart relaxes both networks from one shared
initial state with one shared update-order seed. Rows report the fraction of
runs ending in a model (global minima ratio), the paired Hamming distance
between the two stable states, and sweeps to stability.

Seeds derive from ``(master_seed, point, program, trial)`` only, so results
do not depend on how work units are scheduled across processes.
"""
from __future__ import annotations

import csv
import io
import math
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .dynamics import DEFAULT_TOLERANCE, RelaxationResult, is_global, random_state, relax
from .energy import CostPolynomial, WeightSet, compile_program, program_cost
from .hebbian import learn_exhaustive, learn_sampled
from .logic import (
    MAX_ENUMERATION_ATOMS,
    LogicProgram,
    count_violations,
    enumerate_models,
    generate_random_program,
    hamming,
)

CSV_HEADER = (
    "sweep_param",
    "sweep_value",
    "global_ratio_wa",
    "global_ratio_hebb",
    "mean_hamming",
    "stderr_hamming",
    "mean_sweeps",
    "num_trials",
)
METRICS = ("global_ratio", "hamming")

# spawn-key tags keep the program, trial and learning streams disjoint
_PROGRAM_TAG, _TRIAL_TAG, _LEARN_TAG = 0, 1, 2


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    master_seed: int
    num_atoms: int = 40
    clause_counts: Mapping[int, int] = field(default_factory=dict)
    num_programs: int = 10
    num_restarts: int = 100
    tolerance: Fraction = DEFAULT_TOLERANCE
    max_sweeps: int = 100
    sweep: tuple[str, tuple[int, ...]] | None = None
    tie: str = "up"
    sampled_events: int | None = None
    jobs: int = 1

    def validate(self) -> None:
        for name in ("num_atoms", "num_programs", "num_restarts", "max_sweeps", "jobs"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1")
        if self.tolerance < 0:
            raise ConfigError("tolerance must be >= 0")
        if self.sampled_events is not None and self.sampled_events < 1:
            raise ConfigError("sampled_events must be >= 1")
        if self.sweep is not None:
            param, values = self.sweep
            _parse_param(param)
            if not values:
                raise ConfigError("sweep needs at least one value")
        for nn, counts in self.points():
            for k, n in counts.items():
                if n < 0:
                    raise ConfigError(f"clause count for arity {k} must be >= 0")
                if n and k > nn:
                    raise ConfigError(f"arity {k} exceeds universe of {nn} atoms")

    def points(self) -> list[tuple[int, dict[int, int]]]:
        """``(num_atoms, clause_counts)`` for every data point, in sweep order."""
        base = dict(self.clause_counts)
        if self.sweep is None:
            return [(self.num_atoms, base)]
        param, values = self.sweep
        arity = _parse_param(param)
        out = []
        for v in values:
            if arity is None:
                out.append((int(v), base))
            else:
                out.append((self.num_atoms, {**base, arity: int(v)}))
        return out


def _parse_param(param: str) -> int | None:
    """``"nn"`` -> None; ``"nc<k>"`` -> k."""
    if param == "nn":
        return None
    if param.startswith("nc") and param[2:].isdigit() and int(param[2:]) >= 1:
        return int(param[2:])
    raise ConfigError(f"unknown sweep parameter {param!r}; use nn or nc<k>")


@dataclass(frozen=True)
class TrialOutcome:
    wa_result: RelaxationResult
    hebb_result: RelaxationResult
    paired_hamming: int
    wa_global: bool
    hebb_global: bool
    energies_equal: bool


@dataclass(frozen=True)
class MetricsRow:
    sweep_param: str
    sweep_value: int
    global_ratio_wa: Fraction
    global_ratio_hebb: Fraction
    mean_paired_hamming: float
    stderr_paired_hamming: float
    mean_sweeps: float
    num_trials: int
    median_sweeps: float = 0.0
    energies_equal_ratio: Fraction = Fraction(1)


def _seed(master_seed, *key) -> np.random.SeedSequence:
    return np.random.SeedSequence(master_seed, spawn_key=tuple(int(k) for k in key))


def _child(seed, tag: int) -> np.random.SeedSequence:
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    return np.random.SeedSequence(ss.entropy, spawn_key=tuple(ss.spawn_key) + (tag,))


def run_trial(
    p: LogicProgram,
    wa: WeightSet,
    hebb: WeightSet,
    trial_seed,
    *,
    cost: CostPolynomial | None = None,
    tolerance=DEFAULT_TOLERANCE,
    max_sweeps: int = 100,
    tie: str = "up",
) -> TrialOutcome:
    """Relax both networks from the same initial state and update orders."""
    if wa.num_atoms != hebb.num_atoms or wa.num_atoms != p.num_atoms:
        raise ValueError("weight sets must cover the program's atom universe")
    cost = program_cost(p) if cost is None else cost
    s0 = random_state(p.num_atoms, _child(trial_seed, 0))
    order_seed = _child(trial_seed, 1)
    r_wa = relax(wa, s0, max_sweeps, order_seed, tie=tie)
    r_hebb = relax(hebb, s0, max_sweeps, order_seed, tie=tie)
    e_wa = cost.evaluate(r_wa.final_state)
    e_hebb = cost.evaluate(r_hebb.final_state)
    return TrialOutcome(
        wa_result=r_wa,
        hebb_result=r_hebb,
        paired_hamming=hamming(r_wa.final_state, r_hebb.final_state),
        wa_global=e_wa.as_fraction() <= tolerance,
        hebb_global=e_hebb.as_fraction() <= tolerance,
        energies_equal=e_wa == e_hebb,
    )


def distance_to_nearest_model(p: LogicProgram, s: Sequence[int]) -> int | None:
    """Exact Hamming distance to the closest model; ``None`` when too large to enumerate."""
    if count_violations(p, s) == 0:
        return 0
    if p.num_atoms > MAX_ENUMERATION_ATOMS:
        return None
    return min(hamming(s, m) for m in enumerate_models(p))


def learned_weights(p: LogicProgram, cfg: ExperimentConfig, learn_seed) -> WeightSet:
    if cfg.sampled_events is None:
        return learn_exhaustive(p)
    return learn_sampled(p, cfg.sampled_events, seed=learn_seed)


def _program_unit(args) -> list[tuple[int, bool, bool, int, bool]]:
    cfg, point, prog_idx, nn, counts = args
    p = generate_random_program(nn, counts, _seed(cfg.master_seed, _PROGRAM_TAG, point, prog_idx))
    wa = compile_program(p)
    hebb = learned_weights(p, cfg, _seed(cfg.master_seed, _LEARN_TAG, point, prog_idx))
    cost = program_cost(p)
    out = []
    for t in range(cfg.num_restarts):
        o = run_trial(
            p, wa, hebb, _seed(cfg.master_seed, _TRIAL_TAG, point, prog_idx, t),
            cost=cost, tolerance=cfg.tolerance, max_sweeps=cfg.max_sweeps, tie=cfg.tie,
        )
        out.append(
            (o.paired_hamming, o.wa_global, o.hebb_global, o.wa_result.sweeps_used, o.energies_equal)
        )
    return out


def _aggregate(param: str, value: int, trials: list) -> MetricsRow:
    n = len(trials)
    ham = [t[0] for t in trials]
    sweeps = [t[3] for t in trials]
    # integer sums keep aggregation exact and order independent
    ham_sum = sum(ham)
    ham_sq = sum(h * h for h in ham)
    mean_h = Fraction(ham_sum, n)
    if n > 1:
        var = (Fraction(ham_sq) - n * mean_h * mean_h) / (n - 1)
        stderr = math.sqrt(var / n)
    else:
        stderr = 0.0
    return MetricsRow(
        sweep_param=param,
        sweep_value=value,
        global_ratio_wa=Fraction(sum(t[1] for t in trials), n),
        global_ratio_hebb=Fraction(sum(t[2] for t in trials), n),
        mean_paired_hamming=float(mean_h),
        stderr_paired_hamming=stderr,
        mean_sweeps=float(Fraction(sum(sweeps), n)),
        num_trials=n,
        median_sweeps=float(statistics.median(sweeps)),
        energies_equal_ratio=Fraction(sum(t[4] for t in trials), n),
    )


def run_experiment(cfg: ExperimentConfig) -> list[MetricsRow]:
    cfg.validate()
    param = cfg.sweep[0] if cfg.sweep else "none"
    points = cfg.points()
    units = [
        (cfg, pi, prog, nn, counts)
        for pi, (nn, counts) in enumerate(points)
        for prog in range(cfg.num_programs)
    ]
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            results = list(pool.map(_program_unit, units))
    else:
        results = [_program_unit(u) for u in units]
    rows = []
    for pi, (nn, counts) in enumerate(points):
        chunk = results[pi * cfg.num_programs:(pi + 1) * cfg.num_programs]
        trials = [t for unit in chunk for t in unit]
        if cfg.sweep is None:
            value = 0
        else:
            value = int(cfg.sweep[1][pi])
        rows.append(_aggregate(param, value, trials))
    return rows


# --------------------------------------------------------------------------
# output


def _dec(x) -> str:
    return f"{float(x):.6f}"


def write_csv(rows: Iterable[MetricsRow], destination) -> None:
    """Write rows to a path or an open text file (LF line endings)."""
    if isinstance(destination, (str, Path)):
        with open(destination, "w", encoding="utf-8", newline="") as fh:
            write_csv(rows, fh)
        return
    w = csv.writer(destination, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow([
            r.sweep_param, r.sweep_value, _dec(r.global_ratio_wa), _dec(r.global_ratio_hebb),
            _dec(r.mean_paired_hamming), _dec(r.stderr_paired_hamming), _dec(r.mean_sweeps),
            r.num_trials,
        ])


def csv_text(rows: Iterable[MetricsRow]) -> str:
    buf = io.StringIO()
    write_csv(rows, buf)
    return buf.getvalue()


def read_csv(source) -> list[MetricsRow]:
    if isinstance(source, (str, Path)):
        with open(source, encoding="utf-8", newline="") as fh:
            return read_csv(fh)
    reader = csv.DictReader(source)
    if tuple(reader.fieldnames or ()) != CSV_HEADER:
        raise ValueError(f"unexpected CSV header {reader.fieldnames}")
    return [
        MetricsRow(
            sweep_param=d["sweep_param"],
            sweep_value=int(d["sweep_value"]),
            global_ratio_wa=Fraction(d["global_ratio_wa"]),
            global_ratio_hebb=Fraction(d["global_ratio_hebb"]),
            mean_paired_hamming=float(d["mean_hamming"]),
            stderr_paired_hamming=float(d["stderr_hamming"]),
            mean_sweeps=float(d["mean_sweeps"]),
            num_trials=int(d["num_trials"]),
        )
        for d in reader
    ]


def _ratio_stderr(p: Fraction, n: int) -> float:
    return math.sqrt(float(p) * (1 - float(p)) / n) if n else 0.0


def render_plot(rows: Sequence[MetricsRow], metric: str) -> str:
    """Line chart with standard-error bars of ``metric`` against the sweep value."""
    if metric not in METRICS:
        raise ValueError(f"unknown metric {metric!r}; expected one of {METRICS}")
    import matplotlib

    matplotlib.use("Agg")
    from matplotlib import pyplot as plt

    xs = [r.sweep_value for r in rows]
    param = rows[0].sweep_param if rows else "sweep"
    with matplotlib.rc_context({"svg.hashsalt": "hoplogic", "svg.fonttype": "path"}):
        fig, ax = plt.subplots(figsize=(6, 4))
        if metric == "global_ratio":
            for label, attr, marker in (
                ("compiled", "global_ratio_wa", "o"),
                ("Hebbian", "global_ratio_hebb", "s"),
            ):
                ys = [float(getattr(r, attr)) for r in rows]
                errs = [_ratio_stderr(getattr(r, attr), r.num_trials) for r in rows]
                ax.errorbar(xs, ys, yerr=errs, marker=marker, capsize=3, label=label)
            ax.set_ylabel("global minima ratio")
            ax.set_ylim(-0.05, 1.05)
            ax.legend(loc="lower left")
        else:
            ys = [r.mean_paired_hamming for r in rows]
            errs = [r.stderr_paired_hamming for r in rows]
            ax.errorbar(xs, ys, yerr=errs, marker="o", capsize=3)
            ax.set_ylabel("paired Hamming distance")
            top = max([y + e for y, e in zip(ys, errs)] + [1.0])
            ax.set_ylim(-0.05 * top, 1.05 * top)
        ax.set_xlabel(param.upper())
        ax.set_title(f"{'Global minima ratio' if metric == 'global_ratio' else 'Hamming distance'}"
                     f" vs {param.upper()}")
        ax.grid(True, alpha=0.3)
        buf = io.StringIO()
        fig.savefig(buf, format="svg", metadata={"Date": None})
        plt.close(fig)
    return buf.getvalue()


def with_sweep(cfg: ExperimentConfig, param: str, values: Sequence[int]) -> ExperimentConfig:
    return replace(cfg, sweep=(param, tuple(values)))
