import io
from fractions import Fraction

import pytest

from hoplogic.energy import WeightSet, compile_program
from hoplogic.experiment import (
    CSV_HEADER,
    ConfigError,
    ExperimentConfig,
    MetricsRow,
    csv_text,
    distance_to_nearest_model,
    read_csv,
    render_plot,
    run_experiment,
    run_trial,
    write_csv,
)
from hoplogic.hebbian import learn_exhaustive
from hoplogic.logic import generate_random_program, parse_program


def test_run_trial_section2(section2):
    wa, hebb = compile_program(section2), learn_exhaustive(section2)
    for seed in range(10):
        o = run_trial(section2, wa, hebb, seed)
        assert o.paired_hamming == 0 and o.energies_equal and o.wa_global and o.hebb_global


def test_run_trial_deterministic(section2):
    wa = compile_program(section2)
    assert run_trial(section2, wa, wa, 5) == run_trial(section2, wa, wa, 5)


def test_run_trial_scale_invariant():
    p = generate_random_program(12, {1: 2, 2: 6, 3: 6}, seed=3)
    wa = compile_program(p)
    for seed in range(20):
        o = run_trial(p, wa, learn_exhaustive(p).scaled(3), seed)
        assert o.paired_hamming == 0 and o.energies_equal


def test_run_trial_universe_mismatch(section2):
    with pytest.raises(ValueError):
        run_trial(section2, compile_program(section2), WeightSet(5), 0)


def test_distance_to_nearest_model(section2):
    assert distance_to_nearest_model(section2, (1, 1, 1, 1)) == 0
    assert distance_to_nearest_model(section2, (-1, -1, -1, -1)) == 1
    p = generate_random_program(40, {1: 5}, seed=0)
    fact = p.clauses[0].head.index
    s = tuple(-1 if i == fact else 1 for i in range(40))
    assert distance_to_nearest_model(p, s) is None


def small_cfg(**kw):
    base = dict(master_seed=11, num_atoms=10, num_programs=3, num_restarts=7,
                sweep=("nc3", (2, 4)), clause_counts={2: 2})
    base.update(kw)
    return ExperimentConfig(**base)


def test_run_experiment_accounting():
    rows = run_experiment(small_cfg())
    assert [r.sweep_value for r in rows] == [2, 4]
    assert all(r.num_trials == 21 for r in rows)
    for r in rows:
        assert 0 <= r.global_ratio_wa <= 1
        assert r.mean_paired_hamming == 0 and r.energies_equal_ratio == 1
        assert r.global_ratio_wa == r.global_ratio_hebb


def test_run_experiment_parallel_identical():
    assert run_experiment(small_cfg(jobs=2)) == run_experiment(small_cfg(jobs=1))


def test_run_experiment_nn_sweep():
    rows = run_experiment(small_cfg(sweep=("nn", (5, 8)), clause_counts={3: 3}))
    assert [r.sweep_value for r in rows] == [5, 8]


def test_run_experiment_sampled_path():
    rows = run_experiment(small_cfg(sampled_events=2000, sweep=None))
    assert len(rows) == 1 and rows[0].sweep_param == "none"


@pytest.mark.parametrize("kw", [dict(num_programs=0), dict(tolerance=Fraction(-1)),
                                dict(sweep=("xx", (1,))), dict(sweep=("nc3", ())),
                                dict(sweep=("nn", (2,)), clause_counts={3: 1}), dict(clause_counts={2: -1})])
def test_config_errors(kw):
    with pytest.raises(ConfigError):
        run_experiment(small_cfg(**kw))


def row(value=5, ratio=Fraction(1), ham=0.0):
    return MetricsRow("nc3", value, ratio, ratio, ham, 0.0, 3.0, 1000)


def test_write_csv():
    text = csv_text([row()])
    lines = text.split("\n")
    assert lines[0] == ",".join(CSV_HEADER)
    assert lines[1] == "nc3,5,1.000000,1.000000,0.000000,0.000000,3.000000,1000"
    assert text.count("\n") == 2 and "\r" not in text
    assert csv_text([]) == ",".join(CSV_HEADER) + "\n"


def test_csv_round_trip(tmp_path):
    rows = [row(5), row(10, Fraction(3, 4), 0.5)]
    write_csv(rows, tmp_path / "m.csv")
    back = read_csv(tmp_path / "m.csv")
    assert [(r.sweep_value, r.global_ratio_wa, r.mean_paired_hamming) for r in back] == [
        (5, 1, 0.0), (10, Fraction(3, 4), 0.5)]


def test_write_csv_unwritable(tmp_path):
    with pytest.raises(OSError):
        write_csv([row()], tmp_path / "missing" / "m.csv")


def test_render_plot():
    rows = [row(v) for v in (5, 10, 20, 40)]
    svg = render_plot(rows, "global_ratio")
    assert svg.lstrip().startswith("<?xml") and "<svg" in svg
    assert render_plot(rows, "global_ratio") == svg
    assert render_plot(rows, "hamming") != svg
    assert "<svg" in render_plot([row()], "hamming")
    with pytest.raises(ValueError):
        render_plot(rows, "energy")
