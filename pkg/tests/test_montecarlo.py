import math

import numpy as np
import pytest

from mdpst.automata import fixture_ldba
from mdpst.model import MdpstModel, SetOutcome
from mdpst.montecarlo import SimConfig, sample_nature, simulate
from mdpst.product import as_product, worked_example
from mdpst.synthesis import MdpstStrategy, solve


def two_way():
    return MdpstModel([], [(), (), ()], 0, ["a"], {
        (0, 0): [SetOutcome({1, 2}, 1.0)],
        (1, 0): [SetOutcome({1}, 1.0)],
        (2, 0): [SetOutcome({2}, 1.0)],
    })


def test_singleton_sets_get_point_mass():
    alpha = sample_nature(two_way(), 0)
    assert alpha[(1, 0, frozenset({1}))] == {1: 1.0}


def test_pair_weights_are_uniform_on_average():
    m = two_way()
    key = (0, 0, frozenset({1, 2}))
    draws = np.array([sample_nature(m, seed)[key][1] for seed in range(10_000)])
    assert abs(draws.mean() - 0.5) <= 0.02
    assert 0.0 <= draws.min() and draws.max() <= 1.0


def test_same_seed_same_nature():
    assert sample_nature(two_way(), 3) == sample_nature(two_way(), 3)


def _start_at(p, name):
    m = MdpstModel(p.props, p.labels, p.state_by_name(name), p.actions, p.transitions, p.names)
    return as_product(m, p.accepting)


def test_inside_region_runs_satisfy():
    p = _start_at(worked_example(), "S2")
    _, strat = solve(p)
    rep = simulate(p, None, strat, SimConfig(runs=10_000, horizon=500, seed=1, windows=(5, 100)))
    assert rep.satisfied_fraction >= 0.99


def test_random_natures_respect_the_bound():
    p = worked_example()
    report, strat = solve(p)
    v, runs = report.value, 2000
    rep = simulate(p, None, strat, SimConfig(runs=runs, horizon=1000, seed=7))
    assert rep.satisfied_fraction >= v - 3 * math.sqrt(v * (1 - v) / runs)


def test_adversarial_nature_close_to_value():
    p = worked_example()
    report, strat = solve(p)
    ps = report.product_strategy
    rep = simulate(p, None, strat, SimConfig(runs=2000, horizon=1000, seed=2, nature="adversarial"),
                   values=ps.values.values, ranks=ps.ranks)
    assert abs(rep.satisfied_fraction - report.value) <= 3 * math.sqrt(0.16 / 2000)


def test_adversarial_needs_values():
    p = worked_example()
    _, strat = solve(p)
    with pytest.raises(ValueError):
        simulate(p, None, strat, SimConfig(runs=5, nature="adversarial"))


def _obstacle_line():
    # 0 -go-> 1, and state 1 carries obs
    return MdpstModel(["b", "obs"], [{"b"}, {"obs"}], 0, ["go"], {
        (0, 0): [SetOutcome({1}, 1.0)],
        (1, 0): [SetOutcome({1}, 1.0)],
    })


def test_safety_violation_is_recorded():
    m = _obstacle_line()
    aut = fixture_ldba("persist_avoid", [["b"]], "obs")
    strat = MdpstStrategy(0, {(0, 1): "go", (1, 1): "go"}, {(0, 0): 1}, 0.0)
    rep = simulate(m, aut, strat, SimConfig(runs=3, horizon=20, windows=(2, 5)))
    for v in rep.verdicts:
        assert not v.satisfied
        assert v.violation_step == 1
        assert "safety" in v.diagnostic


def test_undefined_strategy_aborts_run():
    m = _obstacle_line()
    aut = fixture_ldba("persist_avoid", [["b"]], "obs")
    strat = MdpstStrategy(0, {}, {(0, 0): 1}, 0.0)
    rep = simulate(m, aut, strat, SimConfig(runs=2, horizon=20, windows=(2, 5)))
    assert all(not v.satisfied and v.violation_step == 0 for v in rep.verdicts)
    assert "strategy undefined" in rep.verdicts[0].diagnostic


def test_reproducible_across_thread_counts(monkeypatch):
    p = worked_example()
    _, strat = solve(p)
    cfg = SimConfig(runs=600, horizon=1000, seed=9)
    monkeypatch.setenv("MDPST_THREADS", "1")
    a = simulate(p, None, strat, cfg).to_dict()
    monkeypatch.setenv("MDPST_THREADS", "3")
    b = simulate(p, None, strat, cfg).to_dict()
    assert a == b


def test_config_validation():
    p = worked_example()
    _, strat = solve(p)
    with pytest.raises(ValueError, match="horizon"):
        simulate(p, None, strat, SimConfig(runs=1, horizon=100))
    with pytest.raises(ValueError):
        simulate(p, None, strat, SimConfig(runs=0))


def test_csv_and_trajectory(tmp_path):
    p = worked_example()
    _, strat = solve(p)
    rep = simulate(p, None, strat, SimConfig(runs=4, horizon=1000, seed=1, trajectory_run=0))
    rep.write_csv(tmp_path / "runs.csv")
    rep.write_trajectory(tmp_path / "traj.csv")
    rows = (tmp_path / "runs.csv").read_text().splitlines()
    assert rows[0] == "run,satisfied,accepting_visits,violation_step" and len(rows) == 5
    traj = (tmp_path / "traj.csv").read_text().splitlines()
    assert traj[0] == "step,cell,orientation,q"
    assert len(traj) == 1001
