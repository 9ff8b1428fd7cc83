"""End-to-end acceptance checks, one test per criterion.

Each test prints a ``criterion N PASS/FAIL`` line and the session summary
repeats them.  Slow criteria (3, 7) take tens of seconds.
"""
import statistics
import time

import numpy as np

from mdpst.automata import accepts_lasso, fixture_dra, fixture_ldba
from mdpst.graphs import reachable
from mdpst.hexworld import default_layout, generate_hexworld, persist_avoid_groups
from mdpst.ltl import eval_lasso, parse_ltl, persist_avoid_formula
from mdpst.montecarlo import SimConfig, simulate
from mdpst.oracle import brute_force_value, classical_buchi_region, enumerate_lassos, sample_lassos
from mdpst.product import build_product, build_product_dra, worked_example
from mdpst.random_models import random_product, refine
from mdpst.synthesis import solve
from mdpst.winning_region import (
    compute_winning_region,
    prune_relevant,
    qualitative_as_reach,
    robust_reach_vi,
    split_accepting,
)

TOL = 1e-6
ORACLE_SEEDS = range(200)


def _forward(p):
    adj = [[] for _ in range(p.n_states)]
    for (s, _), outs in p.transitions.items():
        for o in outs:
            adj[s].extend(o.targets)
    return reachable(adj, [p.initial])


def _hex(nx, ny):
    lay = default_layout(nx, ny)
    groups = persist_avoid_groups(lay)
    return generate_hexworld(lay), fixture_ldba("persist_avoid", groups, "obs"), \
        fixture_dra("persist_avoid", groups, "obs")


def test_criterion_1_worked_example(criterion):
    with criterion(1, "ten-state worked example") as note:
        t0 = time.perf_counter()
        p = worked_example()
        sub = prune_relevant(p)
        assert set(range(10)) - sub.states == {9}            # S10 pruned
        w = compute_winning_region(p, theta=1e-9)
        first = w.log[0]["values"]
        expected = {0: 0.8, 1: 1.0, 2: 1.0, "3out": 1.0, "4out": 0.0,
                    5: 0.0, 6: 0.0, 7: 0.0, 8: 0.94}
        for k, v in expected.items():
            assert abs(first[k] - v) <= TOL, (k, first[k], v)
        assert w.iterations == 2
        assert w.states == frozenset({1, 2, 3})               # S2, S3, S4
        report, strat = solve(p, theta=1e-9)
        elapsed = time.perf_counter() - t0
        assert abs(report.value - 0.8) <= TOL
        assert elapsed < 1.0
        note(f"V(S1)={first[0]:.6f} V(S9)={first[8]:.6f} iterations={w.iterations} "
             f"value={report.value:.6f} time={elapsed:.3f}s")


def test_criterion_2_product_sizes(criterion):
    with criterion(2, "hexworld (10,5) product sizes") as note:
        m, ldba, dra = _hex(10, 5)
        assert ldba.n_states == 4 and dra.n_states == 8
        n1 = build_product(m, ldba).n_states
        n2 = build_product_dra(m, dra).n_states
        note(f"LDBA product {n1}, DRA product {n2}")
        assert n1 == 800
        assert n2 == 1600


def _median_synthesis_time(m, aut, repeats):
    times, report = [], None
    for _ in range(repeats):
        report, _ = solve(m, aut)
        times.append(report.timings["synthesis"])
    return statistics.median(times), report


def test_criterion_3_scaling(criterion):
    with criterion(3, "value, region and scaling on default layouts") as note:
        sizes = [(10, 5), (16, 8), (20, 10)]
        repeats = {(10, 5): 7, (16, 8): 5, (20, 10): 3}
        t_ldba, t_dra = [], []
        for nx, ny in sizes:
            m, ldba, dra = _hex(nx, ny)
            tl, rl = _median_synthesis_time(m, ldba, repeats[(nx, ny)])
            td, rd = _median_synthesis_time(m, dra, repeats[(nx, ny)])
            for r in (rl, rd):
                assert 0.0 < r.value <= 1.0
                assert r.wr_size > 0
            t_ldba.append(tl)
            t_dra.append(td)
            note(f"{nx}x{ny}: LDBA {tl:.3f}s (value {rl.value:.3f}, WR {rl.wr_size}) "
                 f"DRA {td:.3f}s (value {rd.value:.3f}, WR {rd.wr_size})")
        for ts in (t_ldba, t_dra):
            assert all(a <= b for a, b in zip(ts, ts[1:])), ts
        assert all(a < b for a, b in zip(t_ldba, t_dra)), (t_ldba, t_dra)


def test_criterion_4_oracle_equivalence(criterion):
    with criterion(4, "solve value equals brute-force Buchi value") as note:
        bad = []
        for seed in ORACLE_SEEDS:
            p = random_product(seed)
            value = solve(p, theta=1e-12)[0].value
            truth = brute_force_value(p)
            if abs(value - truth) > TOL:
                bad.append((seed, value, truth))
        note(f"{len(ORACLE_SEEDS)} products, {len(bad)} mismatches")
        assert not bad, bad[:5]


def test_criterion_5_classical_degeneration(criterion):
    with criterion(5, "singleton-only products match chain-based oracle") as note:
        bad = []
        for seed in range(1000, 1100):
            p = random_product(seed, classical=True)
            fwd = _forward(p)
            w = compute_winning_region(p, theta=1e-12)
            if set(w.states) != classical_buchi_region(p) & fwd:
                bad.append((seed, "region"))
            values = solve(p, theta=1e-12)[0].product_strategy.values.values
            for s in fwd:
                if abs(values[s] - brute_force_value(p, initial=s)) > TOL:
                    bad.append((seed, s))
        note(f"100 products, {len(bad)} mismatches")
        assert not bad, bad[:5]


def test_criterion_6_refinement_monotone(criterion):
    with criterion(6, "shrinking target sets never lowers the value") as note:
        bad = []
        for seed in range(2000, 2050):
            p = random_product(seed)
            q = refine(p, seed)
            a = solve(p, theta=1e-12)[0].value
            b = solve(q, theta=1e-12)[0].value
            if b < a - 1e-9:
                bad.append((seed, a, b))
        note(f"50 products, {len(bad)} decreases")
        assert not bad, bad


def test_criterion_7_monte_carlo(criterion):
    with criterion(7, "hexworld (10,5) random natures, 1000 x 2000") as note:
        m, ldba, dra = _hex(10, 5)
        for name, aut in (("LDBA", ldba), ("DRA", dra)):
            report, strat = solve(m, aut)
            sim = simulate(m, aut, strat, SimConfig(runs=1000, horizon=2000, seed=42))
            note(f"{name}: value {report.value:.4f}, satisfied {sim.satisfied_fraction:.4f}")
            assert sim.satisfied_fraction >= report.value - 0.03


def test_criterion_8_fixture_languages(criterion):
    with criterion(8, "fixture automata agree with the LTL evaluator") as note:
        lay = default_layout(10, 5)
        groups = persist_avoid_groups(lay)
        phi = persist_avoid_formula(groups, "obs")
        disagreements = 0
        for aut in (fixture_ldba("persist_avoid", groups, "obs"),
                    fixture_dra("persist_avoid", groups, "obs")):
            words = sample_lassos(aut.ap, 12, 1000, seed=8)
            disagreements += sum(accepts_lasso(aut, w) != eval_lasso(phi, w) for w in words)
        gf = parse_ltl("G F a")
        words = enumerate_lassos(["a"], 6)
        for aut in (fixture_ldba("gf", "a"), fixture_dra("gf", "a")):
            disagreements += sum(accepts_lasso(aut, w) != eval_lasso(gf, w) for w in words)
        note(f"2 x 1000 sampled + 2 x {len(words)} exhaustive lassos, "
             f"{disagreements} disagreements")
        assert disagreements == 0


def test_criterion_9_classifier_agreement(criterion):
    with criterion(9, "qualitative and numeric prob-1 sets agree") as note:
        bad = []
        for seed in ORACLE_SEEDS:
            p = random_product(seed)
            sub = prune_relevant(p)
            if not sub.accepting:
                continue
            split = split_accepting(sub)
            qual, _ = qualitative_as_reach(split.compiled, split.targets)
            num = robust_reach_vi(split.compiled, split.targets, theta=1e-9).values >= 1 - 1e-2
            if not np.array_equal(qual, num):
                bad.append(seed)
        note(f"{len(ORACLE_SEEDS)} products, {len(bad)} disagreements")
        assert not bad, bad
