"""Monte Carlo evaluation of synthesized strategies.

Runs are vectorized: every step advances all runs of a chunk at once.  Each
run draws its nature (one selection distribution per ``(s, a, Theta)``) and
its uniforms from ``np.random.default_rng([seed, run])``, so results do not
depend on chunking or thread count.
"""
from __future__ import annotations

import csv
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .automata import Dra, Ldba
from .model import AlphaParams, MdpstModel

RANDOM, ADVERSARIAL = "random", "adversarial"
CHUNK = 250  # runs advanced together; bounds the per-run nature tables in memory


@dataclass
class SimConfig:
    runs: int = 1000
    horizon: int = 2000
    seed: int = 42
    nature: str = RANDOM
    windows: tuple = (5, 200)
    trajectory_run: int | None = None

    def validate(self):
        m, w = self.windows
        if self.runs < 1:
            raise ValueError("runs must be at least 1")
        if m < 1 or w < 1 or self.horizon < m * w:
            raise ValueError("horizon must cover the satisfaction windows (m * w steps)")
        if self.nature not in (RANDOM, ADVERSARIAL):
            raise ValueError(f"unknown nature {self.nature!r}")


@dataclass
class RunVerdict:
    satisfied: bool
    accepting_visits: int
    violation_step: int | None = None
    diagnostic: str | None = None


@dataclass
class SimReport:
    verdicts: list
    config: SimConfig
    trajectory: list = field(default_factory=list)

    @property
    def satisfied_fraction(self) -> float:
        return sum(v.satisfied for v in self.verdicts) / len(self.verdicts)

    def to_dict(self) -> dict:
        return {
            "runs": len(self.verdicts),
            "horizon": self.config.horizon,
            "seed": self.config.seed,
            "nature": self.config.nature,
            "windows": list(self.config.windows),
            "satisfied": sum(v.satisfied for v in self.verdicts),
            "satisfied_fraction": self.satisfied_fraction,
            "verdicts": [
                {
                    "run": i,
                    "satisfied": v.satisfied,
                    "accepting_visits": v.accepting_visits,
                    "violation_step": v.violation_step,
                    "diagnostic": v.diagnostic,
                }
                for i, v in enumerate(self.verdicts)
            ],
        }

    def write_csv(self, path):
        with open(path, "w", newline="") as f:
            wr = csv.writer(f)
            wr.writerow(["run", "satisfied", "accepting_visits", "violation_step"])
            for i, v in enumerate(self.verdicts):
                wr.writerow([i, int(v.satisfied), v.accepting_visits,
                             "" if v.violation_step is None else v.violation_step])

    def write_trajectory(self, path, cells_of=None):
        with open(path, "w", newline="") as f:
            wr = csv.writer(f)
            wr.writerow(["step", "cell", "orientation", "q"])
            for step, s, q in self.trajectory:
                cell, o = cells_of(s) if cells_of else (s, "")
                wr.writerow([step, cell, o, q])


# -- model tables ----------------------------------------------------------

class _Tables:
    """Padded arrays of outcome masses and target members."""

    def __init__(self, model: MdpstModel):
        ns, na = model.n_states, len(model.actions)
        K = max(len(v) for v in model.transitions.values())
        M = max(len(o.targets) for v in model.transitions.values() for o in v)
        self.ns, self.na, self.K, self.M = ns, na, K, M
        self.cum = np.ones((ns, na, K))           # cumulative outcome masses
        self.mem = np.zeros((ns, na, K, M), dtype=np.int64)
        self.valid = np.zeros((ns, na, K, M), dtype=bool)
        self.keys = {}
        for (s, a), outs in model.transitions.items():
            acc = 0.0
            for k, o in enumerate(outs):
                acc += o.prob
                self.cum[s, a, k] = acc
                ms = sorted(o.targets)
                self.mem[s, a, k, :len(ms)] = ms
                self.mem[s, a, k, len(ms):] = ms[-1]
                self.valid[s, a, k, :len(ms)] = True
                self.keys[(s, a, k)] = o.targets
            self.cum[s, a, len(outs) - 1:] = 1.0

    def alpha(self, rng) -> np.ndarray:
        """Uniform draw from each simplex: normalized unit exponentials."""
        e = rng.standard_exponential(self.valid.shape) * self.valid
        tot = e.sum(axis=-1, keepdims=True)
        tot[tot == 0] = 1.0
        return e / tot


def sample_nature(model: MdpstModel, seed: int) -> AlphaParams:
    tab = _Tables(model)
    al = tab.alpha(np.random.default_rng(seed))
    weights = {}
    for (s, a, k), targets in tab.keys.items():
        ms = tab.mem[s, a, k][tab.valid[s, a, k]]
        weights[(s, a, targets)] = {int(m): float(x) for m, x in zip(ms, al[s, a, k][tab.valid[s, a, k]])}
    return AlphaParams(weights)


# -- automaton tracking ----------------------------------------------------

class _Tracker:
    """Memory update, jump, acceptance and action tables over (s, q)."""

    def __init__(self, model, aut, strategy):
        ns = model.n_states
        if aut is None:
            nq = 1
            delta = np.zeros((ns, 1), dtype=np.int64)
            acc = np.zeros((ns, 1), dtype=bool)
            for s in getattr(model, "accepting", ()):
                acc[s, 0] = True
            self.pairs = None
        else:
            nq = aut.n_states
            delta = np.full((ns, nq), -1, dtype=np.int64)
            acc = np.zeros((ns, nq), dtype=bool)
            for s in range(ns):
                lab = model.labels[s]
                for q in range(nq):
                    e = aut.step_edge(q, lab)
                    if e is not None:
                        delta[s, q] = e.dst
                    if isinstance(aut, Ldba):
                        acc[s, q] = q in aut.accepting or (e is not None and e.accepting)
            self.pairs = None
            if isinstance(aut, Dra):
                self.pairs = [
                    (np.array([[q in fin for q in range(nq)]] * ns), np.array([[q in inf for q in range(nq)]] * ns))
                    for fin, inf in aut.pairs
                ]
                acc = np.logical_or.reduce([inf for _, inf in self.pairs])
        self.nq = nq
        self.delta = delta
        self.acc = acc
        jump = np.tile(np.arange(nq), (ns, 1))
        for (s, q), t in strategy.jumps.items():
            jump[s, q] = t
        self.jump = jump
        self.action = self._table(model, strategy.choices, ns, nq)
        self.phase_action = [self._table(model, ch, ns, nq) for _, ch in strategy.phases]
        self.phase_target = [t for t, _ in strategy.phases]

    @staticmethod
    def _table(model, choices, ns, nq):
        tab = np.full((ns, nq), -1, dtype=np.int64)
        for (s, q), a in choices.items():
            if 0 <= s < ns and 0 <= q < nq:
                tab[s, q] = model.action_index(a)
        return tab


def _adversary(model, tab: _Tables, nq, values, ranks):
    """Member minimizing the product value, ties toward the larger rank."""
    adv = np.zeros((tab.ns, tab.na, tab.K, nq), dtype=np.int64)
    big = 1 << 30
    for (s, a, k) in tab.keys:
        ms = tab.mem[s, a, k][tab.valid[s, a, k]]
        for qn in range(nq):
            prod = ms * nq + qn
            key = [(values[i], -ranks.get(int(i), big), int(m)) for i, m in zip(prod, ms)]
            adv[s, a, k, qn] = min(key)[2]
    return adv


def _simulate_chunk(run_ids, model, tab, tr, cfg, adv):
    R = len(run_ids)
    H = cfg.horizon
    m, w = cfg.windows
    start = H - m * w
    ar = np.arange(R)
    rngs = [np.random.default_rng([cfg.seed, int(r)]) for r in run_ids]
    u_out = np.stack([g.random(H) for g in rngs])
    u_mem = np.stack([g.random(H) for g in rngs])
    if adv is None:
        alpha_cum = np.cumsum(np.stack([tab.alpha(g) for g in rngs]), axis=-1)
    s = np.full(R, model.initial, dtype=np.int64)
    q = np.full(R, tr.init_q, dtype=np.int64)
    alive = np.ones(R, dtype=bool)
    violation = np.full(R, -1, dtype=np.int64)
    diag = [None] * R
    visits = np.zeros(R, dtype=np.int64)
    win = np.zeros((R, m), dtype=bool)
    pairs = tr.pairs
    if pairs:
        fin_win = np.zeros((len(pairs), R, m), dtype=bool)
        inf_win = np.zeros((len(pairs), R, m), dtype=bool)
    phase = np.zeros(R, dtype=np.int64)
    phase_tab = np.stack(tr.phase_action) if tr.phase_action else None
    traj = []
    trace_pos = None
    if cfg.trajectory_run is not None and cfg.trajectory_run in list(run_ids):
        trace_pos = list(run_ids).index(cfg.trajectory_run)
    for t in range(H):
        qe = tr.jump[s, q]
        a = tr.action[s, qe]
        if phase_tab is not None:
            pa = phase_tab[phase, s, qe]
            a = np.where(pa >= 0, pa, a)
        hit = tr.acc[s, qe] & alive
        visits += hit
        if t >= start:
            wi = (t - start) // w
            win[:, wi] |= hit
            if pairs:
                for k, (fin, inf) in enumerate(pairs):
                    fin_win[k, :, wi] |= fin[s, qe] & alive
                    inf_win[k, :, wi] |= inf[s, qe] & alive
        if trace_pos is not None and alive[trace_pos]:
            traj.append((t, int(s[trace_pos]), int(qe[trace_pos])))
        undefined = alive & (a < 0)
        for i in np.flatnonzero(undefined):
            diag[i] = f"strategy undefined at state {model.state_name(int(s[i]))}, memory {int(qe[i])}"
            violation[i] = t
        alive &= ~undefined
        qn = tr.delta[s, qe]
        dead = alive & (qn < 0)
        for i in np.flatnonzero(dead):
            diag[i] = "automaton has no transition (safety violation)"
            violation[i] = t
        alive &= ~dead
        if not alive.any():
            break
        if tr.phase_target:
            for k, (ts, tq) in enumerate(tr.phase_target):
                adv_ph = alive & (phase == k) & (s == ts) & (qe == tq)
                phase[adv_ph] = (k + 1) % len(tr.phase_target)
        asafe = np.where(alive, a, 0)
        ssafe = np.where(alive, s, 0)
        k_out = (u_out[:, t][:, None] > tab.cum[ssafe, asafe]).sum(axis=1)
        k_out = np.minimum(k_out, tab.K - 1)
        if adv is not None:
            nxt = adv[ssafe, asafe, k_out, np.maximum(qn, 0)]
        else:
            cum = alpha_cum[ar, ssafe, asafe, k_out]
            j = (u_mem[:, t][:, None] > cum).sum(axis=1)
            valid_n = tab.valid[ssafe, asafe, k_out].sum(axis=1)
            j = np.minimum(j, valid_n - 1)
            nxt = tab.mem[ssafe, asafe, k_out, j]
        s = np.where(alive, nxt, s)
        q = np.where(alive, qn, q)
    if pairs:
        sat_pairs = [(~fin_win[k].any(axis=1)) & inf_win[k].all(axis=1) for k in range(len(pairs))]
        ok = np.logical_or.reduce(sat_pairs)
    else:
        ok = win.all(axis=1)
    ok = ok & alive
    verdicts = [
        RunVerdict(bool(ok[i]), int(visits[i]), None if violation[i] < 0 else int(violation[i]), diag[i])
        for i in range(R)
    ]
    return verdicts, traj


def simulate(model: MdpstModel, aut, strategy, cfg: SimConfig | None = None,
             values=None, ranks=None) -> SimReport:
    """Simulate ``strategy`` on ``model`` tracked by ``aut``.

    ``aut=None`` treats ``model`` as a pre-built product.  The adversarial
    nature needs the product ``values`` (and optionally ``ranks``) from the
    final value iteration.
    """
    cfg = cfg or SimConfig()
    cfg.validate()
    tab = _Tables(model)
    tr = _Tracker(model, aut, strategy)
    tr.init_q = strategy.initial_memory if aut is not None else 0
    adv = None
    if cfg.nature == ADVERSARIAL:
        if values is None:
            raise ValueError("adversarial nature needs product values")
        adv = _adversary(model, tab, tr.nq, np.asarray(values), ranks or {})
    threads = max(1, int(os.environ.get("MDPST_THREADS", "1") or 1))
    runs = np.arange(cfg.runs)
    chunks = [runs[i:i + CHUNK] for i in range(0, cfg.runs, CHUNK)]

    def work(c):
        return _simulate_chunk(c, model, tab, tr, cfg, adv)

    if threads == 1 or len(chunks) == 1:
        results = [work(c) for c in chunks]
    else:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            results = list(ex.map(work, chunks))
    verdicts, traj = [], []
    for v, t in results:
        verdicts.extend(v)
        traj.extend(t)
    return SimReport(verdicts, cfg, traj)
