"""Strategy synthesis: values toward the winning region, extraction, induction.

Outside the winning region the strategy maximizes the robust probability of
reaching it.  Inside, it follows attractor ranks toward the accepting
in-copies of the final split model.  This guarantees an accepting visit with
probability 1 from every region state, and therefore infinitely many.
"""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field

import numpy as np

from .automata import Dra, Ldba
from .compiled import Compiled, compiled_of
from .model import MdpstModel
from .product import TAU_REJ, ProductMdpst, as_product, build_product, build_product_dra
from .winning_region import (
    SubProduct,
    ValueFunction,
    WinningRegion,
    compute_winning_region,
    qualitative_as_reach,
    robust_reach_vi,
    split_accepting,
    winning_region_rabin,
)

log = logging.getLogger(__name__)


class StrategyError(RuntimeError):
    pass


@dataclass
class ProductStrategy:
    choice: dict              # product state -> action index (prefix or region mode)
    region: frozenset
    ranks: dict               # region state -> rank
    values: ValueFunction
    prefix_rank: dict = field(default_factory=dict)
    # round-robin variant: list of (target product state, {state: action})
    phases: list = field(default_factory=list)


@dataclass
class MdpstStrategy:
    """Automaton-state memory plus a map ``(s, q) -> model action``.

    ``jumps[(s, q)] = q'`` means the memory jumps to ``q'`` before acting at
    ``s``; the action is then ``choices[(s, q')]``.
    """
    initial_memory: int
    choices: dict
    jumps: dict
    value: float
    phases: list = field(default_factory=list)  # [(target (s, q), {(s, q): action})]

    def resolve(self, s: int, q: int) -> int:
        return self.jumps.get((s, q), q)

    def action(self, s: int, q: int, phase: int | None = None):
        if phase is not None and self.phases:
            a = self.phases[phase][1].get((s, q))
            if a is not None:
                return a
        return self.choices.get((s, q))

    def to_dict(self) -> dict:
        d = {
            "memory": "automaton-state",
            "initial_memory": self.initial_memory,
            "choices": [{"s": s, "q": q, "action": a} for (s, q), a in sorted(self.choices.items())],
            "jumps": [{"s": s, "q": q, "to_q": t} for (s, q), t in sorted(self.jumps.items())],
            "value": self.value,
        }
        if self.phases:
            d["phases"] = [
                {
                    "target": {"s": t[0], "q": t[1]},
                    "choices": [{"s": s, "q": q, "action": a} for (s, q), a in sorted(ch.items())],
                }
                for t, ch in self.phases
            ]
        return d

    @classmethod
    def from_dict(cls, d) -> "MdpstStrategy":
        choices = {(int(c["s"]), int(c["q"])): c["action"] for c in d["choices"]}
        jumps = {(int(j["s"]), int(j["q"])): int(j["to_q"]) for j in d.get("jumps", [])}
        phases = [
            ((int(ph["target"]["s"]), int(ph["target"]["q"])),
             {(int(c["s"]), int(c["q"])): c["action"] for c in ph["choices"]})
            for ph in d.get("phases", [])
        ]
        return cls(int(d.get("initial_memory", 0)), choices, jumps, float(d.get("value", 0.0)), phases)


@dataclass
class SolutionReport:
    value: float
    product_states: int
    product_transitions: int
    wr_size: int
    wr_iterations: int
    vi_sweeps: int
    timings: dict
    automaton_states: int | None = None

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "product_states": self.product_states,
            "product_transitions": self.product_transitions,
            "automaton_states": self.automaton_states,
            "wr_size": self.wr_size,
            "wr_iterations": self.wr_iterations,
            "vi_sweeps": self.vi_sweeps,
            "T_mdl": self.timings.get("model"),
            "T_sys": self.timings.get("synthesis"),
            "timings": self.timings,
        }


def reach_values_to_wr(p: MdpstModel, w: WinningRegion, theta: float = 1e-3,
                       compiled=None) -> ValueFunction:
    c = compiled if compiled is not None else compiled_of(p)
    if not w.states:
        return ValueFunction(np.zeros(p.n_states), 0, True)
    return robust_reach_vi(c, sorted(w.states), theta)


def _hitting_times(c, targets, allowed, tol=1e-6, max_iter=100_000):
    """Robust expected steps to ``targets`` using only ``allowed`` choices.

    Least fixpoint of E = 1 + min_a sum_Theta T * max_{s' in Theta} E(s'),
    iterated upward from 0; nature maximizes.
    """
    E = np.zeros(c.n)
    big = np.inf
    for _ in range(max_iter):
        ext = np.append(E, big)
        worst = np.maximum.reduceat(ext[c.members], c.member_ptr[:-1])
        q = np.add.reduceat(c.prob * worst, c.outcome_ptr[:-1])
        q = np.where(allowed, q, big)
        new = np.where(targets, 0.0, 1.0 + np.minimum.reduceat(q, c.state_ptr[:-1]))
        fin = np.isfinite(new)
        if fin.any() and np.max(np.abs(new[fin] - E[fin]), initial=0.0) < tol * max(1.0, np.max(new[fin])):
            E = new
            break
        E = new
    ext = np.append(E, big)
    worst = np.maximum.reduceat(ext[c.members], c.member_ptr[:-1])
    return np.add.reduceat(c.prob * worst, c.outcome_ptr[:-1])


def _fixed_choice_model(c, picks):
    """Compiled model keeping only choice ``picks[node]`` at every node."""
    choices = []
    for node in range(c.n):
        ch = picks[node]
        outs = [(float(p), [int(m) for m in mem]) for p, mem in c.outcomes_of(ch)]
        choices.append([(int(c.choice_action[ch]), outs)])
    return Compiled(c.n, choices)


def region_choices(part: WinningRegion) -> dict:
    """Region-mode action for every state of one Buchi region.

    Each state takes the action with the smallest robust expected hitting
    time of the accepting in-copies, among actions whose sets all stay in
    the region.  The resulting fixed strategy is then certified by the
    qualitative fixpoint.  Any state it does not certify falls back to a
    rank-justifying action (some set entirely at a strictly lower rank).
    Rank-justifying actions alone always reach acceptance almost surely.
    """
    split, rank = part.split, part.node_rank
    c = split.compiled
    targets = split.targets
    rank_ext = np.append(rank, -1)
    member_rank = rank_ext[c.members]
    outcome_max = np.maximum.reduceat(member_rank, c.member_ptr[:-1])
    outcome_min = np.minimum.reduceat(member_rank, c.member_ptr[:-1])
    stays = c.choice_all(outcome_min >= 0)
    node_r = rank[c.choice_state]
    lower = outcome_max < np.repeat(node_r, np.diff(c.outcome_ptr))
    justified = stays & c.choice_any(lower & (outcome_min >= 0))
    times = _hitting_times(c, targets, stays)

    def pick(node, allowed):
        best, best_key = None, None
        for ch in c.choices_of(node):
            if allowed[ch]:
                key = (round(float(times[ch]), 9), ch)
                if best_key is None or key < best_key:
                    best, best_key = ch, key
        return best

    picks = np.array([c.state_ptr[i] for i in range(c.n)])
    fallback = set()
    for node in range(c.n):
        if rank[node] < 0 or targets[node]:
            continue
        ch = pick(node, stays)
        if ch is None:
            raise StrategyError(f"region node {node} has no action staying in the region")
        picks[node] = ch
    while True:
        ok, _ = qualitative_as_reach(_fixed_choice_model(c, picks), targets)
        bad = [i for i in range(c.n) if rank[i] >= 0 and not ok[i] and i not in fallback]
        if not bad:
            break
        for node in bad:
            ch = pick(node, justified)
            if ch is None:
                raise StrategyError(f"region node {node} has no rank-justifying action")
            picks[node] = ch
            fallback.add(node)
    out = {}
    for s in part.states:
        node = split.node_for(s)
        if rank[node] <= 0:
            raise StrategyError(f"region state {s} has no progress rank")
        out[s] = split.choice_actions[picks[node]]
    return out


def _prefix_choices(p, c, V, region, tol):
    """Near-optimal actions that make progress toward the region."""
    q = c.q_values(V)
    n = p.n_states
    near = {}
    best = {}
    for s in range(n):
        if s in region:
            continue
        chs = list(c.choices_of(s))
        qs = q[chs]
        best[s] = int(c.choice_action[chs[int(np.argmax(qs))]])
        if V[s] > 0:
            near[s] = [ch for ch in chs if q[ch] >= V[s] - tol]
    ranked = {s: 0 for s in region}
    choice = {}
    k = 0
    while True:
        k += 1
        layer = {}
        for s, chs in near.items():
            if s in ranked:
                continue
            for ch in chs:
                if any(all(int(m) in ranked for m in mem) for _, mem in c.outcomes_of(ch)):
                    layer[s] = int(c.choice_action[ch])
                    break
        if not layer:
            break
        for s, a in layer.items():
            ranked[s] = k
            choice[s] = a
    for s, a in best.items():
        choice.setdefault(s, a)
    prefix_rank = {s: r for s, r in ranked.items() if s not in region}
    return choice, prefix_rank


def _round_robin_phases(w: WinningRegion):
    """Accepting region states that are almost surely reachable from the whole
    region, each with its own attractor strategy."""
    if w.split is None or not w.accepting:
        return []
    final_sub = w.split.sub
    phases = []
    for t in sorted(w.accepting):
        sub = SubProduct(final_sub.product, final_sub.states, final_sub.actions, frozenset({t}))
        split = split_accepting(sub)
        X, rank = qualitative_as_reach(split.compiled, split.targets)
        if not all(X[split.node_for(s)] for s in w.states):
            continue
        tmp = WinningRegion(w.states, frozenset({t}), {}, split, node_rank=rank)
        phases.append((t, region_choices(tmp)))
    return phases


def extract_strategy(p: MdpstModel, w: WinningRegion, v: ValueFunction, tol: float = 1e-3,
                     round_robin: bool = False, compiled=None) -> ProductStrategy:
    c = compiled if compiled is not None else compiled_of(p)
    choice, prefix_rank = _prefix_choices(p, c, v.values, w.states, tol)
    parts = w.per_pair if w.per_pair else ([w] if w.states else [])
    for k, part in enumerate(parts):
        table = region_choices(part) if part.states else {}
        for s in part.states:
            if not w.per_pair or w.pair[s] == k:
                choice[s] = table[s]
    phases = _round_robin_phases(w) if round_robin else []
    if round_robin and w.per_pair:
        log.warning("round-robin mode covers Buchi products only; keeping rank-following mode")
    elif round_robin and not phases:
        log.warning("no accepting state is almost surely reachable from the whole region; "
                    "keeping rank-following mode")
    return ProductStrategy(choice, w.states, dict(w.ranks), v, prefix_rank, phases)


def _trivial_origin(p):
    return [(i, 0) for i in range(p.n_states)]


def induce_strategy(ps: ProductStrategy, p: ProductMdpst) -> MdpstStrategy:
    """Fold epsilon actions into memory jumps and emit model-action names."""
    origin = p.origin if p.origin is not None else _trivial_origin(p)
    index = {sq: i for i, sq in enumerate(origin)}
    choices, jumps = {}, {}

    def collapse(i):
        s, q = origin[i]
        seen = {q}
        a = ps.choice.get(i)
        while a is not None and p.is_eps(a):
            q2 = p.eps_targets[a]
            if q2 in seen:
                raise StrategyError(f"epsilon cycle at model state {s}")
            seen.add(q2)
            i = index[(s, q2)]
            q = q2
            a = ps.choice.get(i)
        return q, a

    for i, (s, q) in enumerate(origin):
        q2, a = collapse(i)
        if q2 != q:
            jumps[(s, q)] = q2
        if a is not None and p.actions[a] != TAU_REJ and (s, q2) not in choices:
            choices[(s, q2)] = p.actions[a]
    phases = []
    for t, table in ps.phases:
        # memory jumps come from the main table; phases only pick model actions
        ch = {origin[i]: p.actions[a] for i, a in table.items()
              if p.actions[a] != TAU_REJ and not p.is_eps(a)}
        phases.append((origin[t], ch))
    init_q = origin[p.initial][1]
    value = float(ps.values.values[p.initial])
    return MdpstStrategy(init_q, choices, jumps, value, phases)


def solve(model: MdpstModel, aut=None, theta: float = 1e-3, classifier: str = "qualitative",
          kappa: float = 1e-2, round_robin: bool = False):
    """Full pipeline.  ``aut=None`` treats ``model`` as a pre-built product."""
    t0 = time.perf_counter()
    if aut is None:
        p = model if isinstance(model, ProductMdpst) else as_product(model)
    elif isinstance(aut, Dra):
        p = build_product_dra(model, aut)
    elif isinstance(aut, Ldba):
        p = build_product(model, aut)
    else:
        raise TypeError(f"unsupported automaton {type(aut).__name__}")
    t1 = time.perf_counter()
    if p.is_rabin:
        w = winning_region_rabin(p, theta, classifier, kappa)
    else:
        w = compute_winning_region(p, theta, classifier, kappa)
    t2 = time.perf_counter()
    c = compiled_of(p)
    v = reach_values_to_wr(p, w, theta, compiled=c)
    t3 = time.perf_counter()
    ps = extract_strategy(p, w, v, tol=theta, round_robin=round_robin, compiled=c)
    strat = induce_strategy(ps, p)
    t4 = time.perf_counter()
    timings = {
        "model": t1 - t0,
        "winning_region": t2 - t1,
        "value_iteration": t3 - t2,
        "extraction": t4 - t3,
        "synthesis": t4 - t1,
    }
    wr_iters = w.iterations if not w.per_pair else sum(x.iterations for x in w.per_pair)
    report = SolutionReport(
        value=float(v.values[p.initial]),
        product_states=p.n_states,
        product_transitions=p.n_transitions(),
        wr_size=len(w.states),
        wr_iterations=wr_iters,
        vi_sweeps=v.iterations,
        timings=timings,
        automaton_states=None if aut is None else aut.n_states,
    )
    report.product = p
    report.winning_region = w
    report.product_strategy = ps
    return report, strat
