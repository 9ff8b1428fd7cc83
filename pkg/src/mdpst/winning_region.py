"""Winning region of a product MDPST for the almost-sure Buchi objective.

The loop alternates three steps.  It splits every accepting state into an
in-copy (absorbing target) and an out-copy (carrying the outgoing actions).
It classifies the split states that reach some in-copy with probability 1
against every nature.  Then it removes everything not certified.  It stops
when a pass removes nothing.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .compiled import Compiled, compiled_of, gather
from .graphs import reachable, reverse
from .model import MdpstModel

log = logging.getLogger(__name__)

SINK = -1


@dataclass
class SubProduct:
    """Retained states, their surviving actions and the accepting subset."""
    product: MdpstModel
    states: frozenset
    actions: dict  # state -> tuple of action indices
    accepting: frozenset

    def outcomes(self, s, a):
        """Outcomes of ``(s, a)`` with members outside ``states`` mapped to SINK."""
        for o in self.product.transitions[(s, a)]:
            yield o.prob, [m if m in self.states else SINK for m in sorted(o.targets)]


@dataclass
class SplitProduct:
    sub: SubProduct
    nodes: list          # node -> (kind, product state); kind in {"plain", "out", "in"}
    node_of: dict        # (kind, product state) -> node
    compiled: Compiled
    choice_actions: list  # per compiled choice: product action index, or None for tau0

    @property
    def targets(self) -> np.ndarray:
        t = np.zeros(len(self.nodes), dtype=bool)
        for i, (kind, _) in enumerate(self.nodes):
            t[i] = kind == "in"
        return t

    def node_for(self, s) -> int:
        """Node carrying the outgoing behavior of product state ``s``."""
        return self.node_of.get(("plain", s), self.node_of.get(("out", s)))


@dataclass
class ValueFunction:
    values: np.ndarray
    iterations: int
    converged: bool

    def __getitem__(self, i):
        return float(self.values[i])


@dataclass
class WinningRegion:
    states: frozenset
    accepting: frozenset
    ranks: dict                 # product state -> rank of its outgoing node
    split: SplitProduct | None
    log: list = field(default_factory=list)
    pair: dict = field(default_factory=dict)        # Rabin: state -> lowest pair index
    per_pair: list = field(default_factory=list)    # Rabin: one WinningRegion per pair
    node_rank: np.ndarray | None = None             # ranks over split nodes, -1 outside

    @property
    def iterations(self) -> int:
        return len(self.log)

    def to_dict(self) -> dict:
        d = {
            "states": sorted(self.states),
            "accepting": sorted(self.accepting),
            "ranks": {str(s): r for s, r in sorted(self.ranks.items())},
            "iterations": self.log,
        }
        if self.per_pair:
            d["pairs"] = [sorted(w.states) for w in self.per_pair]
        return d


# -- pruning ---------------------------------------------------------------

def _optimistic_adj(p: MdpstModel, allowed=None):
    adj = [[] for _ in range(p.n_states)]
    for (s, _), outs in p.transitions.items():
        if allowed is not None and s not in allowed:
            continue
        for o in outs:
            adj[s].extend(t for t in o.targets if allowed is None or t in allowed)
    return adj


def prune_relevant(p: MdpstModel, accepting=None, removed=()) -> SubProduct:
    """Forward-from-initial intersected with backward-from-accepting.

    Edges are optimistic: ``s -> s'`` whenever ``s'`` belongs to some outcome
    set.  ``removed`` states are deleted before the backward search (used for
    Rabin Fin sets); forward reachability is always taken in the full product.
    Actions survive if any member of any outcome stays retained.
    """
    acc = frozenset(p.accepting if accepting is None else accepting)
    removed = frozenset(removed)
    fwd = reachable(_optimistic_adj(p), [p.initial])
    allowed = set(range(p.n_states)) - removed
    radj = reverse(_optimistic_adj(p, allowed))
    bwd = reachable(radj, acc - removed)
    retained = set(fwd & bwd)
    while True:
        actions = {}
        for s in retained:
            keep = tuple(
                a for a in p.enabled(s)
                if any(t in retained for o in p.transitions[(s, a)] for t in o.targets)
            )
            if keep:
                actions[s] = keep
        if len(actions) == len(retained):
            break
        retained = set(actions)
    if p.initial not in retained:
        log.info("initial state pruned away; its value is 0")
    return SubProduct(p, frozenset(retained), actions, acc & frozenset(retained))


def restrict_strict(sub: SubProduct, keep) -> SubProduct:
    """Keep only ``keep`` and re-close: an action dies if any set leaves the region."""
    p = sub.product
    retained = set(keep) & sub.states
    while True:
        actions = {}
        for s in retained:
            ok = tuple(
                a for a in sub.actions[s]
                if all(o.targets <= retained for o in p.transitions[(s, a)])
            )
            if ok:
                actions[s] = ok
        if len(actions) == len(retained):
            break
        retained = set(actions)
    return SubProduct(p, frozenset(retained), actions, sub.accepting & frozenset(retained))


# -- split construction ----------------------------------------------------

def split_accepting(sub: SubProduct) -> SplitProduct:
    """Duplicate accepting states into out-copies and absorbing in-copies.

    Works on the cached compiled product by reindexing: members outside the
    retained states go to the sink, accepting members to their in-copy.
    """
    if not sub.accepting:
        raise ValueError("split construction needs a nonempty accepting set")
    p = sub.product
    c = compiled_of(p)
    states = np.array(sorted(sub.states), dtype=np.int64)
    is_acc = np.isin(states, np.fromiter(sub.accepting, dtype=np.int64))
    width = 1 + is_acc
    first = np.zeros(len(states), dtype=np.int64)
    np.cumsum(width[:-1], out=first[1:])
    n = int(width.sum())
    behave = np.full(p.n_states, -1, dtype=np.int64)
    behave[states] = first
    hat = np.full(p.n_states + 1, n, dtype=np.int64)     # c.members may hold the sink c.n
    hat[states] = first + is_acc

    allowed = np.zeros((p.n_states, max(1, len(p.actions))), dtype=bool)
    for s, acts in sub.actions.items():
        allowed[s, list(acts)] = True
    act = c.choice_action
    sel = np.flatnonzero((act >= 0) & allowed[c.choice_state, np.maximum(act, 0)])

    out_pos, out_ptr = gather(c.outcome_ptr, sel)
    mem_pos, mem_ptr = gather(c.member_ptr, out_pos)
    in_nodes = first[is_acc] + 1
    k = len(in_nodes)
    # real choices first, then one tau0 self-loop per in-copy
    node = np.concatenate([behave[c.choice_state[sel]], in_nodes])
    actions = np.concatenate([act[sel], np.full(k, -2, dtype=np.int64)])
    o_ptr = np.concatenate([out_ptr, out_ptr[-1] + 1 + np.arange(k)])
    prob = np.concatenate([c.prob[out_pos], np.ones(k)])
    m_ptr = np.concatenate([mem_ptr, mem_ptr[-1] + 1 + np.arange(k)])
    members = np.concatenate([hat[c.members[mem_pos]], in_nodes])

    order = np.argsort(node, kind="stable")
    o_flat, o_ptr2 = gather(o_ptr, order)
    m_flat, m_ptr2 = gather(m_ptr, o_flat)
    state_ptr = np.searchsorted(node[order], np.arange(n + 1))
    compiled = Compiled.from_arrays(n, state_ptr, actions[order], o_ptr2, prob[o_flat],
                                    m_ptr2, members[m_flat])
    nodes, node_of = [], {}
    for s, acc in zip(states.tolist(), is_acc.tolist()):
        for kind in (("out", "in") if acc else ("plain",)):
            node_of[(kind, s)] = len(nodes)
            nodes.append((kind, s))
    choice_actions = [None if a == -2 else a for a in compiled.choice_action.tolist()]
    return SplitProduct(sub, nodes, node_of, compiled, choice_actions)


# -- value iteration -------------------------------------------------------

def as_mask(n, targets) -> np.ndarray:
    """Boolean mask from a mask or an iterable of indices."""
    if isinstance(targets, np.ndarray) and targets.dtype == bool:
        return targets.copy()
    m = np.zeros(n, dtype=bool)
    idx = list(targets)
    if idx:
        m[np.asarray(idx, dtype=np.int64)] = True
    return m


def robust_reach_vi(c: Compiled, targets, theta: float = 1e-3, max_iter: int = 1_000_000,
                    on_sweep=None) -> ValueFunction:
    """Max-min reachability by synchronous sweeps of the robust Bellman operator."""
    if theta <= 0:
        raise ValueError("theta must be positive")
    tmask = as_mask(c.n, targets)
    V = tmask.astype(float)
    if tmask.all():
        return ValueFunction(V, 0, True)
    for it in range(1, max_iter + 1):
        newV = np.where(tmask, 1.0, c.bellman(V))
        delta = float(np.max(np.abs(newV - V)))
        if on_sweep is not None:
            on_sweep(it, V, newV)
        V = newV
        if delta < theta:
            return ValueFunction(V, it, True)
    return ValueFunction(V, max_iter, False)


# -- qualitative classification --------------------------------------------

def qualitative_as_reach(c: Compiled, targets):
    """Exact almost-sure reachability set and attractor ranks.

    Returns ``(mask, ranks)`` where ``ranks[i]`` is -1 outside the set.
    """
    tmask = as_mask(c.n, targets)
    X = np.ones(c.n, dtype=bool)
    while True:
        stay = c.choice_all(c.outcome_inside(X))
        rank = np.full(c.n, -1, dtype=np.int64)
        R = tmask & X
        rank[R] = 0
        k = 0
        while True:
            prog = stay & c.choice_any(c.outcome_inside(R))
            new = c.state_any(prog) & X & ~R
            if not new.any():
                break
            k += 1
            rank[new] = k
            R = R | new
        if (R == X).all():
            return X, rank
        X = R


def numeric_prob1(c: Compiled, targets, theta: float, kappa: float):
    v = robust_reach_vi(c, targets, theta)
    return v.values >= 1.0 - kappa


# -- the loop --------------------------------------------------------------

def compute_winning_region(p, theta: float = 1e-3, classifier: str = "qualitative",
                           kappa: float = 1e-2, accepting=None, removed=(),
                           max_iter: int = 1_000_000) -> WinningRegion:
    if classifier not in ("qualitative", "numeric"):
        raise ValueError(f"unknown classifier {classifier!r}")
    sub = prune_relevant(p, accepting, removed)
    history = [{"iteration": 0, "pruned": sorted(set(range(p.n_states)) - sub.states)}]
    it = 0
    while True:
        if not sub.accepting:
            return WinningRegion(frozenset(), frozenset(), {}, None, history[1:] or history)
        it += 1
        split = split_accepting(sub)
        c = split.compiled
        targets = split.targets
        vf = robust_reach_vi(c, targets, theta, max_iter)
        if classifier == "qualitative":
            prob1, rank = qualitative_as_reach(c, targets)
        else:
            prob1 = vf.values >= 1.0 - kappa
            _, rank = qualitative_as_reach(c, targets)
        keep = {s for s in sub.states if prob1[split.node_for(s)]}
        removed_now = sorted(sub.states - keep)
        values = {}
        for i, (kind, s) in enumerate(split.nodes):
            values[s if kind == "plain" else f"{s}{kind}"] = float(vf.values[i])
        history.append({
            "iteration": it,
            "values": values,
            "vi_sweeps": vf.iterations,
            "vi_converged": vf.converged,
            "removed": removed_now,
        })
        if not removed_now:
            ranks = {s: int(rank[split.node_for(s)]) for s in sub.states}
            if classifier == "numeric" and any(r < 0 for r in ranks.values()):
                # numeric certification admitted a state the exact ranks do not cover
                log.warning("numeric classifier kept states without a rank")
            return WinningRegion(sub.states, sub.accepting, ranks, split, history[1:], node_rank=rank)
        sub = restrict_strict(sub, keep)


def winning_region_rabin(p, theta: float = 1e-3, classifier: str = "qualitative",
                         kappa: float = 1e-2) -> WinningRegion:
    if not p.pairs:
        raise ValueError("product has no Rabin pairs")
    parts = []
    for fin, inf in p.pairs:
        w = compute_winning_region(p, theta, classifier, kappa, accepting=inf - fin, removed=fin)
        parts.append(w)
    pair = {}
    for k, w in enumerate(parts):
        for s in w.states:
            pair.setdefault(s, k)
    states = frozenset(pair)
    ranks = {s: parts[k].ranks[s] for s, k in pair.items()}
    acc = frozenset(s for s, k in pair.items() if s in parts[k].accepting)
    logs = [{"pair": k, "iterations": w.log} for k, w in enumerate(parts)]
    return WinningRegion(states, acc, ranks, None, logs, pair, parts)
