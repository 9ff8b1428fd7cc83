"""Ground truth for small instances.

Nothing here shares code with the value iteration or the winning-region loop.
Values come from exhaustive enumeration of positional strategies and natures,
with each resulting Markov chain solved exactly.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

import numpy as np

from .graphs import reachable, reverse, sccs
from .ltl import Lasso

MAX_STATES = 14
MAX_ACTIONS = 3
MAX_COMBINATIONS = 2_000_000


class OracleError(RuntimeError):
    pass


@dataclass
class MarkovChain:
    rows: list      # rows[s] = {t: prob}
    initial: int

    @property
    def n(self) -> int:
        return len(self.rows)

    def check(self, tol=1e-9):
        for s, row in enumerate(self.rows):
            if abs(sum(row.values()) - 1.0) > tol:
                raise OracleError(f"row {s} of the chain does not sum to 1")


def _solve_reach(chain: MarkovChain, targets) -> np.ndarray:
    """Probability of eventually entering ``targets`` from every state."""
    n = chain.n
    targets = set(targets)
    adj = [list(r) for r in chain.rows]
    can = reachable(reverse(adj), targets)
    x = np.zeros(n)
    for t in targets:
        x[t] = 1.0
    q = sorted(can - targets)
    if not q:
        return x
    pos = {s: i for i, s in enumerate(q)}
    A = np.eye(len(q))
    b = np.zeros(len(q))
    for s in q:
        for t, pr in chain.rows[s].items():
            if t in pos:
                A[pos[s], pos[t]] -= pr
            elif t in targets:
                b[pos[s]] += pr
    cond = np.linalg.cond(A)
    if not np.isfinite(cond) or cond > 1e12:
        raise OracleError(f"singular transient system (condition number {cond:.3g})")
    sol = np.linalg.solve(A, b)
    for s in q:
        x[s] = sol[pos[s]]
    return x


def accepting_bsccs(chain: MarkovChain, acc) -> set:
    adj = [list(r) for r in chain.rows]
    out = set()
    for comp in sccs(adj):
        cs = set(comp)
        bottom = all(t in cs for s in comp for t in adj[s])
        if bottom and cs & set(acc):
            out |= cs
    return out


def chain_buchi_probability(chain: MarkovChain, acc, all_states: bool = False):
    """Probability of visiting ``acc`` infinitely often."""
    x = _solve_reach(chain, accepting_bsccs(chain, acc))
    return x if all_states else float(x[chain.initial])


def reach_probability(chain: MarkovChain, targets, all_states: bool = False):
    x = _solve_reach(chain, targets)
    return x if all_states else float(x[chain.initial])


# -- brute force -----------------------------------------------------------

def _guard(p):
    if p.n_states > MAX_STATES:
        raise OracleError(f"instance too large for the oracle: {p.n_states} states > {MAX_STATES}")
    if any(len(p.enabled(s)) > MAX_ACTIONS for s in range(p.n_states)):
        raise OracleError(f"instance too large for the oracle: more than {MAX_ACTIONS} actions")


def _extensions(p, start, options, successors):
    """Enumerate assignments over states reachable from ``start``.

    ``options(s)`` lists the choices at ``s``; ``successors(s, choice)`` the
    states it may lead to.  States are assigned in discovery order, so
    unreachable states never multiply the count.
    """
    def rec(assign, frontier, seen):
        while frontier:
            s = frontier[-1]
            if s in assign:
                frontier = frontier[:-1]
                continue
            opts = list(options(s))
            if not opts:
                assign = dict(assign)
                assign[s] = None
                frontier = frontier[:-1]
                continue
            for ch in opts:
                new_assign = dict(assign)
                new_assign[s] = ch
                new_front = frontier[:-1]
                new_seen = set(seen)
                for t in successors(s, ch):
                    if t not in new_seen:
                        new_seen.add(t)
                        new_front = new_front + (t,)
                yield from rec(new_assign, new_front, new_seen)
            return
        yield assign

    yield from rec({}, (start,), {start})


def _chain(p, sigma, nature, start, absorbing=()):
    rows = [dict() for _ in range(p.n_states)]
    for s in range(p.n_states):
        if s in absorbing or s not in nature:
            rows[s] = {s: 1.0}
            continue
        a = sigma[s]
        row = rows[s]
        for k, o in enumerate(p.transitions[(s, a)]):
            t = nature[s][k]
            row[t] = row.get(t, 0.0) + o.prob
    return MarkovChain(rows, start)


def brute_force_value(p, objective: str = "buchi", targets=None, initial: int | None = None,
                      budget: int = MAX_COMBINATIONS) -> float:
    """max over positional strategies, min over positional natures.

    ``objective`` is ``"buchi"`` (targets default to ``p.accepting``) or
    ``"reach"``.
    """
    _guard(p)
    if objective not in ("buchi", "reach"):
        raise ValueError(f"unknown objective {objective!r}")
    targets = frozenset(p.accepting if targets is None else targets)
    start = p.initial if initial is None else initial
    if objective == "buchi" and not targets:
        return 0.0
    if objective == "reach" and start in targets:
        return 1.0
    absorbing = targets if objective == "reach" else frozenset()
    count = 0

    def s_opts(s):
        return () if s in absorbing else p.enabled(s)

    def s_succ(s, a):
        return {t for o in p.transitions[(s, a)] for t in o.targets}

    best = 0.0
    for sigma in _extensions(p, start, s_opts, s_succ):
        def n_opts(s):
            if s in absorbing:
                return ()
            outs = p.transitions[(s, sigma[s])]
            return itertools.product(*[sorted(o.targets) for o in outs])

        def n_succ(s, picks):
            return set(picks)

        worst = 1.0
        for nature in _extensions(p, start, lambda s: list(n_opts(s)), n_succ):
            count += 1
            if count > budget:
                raise OracleError("oracle enumeration budget exceeded")
            chain = _chain(p, sigma, nature, start, absorbing)
            if objective == "buchi":
                v = chain_buchi_probability(chain, targets)
            else:
                v = reach_probability(chain, targets)
            worst = min(worst, v)
            if worst <= best:
                break
        best = max(best, worst)
        if best >= 1.0:
            break
    return float(best)


# -- classical MDPs --------------------------------------------------------

def maximal_end_components(p, states=None) -> list:
    """MECs of a singleton-only model, as (states, {state: actions}) pairs."""
    if states is None:
        states = set(range(p.n_states))
    acts = {s: set(p.enabled(s)) for s in states}

    def succ(s, a):
        return {t for o in p.transitions[(s, a)] for t in o.targets}

    todo = [set(states)]
    out = []
    while todo:
        part = todo.pop()
        adj = [[] for _ in range(p.n_states)]
        for s in part:
            for a in acts[s]:
                adj[s].extend(t for t in succ(s, a) if t in part)
        comps = sccs(adj, sorted(part))
        if len(comps) == 1:
            comp = set(comps[0])
            changed = False
            for s in comp:
                keep = {a for a in acts[s] if succ(s, a) <= comp}
                if keep != acts[s]:
                    acts[s] = keep
                    changed = True
            dead = {s for s in comp if not acts[s]}
            if dead:
                todo.append(comp - dead)
            elif changed:
                todo.append(comp)
            else:
                out.append((frozenset(comp), {s: frozenset(acts[s]) for s in comp}))
            continue
        for comp in comps:
            comp = set(comp)
            for s in comp:
                acts[s] = {a for a in acts[s] if succ(s, a) <= comp}
            todo.append({s for s in comp if acts[s]})
    return [m for m in out if m[0]]


def almost_sure_reach_mdp(p, targets) -> set:
    """States that reach ``targets`` with probability 1 in a singleton-only model.

    Repeatedly drops states that cannot reach the targets and the actions
    that may lead to dropped states.
    """
    targets = set(targets)
    alive = set(range(p.n_states))
    acts = {s: set(p.enabled(s)) for s in alive}

    def succ(s, a):
        return {t for o in p.transitions[(s, a)] for t in o.targets}

    while True:
        adj = [[] for _ in range(p.n_states)]
        for s in alive:
            for a in acts[s]:
                adj[s].extend(succ(s, a))
        good = reachable(reverse(adj), targets & alive) & alive
        if good == alive:
            return alive
        alive = good
        for s in alive:
            acts[s] = {a for a in acts[s] if succ(s, a) <= alive}


def classical_buchi_region(p, acc=None) -> set:
    acc = set(p.accepting if acc is None else acc)
    union = set()
    for comp, _ in maximal_end_components(p):
        if comp & acc:
            union |= comp
    return almost_sure_reach_mdp(p, union)


# -- lassos ----------------------------------------------------------------

def _alphabet(ap):
    return [frozenset(x for x, b in zip(ap, bits) if b)
            for bits in itertools.product((False, True), repeat=len(ap))]


def enumerate_lassos(ap, max_len: int) -> list:
    """Every distinct (stem, loop) presentation with total length <= max_len."""
    sigma = _alphabet(list(ap))
    out = []
    for total in range(1, max_len + 1):
        for stem_len in range(total):
            for word in itertools.product(sigma, repeat=total):
                out.append(Lasso(word[:stem_len], word[stem_len:]))
    return out


def sample_lassos(ap, max_len: int, n: int, seed: int, p_true: float = 0.5) -> list:
    if n < 1:
        raise ValueError("n must be at least 1")
    if max_len < 1:
        raise ValueError("max_len must be at least 1")
    rng = random.Random(seed)
    ap = list(ap)
    out = []
    for _ in range(n):
        total = rng.randint(1, max_len)
        stem_len = rng.randrange(total)
        word = [frozenset(x for x in ap if rng.random() < p_true) for _ in range(total)]
        out.append(Lasso(tuple(word[:stem_len]), tuple(word[stem_len:])))
    return out
