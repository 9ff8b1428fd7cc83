"""Limit-deterministic Buchi and deterministic Rabin automata.

Edges carry propositional guards (``ltl`` formulas without temporal
operators).  Transition functions may be partial: a letter with no matching
guard kills the run.

Acceptance on an :class:`Ldba` can be state-based (``accepting``) or
edge-based (``Edge.accepting``).  Because the letter read at product state
``(s, q)`` is ``L(s)``, an accepting edge lifts to an accepting product state
without enlarging the product.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from . import ltl
from .graphs import reachable, sccs
from .ltl import TRUE, And, Atom, Formula, Lasso, Not, Or, disj, eval_prop
from .model import ModelError, ValidationReport

INIT, ACC = "init", "acc"


class AutomatonError(ModelError):
    pass


@dataclass(frozen=True)
class Edge:
    src: int
    guard: Formula
    dst: int
    accepting: bool = False


class _Deterministic:
    """Shared edge indexing and letter lookup."""

    def _index_edges(self):
        self._out = [[] for _ in range(self.n_states)]
        for e in self.edges:
            if 0 <= e.src < self.n_states:
                self._out[e.src].append(e)
        self._cache = {}

    def out_edges(self, q: int) -> list:
        return self._out[q]

    def step_edge(self, q: int, letter) -> Edge | None:
        """The unique edge from ``q`` enabled by ``letter``, or None."""
        key = (q, frozenset(letter) & self._apset)
        try:
            return self._cache[key]
        except KeyError:
            pass
        found = None
        for e in self._out[q]:
            if eval_prop(e.guard, key[1]):
                found = e
                break
        self._cache[key] = found
        return found

    def step(self, q: int, letter) -> int | None:
        e = self.step_edge(q, letter)
        return None if e is None else e.dst

    def state_name(self, q: int) -> str:
        n = self.names[q] if q < len(self.names) else None
        return n if n is not None else str(q)


class Ldba(_Deterministic):
    def __init__(
        self,
        ap: Sequence[str],
        components: Sequence[str],
        initial: int,
        edges: Iterable[Edge],
        eps: Mapping[int, Iterable[int]] | None = None,
        accepting: Iterable[int] = (),
        names: Sequence[str | None] | None = None,
    ):
        self.ap = tuple(ap)
        self._apset = frozenset(self.ap)
        self.components = tuple(components)
        self.initial = int(initial)
        self.edges = tuple(edges)
        self.eps = {int(q): tuple(sorted(set(ts))) for q, ts in (eps or {}).items() if ts}
        self.accepting = frozenset(accepting)
        self.names = list(names) if names is not None else [None] * len(self.components)
        self._index_edges()

    @property
    def n_states(self) -> int:
        return len(self.components)

    @property
    def initial_component(self) -> frozenset:
        return frozenset(q for q, c in enumerate(self.components) if c == INIT)

    @property
    def accepting_component(self) -> frozenset:
        return frozenset(q for q, c in enumerate(self.components) if c == ACC)

    def jumps(self, q: int) -> tuple:
        return self.eps.get(q, ())

    def __repr__(self):
        return f"Ldba(states={self.n_states}, ap={list(self.ap)})"


class Dra(_Deterministic):
    def __init__(
        self,
        ap: Sequence[str],
        n_states: int,
        initial: int,
        edges: Iterable[Edge],
        pairs: Sequence[tuple],
        names: Sequence[str | None] | None = None,
    ):
        self.ap = tuple(ap)
        self._apset = frozenset(self.ap)
        self._n = int(n_states)
        self.initial = int(initial)
        self.edges = tuple(edges)
        self.pairs = [(frozenset(f), frozenset(i)) for f, i in pairs]
        self.names = list(names) if names is not None else [None] * self._n
        self._index_edges()

    @property
    def n_states(self) -> int:
        return self._n

    def __repr__(self):
        return f"Dra(states={self.n_states}, pairs={len(self.pairs)})"


def _letters(ap):
    for bits in itertools.product((False, True), repeat=len(ap)):
        yield frozenset(a for a, b in zip(ap, bits) if b)


def _check_edges_deterministic(out_edges, ap, total=False):
    """Return (nondeterministic letters, uncovered letters) for one state."""
    clash, missing = [], []
    for letter in _letters(ap):
        k = sum(1 for e in out_edges if eval_prop(e.guard, letter))
        if k > 1:
            clash.append(letter)
        elif k == 0 and total:
            missing.append(letter)
    return clash, missing


def validate_ldba(a: Ldba) -> ValidationReport:
    rep = ValidationReport()
    n = a.n_states
    comps = a.components
    if any(c not in (INIT, ACC) for c in comps):
        rep.issues.append("component labels must be 'init' or 'acc'")
    if not 0 <= a.initial < n:
        rep.issues.append(f"initial state {a.initial} out of range")
        return rep
    if comps[a.initial] != INIT:
        rep.issues.append("initial state must lie in the initial component")
    for q in a.accepting:
        if not 0 <= q < n or comps[q] != ACC:
            rep.issues.append(f"accepting state {q} not in the accepting component")
    if len(a.ap) > 16:
        rep.issues.append("too many atomic propositions for exhaustive determinism check")
        return rep
    for e in a.edges:
        if not (0 <= e.src < n and 0 <= e.dst < n):
            rep.issues.append(f"edge {e.src}->{e.dst}: state out of range")
            continue
        if not ltl.atoms(e.guard) <= set(a.ap):
            rep.issues.append(f"edge {e.src}->{e.dst}: guard uses atoms outside AP")
        if comps[e.src] != comps[e.dst]:
            rep.issues.append(
                f"edge {a.state_name(e.src)}->{a.state_name(e.dst)} crosses components"
            )
        if e.accepting and comps[e.src] != ACC:
            rep.issues.append(f"accepting edge {e.src}->{e.dst} outside the accepting component")
    for q, ts in a.eps.items():
        if not 0 <= q < n or comps[q] != INIT:
            rep.issues.append(f"epsilon jump source {q} not in the initial component")
        for t in ts:
            if not 0 <= t < n or comps[t] != ACC:
                rep.issues.append(f"epsilon jump {q}->{t} does not target the accepting component")
    if rep.issues:
        return rep
    for q in range(n):
        clash, _ = _check_edges_deterministic(a.out_edges(q), a.ap)
        if clash:
            rep.issues.append(
                f"state {a.state_name(q)}: nondeterministic edges on letter {sorted(clash[0])}"
            )
    has_acc = bool(a.accepting) or any(e.accepting for e in a.edges)
    if not has_acc:
        rep.warnings.append("no accepting states or edges")
    else:
        adj = [[e.dst for e in a.out_edges(q)] for q in range(n)]
        targets = {t for ts in a.eps.values() for t in ts}
        reach = reachable(adj, targets)
        if not (reach & a.accepting or any(e.accepting and e.src in reach for e in a.edges)):
            rep.warnings.append("acceptance unreachable via any epsilon jump")
    return rep


def validate_dra(d: Dra) -> ValidationReport:
    rep = ValidationReport()
    n = d.n_states
    if not 0 <= d.initial < n:
        rep.issues.append(f"initial state {d.initial} out of range")
    if not d.pairs:
        rep.issues.append("Rabin acceptance needs at least one pair")
    for f, i in d.pairs:
        if any(not 0 <= q < n for q in f | i):
            rep.issues.append("Rabin pair names states out of range")
    if len(d.ap) > 16:
        rep.issues.append("too many atomic propositions for exhaustive determinism check")
        return rep
    for q in range(n):
        clash, missing = _check_edges_deterministic(d.out_edges(q), d.ap, total=True)
        if clash:
            rep.issues.append(f"state {d.state_name(q)}: nondeterministic edges on {sorted(clash[0])}")
        if missing:
            rep.issues.append(f"state {d.state_name(q)}: no edge for letter {sorted(missing[0])}")
    return rep


# -- lasso acceptance ------------------------------------------------------

def accepts_lasso(a, w: Lasso) -> bool:
    """Exact acceptance of ``stem . loop^omega`` by an Ldba or Dra."""
    if isinstance(a, Dra):
        return _dra_accepts(a, w)
    letters = w.letters
    start = (0, a.initial)
    ids = {start: 0}
    nodes = [start]
    adj = [[]]
    acc_edges = set()
    i = 0
    while i < len(nodes):
        pos, q = nodes[i]
        succ = []
        e = a.step_edge(q, letters[pos])
        if e is not None:
            succ.append(((w.succ(pos), e.dst), e.accepting))
        for t in a.jumps(q):
            succ.append(((pos, t), False))
        for node, is_acc in succ:
            j = ids.get(node)
            if j is None:
                j = ids[node] = len(nodes)
                nodes.append(node)
                adj.append([])
            adj[i].append(j)
            if is_acc:
                acc_edges.add((i, j))
        i += 1
    for comp in sccs(adj):
        cs = set(comp)
        if len(comp) == 1 and comp[0] not in adj[comp[0]]:
            continue
        if any(nodes[u][1] in a.accepting for u in comp):
            return True
        if any(u in cs and v in cs for u, v in acc_edges):
            return True
    return False


def _dra_accepts(d: Dra, w: Lasso) -> bool:
    letters = w.letters
    seen = {}
    trail = []
    pos, q = 0, d.initial
    while (pos, q) not in seen:
        seen[(pos, q)] = len(trail)
        trail.append(q)
        nq = d.step(q, letters[pos])
        if nq is None:
            return False
        pos, q = w.succ(pos), nq
    cycle = set(trail[seen[(pos, q)]:])
    return any(not (cycle & fin) and (cycle & inf) for fin, inf in d.pairs)


# -- fixtures --------------------------------------------------------------

def _group_guard(group) -> Formula:
    return disj(Atom(x) for x in sorted(group))


def _persist_avoid_ap(goal_groups, avoid):
    ap = []
    for g in goal_groups:
        for x in sorted(g):
            if x not in ap:
                ap.append(x)
    if avoid is not None and avoid not in ap:
        ap.append(avoid)
    return ap


def _normalize_fixture(kind, params):
    if kind == "gf":
        (atom,) = params
        return [[atom]], None
    if kind == "gf_conj":
        atoms_ = params[0] if len(params) == 1 and not isinstance(params[0], str) else params
        return [[x] for x in atoms_], None
    if kind == "persist_avoid":
        groups = params[0]
        avoid = params[1] if len(params) > 1 else "obs"
        return [list(g) for g in groups], avoid
    raise ValueError(f"unknown fixture kind {kind!r}")


def fixture_ldba(kind: str, *params) -> Ldba:
    """Hand-built LDBAs.

    ``fixture_ldba("gf", "a")``, ``fixture_ldba("gf_conj", ["a", "b"])``,
    ``fixture_ldba("persist_avoid", [["b1", "b2"], ["b3"], ["b4", "b5"]], "obs")``.

    One initial-component state jumps into a round-robin of ``k`` goal
    trackers; the edge closing the round is accepting.  Letters containing
    the avoid atom have no edge.  The initial state has no letter edges:
    these languages are suffix-closed, so delaying the jump never helps.
    """
    groups, avoid = _normalize_fixture(kind, params)
    if not groups or any(not g for g in groups):
        raise ValueError("goal groups must be a nonempty list of nonempty groups")
    ap = _persist_avoid_ap(groups, avoid)
    safe = Not(Atom(avoid)) if avoid is not None else TRUE
    k = len(groups)

    def both(f):
        return f if avoid is None else And(f, safe)

    edges = []
    for i, g in enumerate(groups, start=1):
        gg = _group_guard(g)
        nxt = i % k + 1
        edges.append(Edge(i, both(gg), nxt, accepting=(i == k)))
        edges.append(Edge(i, both(Not(gg)), i))
    names = ["init"] + [f"wait{i}" for i in range(1, k + 1)]
    return Ldba(ap, [INIT] + [ACC] * k, 0, edges, {0: [1]}, (), names)


def fixture_dra(kind: str, *params) -> Dra:
    """Deterministic Rabin automaton with a single pair for persist-avoid.

    Round-robin over ``k + 1`` states (``done`` plus one waiting state per
    group) times an alive/dead safety bit.  Pair: Fin = dead states,
    Inf = alive ``done``.
    """
    groups, avoid = _normalize_fixture(kind, params)
    if not groups or any(not g for g in groups):
        raise ValueError("goal groups must be a nonempty list of nonempty groups")
    ap = _persist_avoid_ap(groups, avoid)
    k = len(groups)
    nr = k + 1  # r0 = done (waiting for group 1), r1..rk = waiting for group i

    def rr_succ(r):
        """(group index waited for, successor on hit, successor on miss)."""
        i = 1 if r == 0 else r
        hit = 0 if i == k else i + 1
        miss = 1 if r == 0 else r
        return i, hit, miss

    lives = (0, 1) if avoid is not None else (0,)
    sid = {(r, d): d * nr + r for r in range(nr) for d in lives}
    edges = []
    for (r, d), q in sid.items():
        i, hit, miss = rr_succ(r)
        gg = _group_guard(groups[i - 1])
        if avoid is None:
            edges.append(Edge(q, gg, sid[(hit, 0)]))
            edges.append(Edge(q, Not(gg), sid[(miss, 0)]))
            continue
        av = Atom(avoid)
        if d == 0:
            edges.append(Edge(q, And(gg, Not(av)), sid[(hit, 0)]))
            edges.append(Edge(q, And(Not(gg), Not(av)), sid[(miss, 0)]))
            edges.append(Edge(q, And(gg, av), sid[(hit, 1)]))
            edges.append(Edge(q, And(Not(gg), av), sid[(miss, 1)]))
        else:
            edges.append(Edge(q, gg, sid[(hit, 1)]))
            edges.append(Edge(q, Not(gg), sid[(miss, 1)]))
    fin = frozenset(q for (r, d), q in sid.items() if d == 1)
    inf = frozenset({sid[(0, 0)]})
    names = [None] * len(sid)
    for (r, d), q in sid.items():
        names[q] = ("done" if r == 0 else f"wait{r}") + ("_dead" if d else "")
    return Dra(ap, len(sid), sid[(1, 0)], edges, [(fin, inf)], names)


# -- HOA -------------------------------------------------------------------

class HoaError(AutomatonError):
    def __init__(self, msg, line=None):
        super().__init__(f"line {line}: {msg}" if line else msg)
        self.line = line


_HOA_LABEL_TOKEN = re.compile(r"\s*(\d+|[tf!&|()])")


def _parse_hoa_label(text: str, ap, line) -> Formula:
    toks = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _HOA_LABEL_TOKEN.match(text, pos)
        if not m:
            raise HoaError(f"malformed label expression [{text}]", line)
        toks.append(m.group(1))
        pos = m.end()
    toks.append(None)
    i = 0

    def peek():
        return toks[i]

    def take():
        nonlocal i
        i += 1
        return toks[i - 1]

    def p_or():
        f = p_and()
        while peek() == "|":
            take()
            f = Or(f, p_and())
        return f

    def p_and():
        f = p_not()
        while peek() == "&":
            take()
            f = And(f, p_not())
        return f

    def p_not():
        tok = take()
        if tok == "!":
            return Not(p_not())
        if tok == "t":
            return TRUE
        if tok == "f":
            return Not(TRUE)
        if tok == "(":
            f = p_or()
            if take() != ")":
                raise HoaError(f"malformed label expression [{text}]", line)
            return f
        if tok is not None and tok.isdigit():
            k = int(tok)
            if k >= len(ap):
                raise HoaError(f"AP index {k} out of range", line)
            return Atom(ap[k])
        raise HoaError(f"malformed label expression [{text}]", line)

    f = p_or()
    if peek() is not None:
        raise HoaError(f"malformed label expression [{text}]", line)
    return f


_MARKS = re.compile(r"\{([\d\s]*)\}\s*$")


def _split_marks(rest: str):
    m = _MARKS.search(rest)
    if not m:
        return rest.strip(), frozenset()
    return rest[: m.start()].strip(), frozenset(int(x) for x in m.group(1).split())


def parse_hoa(text: str):
    """Parse the supported HOA v1 subset into an :class:`Ldba` or :class:`Dra`."""
    header = {}
    ap = None
    start = None
    n_states = None
    lines = text.splitlines()
    i = 0
    seen_hoa = False
    while i < len(lines):
        raw = lines[i].strip()
        ln = i + 1
        i += 1
        if not raw:
            continue
        if raw == "--BODY--":
            break
        m = re.match(r"([A-Za-z][\w-]*):\s*(.*)$", raw)
        if not m:
            raise HoaError(f"malformed header line {raw!r}", ln)
        key, val = m.group(1), m.group(2).strip()
        if key == "HOA":
            if val != "v1":
                raise HoaError(f"unsupported HOA version {val!r}", ln)
            seen_hoa = True
        elif key == "States":
            n_states = int(val)
        elif key == "Start":
            if start is not None or "&" in val:
                raise HoaError("only a single Start state is supported", ln)
            start = int(val)
        elif key == "AP":
            parts = re.findall(r'"([^"]*)"', val)
            count = int(val.split()[0])
            if count != len(parts):
                raise HoaError("AP count does not match the listed propositions", ln)
            ap = parts
        elif key == "acc-name":
            header["acc-name"] = (val.split(), ln)
        elif key == "Acceptance":
            header["Acceptance"] = (val, ln)
        elif key in ("name", "tool", "properties"):
            pass
        else:
            raise HoaError(f"unsupported header item {key!r}", ln)
    else:
        raise HoaError("missing --BODY--")
    if not seen_hoa:
        raise HoaError("missing 'HOA: v1' header", 1)
    if start is None:
        raise HoaError("missing Start", 1)
    if ap is None:
        ap = []
    if "acc-name" not in header:
        raise HoaError("missing acc-name (Buchi or Rabin required)", 1)
    acc_name, acc_ln = header["acc-name"]
    acc_expr, _ = header.get("Acceptance", ("", acc_ln))

    state_marks = {}
    state_names = {}
    edges = []  # (src, guard, dst, marks, line)
    current = None
    ended = False
    while i < len(lines):
        raw = lines[i].strip()
        ln = i + 1
        i += 1
        if not raw:
            continue
        if raw == "--END--":
            ended = True
            break
        if raw.startswith("State:"):
            rest = raw[len("State:"):].strip()
            rest, marks = _split_marks(rest)
            m = re.match(r'(\d+)\s*(?:"([^"]*)")?\s*$', rest)
            if not m:
                raise HoaError(f"malformed State line {raw!r}", ln)
            current = int(m.group(1))
            state_marks[current] = marks
            state_names[current] = m.group(2)
            continue
        if current is None:
            raise HoaError("edge before any State line", ln)
        m = re.match(r"\[([^\]]*)\]\s*(.*)$", raw)
        if not m:
            raise HoaError("edges must carry an explicit [label]", ln)
        guard = _parse_hoa_label(m.group(1), ap, ln)
        rest, marks = _split_marks(m.group(2))
        if not re.fullmatch(r"\d+", rest):
            raise HoaError(f"unsupported edge target {rest!r}", ln)
        edges.append((current, guard, int(rest), marks, ln))
    if not ended:
        raise HoaError("missing --END--")
    if n_states is None:
        n_states = max([start] + [e[0] for e in edges] + [e[2] for e in edges] + list(state_marks)) + 1
    names = [state_names.get(q) for q in range(n_states)]

    if acc_name[0] == "Buchi":
        m = re.fullmatch(r"\s*1\s+Inf\((\d+)\)\s*", acc_expr) if acc_expr else None
        mark = int(m.group(1)) if m else 0
        return _hoa_to_ldba(ap, n_states, start, state_marks, edges, mark, names)
    if acc_name[0] == "Rabin":
        pairs = []
        for disjunct in acc_expr.split("|"):
            f = re.search(r"Fin\((\d+)\)", disjunct)
            g = re.search(r"Inf\((\d+)\)", disjunct)
            if f and g:
                pairs.append((int(f.group(1)), int(g.group(1))))
        if not pairs:
            raise HoaError("could not read Rabin pairs from Acceptance", acc_ln)
        for _, _, _, marks, ln in edges:
            if marks:
                raise HoaError("transition-based Rabin acceptance is not supported", ln)
        dra_pairs = []
        for fm, im in pairs:
            fin = {q for q, ms in state_marks.items() if fm in ms}
            inf = {q for q, ms in state_marks.items() if im in ms}
            dra_pairs.append((fin, inf))
        d = Dra(ap, n_states, start, [Edge(s, g, t) for s, g, t, _, _ in edges], dra_pairs, names)
        for q in range(n_states):
            clash, missing = _check_edges_deterministic(d.out_edges(q), d.ap, total=True)
            if clash or missing:
                ln = next((e[4] for e in edges if e[0] == q), None)
                what = "nondeterministic edges" if clash else "incomplete edges"
                raise HoaError(f"state {q}: {what} in Rabin automaton", ln)
        return d
    raise HoaError(f"unsupported acceptance {' '.join(acc_name)!r}", acc_ln)


def _hoa_to_ldba(ap, n, start, state_marks, raw_edges, mark, names) -> Ldba:
    acc_states = {q for q, ms in state_marks.items() if mark in ms}
    seeds = set(acc_states) | {s for s, _, _, ms, _ in raw_edges if mark in ms}
    adj = [[] for _ in range(n)]
    for s, _, t, _, _ in raw_edges:
        adj[s].append(t)
    acc_comp = reachable(adj, seeds) if seeds else set()

    def check_det(group, ln_hint):
        by_src = {}
        for e in group:
            by_src.setdefault(e[0], []).append(e)
        for src, es in by_src.items():
            clash, _ = _check_edges_deterministic([Edge(s, g, t) for s, g, t, _, _ in es], ap)
            if clash:
                raise HoaError(f"state {src}: nondeterministic edges", es[-1][4])

    inner_acc = [e for e in raw_edges if e[0] in acc_comp]
    inner_init = [e for e in raw_edges if e[0] not in acc_comp and e[2] not in acc_comp]
    jump_edges = [e for e in raw_edges if e[0] not in acc_comp and e[2] in acc_comp]
    check_det(inner_acc, None)
    check_det(inner_init, None)

    components = [ACC if q in acc_comp else INIT for q in range(n)]
    names = list(names)
    edges = [Edge(s, g, t, mark in ms) for s, g, t, ms, _ in inner_acc + inner_init]
    eps = {}
    # a letter edge q -g-> p into the accepting component becomes
    # q -eps-> r, r -g-> p with a fresh accepting-component state r
    bridge = {}
    for s, g, t, ms, _ in jump_edges:
        r = bridge.get((g, t))
        if r is None:
            r = bridge[(g, t)] = len(components)
            components.append(ACC)
            names.append(None)
            edges.append(Edge(r, g, t))
        eps.setdefault(s, set()).add(r)
    initial = start
    if start in acc_comp:
        initial = len(components)
        components.append(INIT)
        names.append("init")
        eps.setdefault(initial, set()).add(start)
    a = Ldba(ap, components, initial, edges, eps, acc_states, names)
    rep = validate_ldba(a)
    if not rep.ok:
        raise HoaError("automaton is not limit-deterministic: " + "; ".join(rep.issues))
    return a


# -- native JSON -----------------------------------------------------------

def automaton_to_dict(a) -> dict:
    if isinstance(a, Dra):
        states = [{"id": q, "component": ACC, "accepting": False} for q in range(a.n_states)]
        pairs = [{"fin": sorted(f), "inf": sorted(i)} for f, i in a.pairs]
        kind, eps = "dra", []
    else:
        states = [
            {"id": q, "component": a.components[q], "accepting": q in a.accepting}
            for q in range(a.n_states)
        ]
        pairs = []
        kind = "ldba"
        eps = [{"from": q, "to": t} for q, ts in sorted(a.eps.items()) for t in ts]
    for q, st in enumerate(states):
        if a.names[q] is not None:
            st["name"] = a.names[q]
    edges = []
    for e in a.edges:
        entry = {"from": e.src, "guard": ltl.to_str(e.guard), "to": e.dst}
        if e.accepting:
            entry["accepting"] = True
        edges.append(entry)
    return {
        "kind": kind,
        "ap": list(a.ap),
        "states": states,
        "initial": a.initial,
        "edges": edges,
        "eps": eps,
        "pairs": pairs,
    }


def automaton_from_dict(d: Mapping):
    try:
        kind = d["kind"]
        ap = list(d["ap"])
        states = sorted(d["states"], key=lambda st: int(st["id"]))
        initial = int(d["initial"])
        raw_edges = d["edges"]
    except (KeyError, TypeError) as e:
        raise AutomatonError(f"missing or malformed field: {e}") from None
    if [int(st["id"]) for st in states] != list(range(len(states))):
        raise AutomatonError("state ids must be 0..n-1 without gaps")
    edges = []
    for k, e in enumerate(raw_edges):
        try:
            guard = ltl.parse_ltl(e["guard"])
        except ltl.LtlSyntaxError as err:
            raise AutomatonError(f"edges[{k}]: {err}") from None
        if not ltl.is_propositional(guard):
            raise AutomatonError(f"edges[{k}]: guard must be propositional")
        edges.append(Edge(int(e["from"]), guard, int(e["to"]), bool(e.get("accepting", False))))
    names = [st.get("name") for st in states]
    if kind == "ldba":
        eps = {}
        for j in d.get("eps", []):
            eps.setdefault(int(j["from"]), set()).add(int(j["to"]))
        a = Ldba(
            ap,
            [st.get("component", INIT) for st in states],
            initial,
            edges,
            eps,
            [int(st["id"]) for st in states if st.get("accepting")],
            names,
        )
        rep = validate_ldba(a)
    elif kind == "dra":
        pairs = [(set(p["fin"]), set(p["inf"])) for p in d.get("pairs", [])]
        a = Dra(ap, len(states), initial, edges, pairs, names)
        rep = validate_dra(a)
    else:
        raise AutomatonError(f"unknown automaton kind {kind!r}")
    if not rep.ok:
        raise AutomatonError("invalid automaton:\n  " + "\n  ".join(rep.issues))
    return a


def load_automaton(path):
    from .model import loads_json

    with open(path) as f:
        text = f.read()
    if text.lstrip().startswith("HOA:"):
        return parse_hoa(text)
    return automaton_from_dict(loads_json(text, str(path)))
