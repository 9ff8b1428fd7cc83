"""Product of an MDPST with an LDBA or DRA.

Product state ``(s, q)`` has index ``s * |Q| + q``.  A model action at
``(s, q)`` moves the automaton on the letter ``L(s)``; when the automaton has
no edge for that letter the action is dropped.  LDBA jumps become actions
``eps_<q'>`` with a single certain outcome.  States left without actions get
``tau_rej``, a rejecting self-loop.
"""
from __future__ import annotations

from typing import Mapping

from .automata import Dra, Ldba
from .model import MdpstModel, ModelError, SetOutcome, model_from_dict, model_to_dict, loads_json

TAU_REJ = "tau_rej"


def eps_action(q: int) -> str:
    return f"eps_{q}"


class ProductMdpst(MdpstModel):
    """An :class:`MdpstModel` plus Buchi acceptance or Rabin pairs.

    ``origin[i]`` is the ``(s, q)`` pair of product state ``i`` when the
    product was built here; products loaded from JSON may lack it.
    """

    def __init__(self, *args, accepting=(), pairs=None, origin=None, base=None, automaton=None,
                 eps_targets=None, **kw):
        super().__init__(*args, **kw)
        self.accepting = frozenset(accepting)
        self.pairs = [(frozenset(f), frozenset(i)) for f, i in pairs] if pairs else []
        self.origin = origin
        self.base = base
        self.automaton = automaton
        # action index -> automaton state for eps actions
        self.eps_targets = dict(eps_targets or {})

    @property
    def is_rabin(self) -> bool:
        return bool(self.pairs)

    def is_eps(self, a: int) -> bool:
        return a in self.eps_targets

    def index(self, s: int, q: int) -> int:
        return s * self.automaton.n_states + q

    def __repr__(self):
        kind = f"pairs={len(self.pairs)}" if self.pairs else f"accepting={len(self.accepting)}"
        return f"ProductMdpst(states={self.n_states}, transitions={self.n_transitions()}, {kind})"


def _check_ap(model: MdpstModel, aut):
    missing = [x for x in aut.ap if x not in model.props]
    if missing:
        raise ModelError(f"automaton atoms {missing} not in the model vocabulary")


def _assemble(model, aut, nq, step, eps_of):
    ns = model.n_states
    actions = list(model.actions)
    eps_index = {}
    for q in range(nq):
        for t in eps_of(q):
            if t not in eps_index:
                eps_index[t] = None
    for t in sorted(eps_index):
        eps_index[t] = len(actions)
        actions.append(eps_action(t))
    trans = {}
    labels, names, origin, accepting = [], [], [], set()
    needs_tau = []
    for s in range(ns):
        lab = model.labels[s]
        for q in range(nq):
            i = s * nq + q
            labels.append(lab)
            names.append(f"({model.state_name(s)},{aut.state_name(q)})")
            origin.append((s, q))
            qn, acc = step(q, lab)
            if acc:
                accepting.add(i)
            any_action = False
            if qn is not None:
                for a in model.enabled(s):
                    trans[(i, a)] = [
                        SetOutcome(frozenset(t * nq + qn for t in o.targets), o.prob)
                        for o in model.transitions[(s, a)]
                    ]
                    any_action = True
            for t in eps_of(q):
                trans[(i, eps_index[t])] = [SetOutcome(frozenset({s * nq + t}), 1.0)]
                any_action = True
            if not any_action:
                needs_tau.append(i)
    if needs_tau:
        tau = len(actions)
        actions.append(TAU_REJ)
        for i in needs_tau:
            trans[(i, tau)] = [SetOutcome(frozenset({i}), 1.0)]
    eps_targets = {a: t for t, a in eps_index.items()}
    return labels, actions, trans, names, origin, accepting, eps_targets


def build_product(model: MdpstModel, a: Ldba) -> ProductMdpst:
    _check_ap(model, a)
    nq = a.n_states

    def step(q, lab):
        e = a.step_edge(q, lab)
        if e is None:
            return None, q in a.accepting
        return e.dst, q in a.accepting or e.accepting

    labels, actions, trans, names, origin, acc, eps_targets = _assemble(
        model, a, nq, step, a.jumps
    )
    return ProductMdpst(
        model.props, labels, model.initial * nq + a.initial, actions, trans, names,
        accepting=acc, origin=origin, base=model, automaton=a, eps_targets=eps_targets,
    )


def build_product_dra(model: MdpstModel, d: Dra) -> ProductMdpst:
    _check_ap(model, d)
    nq = d.n_states

    def step(q, lab):
        qn = d.step(q, lab)
        if qn is None:
            raise ModelError(f"Rabin automaton is not total at state {q}")
        return qn, False

    labels, actions, trans, names, origin, _, _ = _assemble(
        model, d, nq, step, lambda q: ()
    )
    ns = model.n_states
    pairs = [
        ({s * nq + q for s in range(ns) for q in fin}, {s * nq + q for s in range(ns) for q in inf})
        for fin, inf in d.pairs
    ]
    return ProductMdpst(
        model.props, labels, model.initial * nq + d.initial, actions, trans, names,
        pairs=pairs, origin=origin, base=model, automaton=d,
    )


def as_product(model: MdpstModel, accepting=(), pairs=None) -> ProductMdpst:
    """Wrap a plain model as a pre-built product with the given acceptance."""
    return ProductMdpst(
        model.props, model.labels, model.initial, model.actions, model.transitions, model.names,
        accepting=accepting, pairs=pairs,
    )


# -- serialization ---------------------------------------------------------

def product_to_dict(p: ProductMdpst) -> dict:
    d = model_to_dict(p)
    d["accepting"] = sorted(p.accepting)
    d["pairs"] = [{"fin": sorted(f), "inf": sorted(i)} for f, i in p.pairs]
    if p.origin is not None:
        for st in d["states"]:
            s, q = p.origin[st["id"]]
            st["s"], st["q"] = s, q
    return d


def product_from_dict(d: Mapping) -> ProductMdpst:
    m = model_from_dict(d)
    n = m.n_states
    acc = [int(x) for x in d.get("accepting", [])]
    pairs = [(set(map(int, p["fin"])), set(map(int, p["inf"]))) for p in d.get("pairs", [])]
    for x in acc + [x for f, i in pairs for x in f | i]:
        if not 0 <= x < n:
            raise ModelError(f"accepting/pair state {x} out of range")
    p = as_product(m, acc, pairs)
    origin = [(st.get("s"), st.get("q")) for st in sorted(d["states"], key=lambda st: st["id"])]
    if all(s is not None for s, _ in origin):
        p.origin = origin
    p.eps_targets = {
        i: int(name[4:]) for i, name in enumerate(m.actions)
        if name.startswith("eps_") and name[4:].isdigit()
    }
    return p


def load_product(path) -> ProductMdpst:
    with open(path) as f:
        return product_from_dict(loads_json(f.read(), str(path)))


def worked_example() -> ProductMdpst:
    """The bundled ten-state example product (states S1..S10)."""
    from importlib.resources import files

    text = files(__package__).joinpath("fixtures", "worked_example.json").read_text()
    return product_from_dict(loads_json(text, "worked_example.json"))


def to_dot(p: ProductMdpst) -> str:
    """Graphviz rendering; set outcomes go through small point nodes."""
    out = ["digraph product {", "  rankdir=LR;"]
    for i in range(p.n_states):
        shape = "doublecircle" if i in p.accepting else "circle"
        extra = ", style=bold" if i == p.initial else ""
        out.append(f'  s{i} [label="{p.state_name(i)}", shape={shape}{extra}];')
    k = 0
    for (s, a), outs in sorted(p.transitions.items()):
        for o in outs:
            if len(o.targets) == 1:
                (t,) = o.targets
                out.append(f'  s{s} -> s{t} [label="{p.actions[a]}:{o.prob:g}"];')
                continue
            out.append(f"  h{k} [shape=point];")
            out.append(f'  s{s} -> h{k} [label="{p.actions[a]}:{o.prob:g}", arrowhead=none];')
            for t in sorted(o.targets):
                out.append(f"  h{k} -> s{t} [style=dashed];")
            k += 1
    out.append("}")
    return "\n".join(out) + "\n"
