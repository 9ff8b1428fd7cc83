"""MDPST data model: states, set-valued probabilistic transitions, labels.

A transition ``(s, a)`` maps to a list of :class:`SetOutcome`; each outcome
carries a mass and a nonempty target set.  Which member of the set is
actually entered is left to nature.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

TOL = 1e-9


class ModelError(ValueError):
    """Raised for malformed models or model files."""


class InapplicableAction(ModelError):
    pass


@dataclass(frozen=True)
class SetOutcome:
    targets: frozenset
    prob: float

    def __post_init__(self):
        object.__setattr__(self, "targets", frozenset(self.targets))


@dataclass
class ValidationReport:
    issues: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.issues

    def __bool__(self):
        return self.ok

    def __str__(self):
        lines = [f"error: {m}" for m in self.issues]
        lines += [f"warning: {m}" for m in self.warnings]
        return "\n".join(lines) if lines else "ok"


def merge_outcomes(outcomes: Iterable[SetOutcome]) -> tuple:
    """Merge outcomes sharing a target set by summing their masses.

    First-appearance order of target sets is preserved.
    """
    acc: dict = {}
    for o in outcomes:
        acc[o.targets] = acc.get(o.targets, 0.0) + o.prob
    return tuple(SetOutcome(t, p) for t, p in acc.items())


class MdpstModel:
    """An MDPST ``(S, s0, A, F, T, L)`` over integer state and action indices.

    ``transitions`` maps ``(state, action_index)`` to a sequence of
    :class:`SetOutcome`.  Duplicate target sets are merged on construction.
    The model is not validated here; call :func:`validate_model`.
    """

    def __init__(
        self,
        props: Sequence[str],
        labels: Sequence[Iterable[str]],
        initial: int,
        actions: Sequence[str],
        transitions: Mapping[tuple, Sequence[SetOutcome]],
        names: Sequence[str | None] | None = None,
    ):
        self.props = tuple(props)
        self.labels = [frozenset(lab) for lab in labels]
        self.initial = int(initial)
        self.actions = tuple(actions)
        self.names = list(names) if names is not None else [None] * len(self.labels)
        self.transitions = {
            (int(s), int(a)): merge_outcomes(outs) for (s, a), outs in transitions.items()
        }
        enabled = [[] for _ in range(len(self.labels))]
        for s, a in self.transitions:
            if 0 <= s < len(enabled):
                enabled[s].append(a)
        self._enabled = [tuple(sorted(x)) for x in enabled]
        self._action_index = {name: i for i, name in enumerate(self.actions)}

    @property
    def n_states(self) -> int:
        return len(self.labels)

    def enabled(self, s: int) -> tuple:
        """Indices of the actions applicable at ``s``, ascending."""
        return self._enabled[s]

    def action_index(self, a) -> int:
        if isinstance(a, str):
            try:
                return self._action_index[a]
            except KeyError:
                raise InapplicableAction(f"unknown action {a!r}") from None
        return int(a)

    def outcomes(self, s: int, a) -> tuple:
        ai = self.action_index(a)
        try:
            return self.transitions[(s, ai)]
        except KeyError:
            raise InapplicableAction(
                f"no such action at state: {self.state_name(s)} has no action "
                f"{self.actions[ai] if 0 <= ai < len(self.actions) else ai!r}"
            ) from None

    def state_name(self, s: int) -> str:
        name = self.names[s] if 0 <= s < len(self.names) else None
        return name if name is not None else str(s)

    def state_by_name(self, name: str) -> int:
        for i, n in enumerate(self.names):
            if n == name:
                return i
        raise KeyError(name)

    def n_transitions(self) -> int:
        """Number of ``(state, action, target set)`` triples."""
        return sum(len(v) for v in self.transitions.values())

    def __repr__(self):
        return (
            f"MdpstModel(states={self.n_states}, actions={len(self.actions)}, "
            f"transitions={self.n_transitions()})"
        )


def validate_model(model: MdpstModel) -> ValidationReport:
    rep = ValidationReport()
    n = model.n_states
    if n == 0:
        rep.issues.append("model has no states")
        return rep
    if not 0 <= model.initial < n:
        rep.issues.append(f"initial state {model.initial} out of range")
    vocab = set(model.props)
    for s, lab in enumerate(model.labels):
        extra = lab - vocab
        if extra:
            rep.issues.append(f"state {model.state_name(s)}: atoms {sorted(extra)} not in vocabulary")
    names = [x for x in model.names if x is not None]
    if len(names) != len(set(names)):
        rep.issues.append("duplicate state names")
    for (s, a), outs in sorted(model.transitions.items()):
        where = f"(state {s}, action {a})"
        if not 0 <= s < n:
            rep.issues.append(f"{where}: source state out of range")
            continue
        if not 0 <= a < len(model.actions):
            rep.issues.append(f"{where}: action index out of range")
            continue
        where = f"(state {model.state_name(s)}, action {model.actions[a]})"
        if not outs:
            rep.issues.append(f"{where}: no outcomes")
            continue
        total = 0.0
        for o in outs:
            if not o.targets:
                rep.issues.append(f"{where}: empty target set")
            bad = [t for t in o.targets if not 0 <= t < n]
            if bad:
                rep.issues.append(f"{where}: invalid target states {sorted(bad)}")
            if not 0.0 < o.prob <= 1.0 + TOL:
                rep.issues.append(f"{where}: outcome probability {o.prob:g} outside (0, 1]")
            total += o.prob
        if abs(total - 1.0) > TOL:
            rep.issues.append(f"{where}: probability mass {total:.12g} != 1")
    for s in range(n):
        if not model.enabled(s):
            rep.issues.append(f"state {model.state_name(s)}: no applicable action")
    return rep


def post_states(model: MdpstModel, s: int, a) -> frozenset:
    """All states some outcome of ``(s, a)`` with positive mass may enter."""
    out = set()
    for o in model.outcomes(s, a):
        if o.prob > 0:
            out |= o.targets
    return frozenset(out)


def is_classical_mdp(model: MdpstModel) -> bool:
    return all(len(o.targets) == 1 for outs in model.transitions.values() for o in outs)


class AlphaParams:
    """Selection weights inside each target set, keyed by ``(s, a, targets)``."""

    def __init__(self, weights: Mapping | None = None):
        self.weights = dict(weights or {})

    def __getitem__(self, key):
        return self.weights[key]

    def __contains__(self, key):
        return key in self.weights

    def __eq__(self, other):
        return isinstance(other, AlphaParams) and self.weights == other.weights

    def at(self, s: int, a: int) -> dict:
        return {th: w for (ss, aa, th), w in self.weights.items() if ss == s and aa == a}


def realize_feasible_distribution(model: MdpstModel, s: int, a, alpha) -> dict:
    """Concrete successor distribution for ``(s, a)`` under selection weights.

    ``alpha`` maps each target set (frozenset) to a mapping member -> weight,
    or is an :class:`AlphaParams`.  Singleton sets may be omitted.
    Returns ``{state: probability}`` with zero entries dropped.
    """
    ai = model.action_index(a)
    outs = model.outcomes(s, ai)
    if isinstance(alpha, AlphaParams):
        alpha = alpha.at(s, ai)
    dist: dict = {}
    for o in outs:
        w = alpha.get(o.targets)
        if w is None:
            if len(o.targets) != 1:
                raise ModelError(f"alpha missing for target set {sorted(o.targets)}")
            w = {next(iter(o.targets)): 1.0}
        if any(m not in o.targets for m in w):
            raise ModelError(f"alpha for {sorted(o.targets)} names states outside the set")
        if any(x < 0 for x in w.values()) or abs(sum(w.values()) - 1.0) > TOL:
            raise ModelError(f"alpha for {sorted(o.targets)} is not a distribution")
        for m, x in w.items():
            if x > 0:
                dist[m] = dist.get(m, 0.0) + x * o.prob
    return dist


# -- JSON ------------------------------------------------------------------

def model_to_dict(model: MdpstModel) -> dict:
    states = []
    for s in range(model.n_states):
        entry = {"id": s, "label": sorted(model.labels[s])}
        if model.names[s] is not None:
            entry["name"] = model.names[s]
        states.append(entry)
    transitions = []
    for (s, a), outs in sorted(model.transitions.items()):
        transitions.append({
            "from": s,
            "action": model.actions[a],
            "outcomes": [{"prob": o.prob, "targets": sorted(o.targets)} for o in outs],
        })
    return {
        "props": list(model.props),
        "states": states,
        "initial": model.initial,
        "actions": list(model.actions),
        "transitions": transitions,
    }


def _fail(msg, where=None):
    raise ModelError(f"{where}: {msg}" if where else msg)


def model_from_dict(d: Mapping, *, check: bool = True) -> MdpstModel:
    try:
        props = list(d.get("props", []))
        raw_states = d["states"]
        actions = list(d["actions"])
        initial = int(d["initial"])
        raw_trans = d["transitions"]
    except (KeyError, TypeError) as e:
        raise ModelError(f"missing or malformed field: {e}") from None
    ids = [int(st["id"]) for st in raw_states]
    if sorted(ids) != list(range(len(ids))):
        _fail("state ids must be 0..n-1 without gaps", "states")
    labels = [None] * len(ids)
    names = [None] * len(ids)
    for st in raw_states:
        labels[int(st["id"])] = st.get("label", [])
        names[int(st["id"])] = st.get("name")
    a_index = {name: i for i, name in enumerate(actions)}
    if len(a_index) != len(actions):
        _fail("duplicate action names", "actions")
    trans: dict = {}
    for k, t in enumerate(raw_trans):
        where = f"transitions[{k}]"
        try:
            s = int(t["from"])
            a = t["action"]
            outs = t["outcomes"]
        except (KeyError, TypeError) as e:
            _fail(f"malformed entry ({e})", where)
        if a not in a_index:
            _fail(f"unknown action {a!r}", where)
        key = (s, a_index[a])
        items = list(trans.get(key, ()))
        for j, o in enumerate(outs):
            try:
                items.append(SetOutcome(frozenset(int(x) for x in o["targets"]), float(o["prob"])))
            except (KeyError, TypeError, ValueError) as e:
                _fail(f"malformed outcome {j} ({e})", where)
        trans[key] = items
    model = MdpstModel(props, labels, initial, actions, trans, names)
    if check:
        rep = validate_model(model)
        if not rep.ok:
            raise ModelError("invalid model:\n  " + "\n  ".join(rep.issues))
    return model


def loads_json(text: str, what: str = "input"):
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ModelError(f"{what}: line {e.lineno}, column {e.colno}: {e.msg}") from None


def load_model(path) -> MdpstModel:
    with open(path) as f:
        return model_from_dict(loads_json(f.read(), str(path)))
