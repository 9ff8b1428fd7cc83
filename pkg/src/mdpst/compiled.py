"""Flat array encoding of an MDPST for vectorized sweeps.

Layout (CSR style, three levels)::

    state s   -> choices   state_ptr[s]  : state_ptr[s+1]
    choice c  -> outcomes  outcome_ptr[c]: outcome_ptr[c+1]
    outcome o -> members   member_ptr[o] : member_ptr[o+1]

Member index ``n`` is a sink whose value is pinned to 0.  Every state has at
least one choice; a state without actions gets a dummy choice (action -1)
leading to the sink.
"""
from __future__ import annotations

import numpy as np


class Compiled:
    def __init__(self, n, choices):
        """``choices[s]`` is a list of ``(action, [(prob, members), ...])``."""
        self.n = n
        state_ptr = [0]
        choice_action, outcome_ptr, prob, member_ptr, members = [], [0], [], [0], []
        for s in range(n):
            cs = choices[s] if choices[s] else [(-1, [(1.0, [n])])]
            for act, outs in cs:
                choice_action.append(act)
                for p, mem in outs:
                    prob.append(p)
                    members.extend(mem)
                    member_ptr.append(len(members))
                outcome_ptr.append(len(prob))
            state_ptr.append(len(choice_action))
        self._set(state_ptr, choice_action, outcome_ptr, prob, member_ptr, members)

    def _set(self, state_ptr, choice_action, outcome_ptr, prob, member_ptr, members):
        self.state_ptr = np.asarray(state_ptr, dtype=np.int64)
        self.choice_action = np.asarray(choice_action, dtype=np.int64)
        self.outcome_ptr = np.asarray(outcome_ptr, dtype=np.int64)
        self.prob = np.asarray(prob, dtype=float)
        self.member_ptr = np.asarray(member_ptr, dtype=np.int64)
        self.members = np.asarray(members, dtype=np.int64)
        self.choice_state = np.repeat(np.arange(self.n), np.diff(self.state_ptr))
        self.outcome_choice = np.repeat(np.arange(len(self.choice_action)), np.diff(self.outcome_ptr))

    @classmethod
    def from_arrays(cls, n, state_ptr, choice_action, outcome_ptr, prob, member_ptr, members):
        """Build directly from CSR arrays; every state must have a choice."""
        c = cls.__new__(cls)
        c.n = n
        c._set(state_ptr, choice_action, outcome_ptr, prob, member_ptr, members)
        if np.any(np.diff(c.state_ptr) == 0):
            raise ValueError("every state needs at least one choice")
        return c

    @property
    def n_choices(self) -> int:
        return len(self.choice_action)

    def choices_of(self, s):
        return range(self.state_ptr[s], self.state_ptr[s + 1])

    def outcomes_of(self, c):
        for o in range(self.outcome_ptr[c], self.outcome_ptr[c + 1]):
            yield self.prob[o], self.members[self.member_ptr[o]: self.member_ptr[o + 1]]

    def _ext(self, v, fill):
        return np.append(v, fill)

    def outcome_min(self, V):
        return np.minimum.reduceat(self._ext(V, 0.0)[self.members], self.member_ptr[:-1])

    def q_values(self, V):
        """Per-choice value ``sum_Theta T * min_{s' in Theta} V(s')``."""
        return np.add.reduceat(self.prob * self.outcome_min(V), self.outcome_ptr[:-1])

    def bellman(self, V):
        return np.maximum.reduceat(self.q_values(V), self.state_ptr[:-1])

    # boolean kernels for the qualitative fixpoints
    def outcome_inside(self, mask):
        """Per outcome: every member lies in ``mask`` (sink never does)."""
        inside = self._ext(mask, False)[self.members].astype(np.uint8)
        return np.minimum.reduceat(inside, self.member_ptr[:-1]).astype(bool)

    def choice_all(self, outcome_flags):
        f = outcome_flags.astype(np.uint8)
        return np.minimum.reduceat(f, self.outcome_ptr[:-1]).astype(bool)

    def choice_any(self, outcome_flags):
        f = outcome_flags.astype(np.uint8)
        return np.maximum.reduceat(f, self.outcome_ptr[:-1]).astype(bool)

    def state_any(self, choice_flags):
        f = choice_flags.astype(np.uint8)
        return np.maximum.reduceat(f, self.state_ptr[:-1]).astype(bool)


def gather(ptr, idx):
    """Concatenate CSR segments ``idx``; returns (flat positions, new ptr)."""
    idx = np.asarray(idx, dtype=np.int64)
    lengths = ptr[idx + 1] - ptr[idx]
    new_ptr = np.zeros(len(idx) + 1, dtype=np.int64)
    np.cumsum(lengths, out=new_ptr[1:])
    flat = np.repeat(ptr[idx] - new_ptr[:-1], lengths) + np.arange(new_ptr[-1])
    return flat, new_ptr


def compile_model(model) -> Compiled:
    """Compile every action of every state; choice actions are model indices."""
    choices = []
    for s in range(model.n_states):
        cs = []
        for a in model.enabled(s):
            cs.append((a, [(o.prob, sorted(o.targets)) for o in model.transitions[(s, a)]]))
        choices.append(cs)
    return Compiled(model.n_states, choices)


def compiled_of(model) -> Compiled:
    """Cached :func:`compile_model`; models are not mutated after construction."""
    c = model.__dict__.get("_compiled")
    if c is None:
        c = model.__dict__["_compiled"] = compile_model(model)
    return c
