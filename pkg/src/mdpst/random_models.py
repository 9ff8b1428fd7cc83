"""Seeded random products for cross-checking against the oracle."""
from __future__ import annotations

import random

from .model import MdpstModel, SetOutcome
from .product import ProductMdpst, as_product


def random_product(seed: int, max_states: int = 8, max_actions: int = 2, max_outcomes: int = 2,
                   max_set: int = 2, classical: bool = False, p_single: float = 0.6,
                   p_trap: float = 0.35) -> ProductMdpst:
    """Random product with masses in tenths and a random accepting subset.

    Some non-initial states are traps with a single self-loop and the initial
    state always branches, which makes intermediate values more common.
    """
    rng = random.Random(seed)
    n = rng.randint(2, max_states)
    actions = [f"a{i}" for i in range(max_actions)]
    trans = {}
    for s in range(n):
        if s > 0 and rng.random() < p_trap:
            trans[(s, 0)] = [SetOutcome(frozenset({s}), 1.0)]
            continue
        k = rng.randint(1, max_actions)
        for a in sorted(rng.sample(range(max_actions), k)):
            n_out = rng.randint(min(2, max_outcomes) if s == 0 else 1, max_outcomes)
            if n_out == 1:
                masses = [1.0]
            else:
                cuts = sorted(rng.sample(range(1, 10), n_out - 1))
                bounds = [0] + cuts + [10]
                masses = [(bounds[i + 1] - bounds[i]) / 10 for i in range(n_out)]
            outs = []
            for m in masses:
                size = 1 if classical or rng.random() < p_single else rng.randint(2, max_set)
                outs.append(SetOutcome(frozenset(rng.sample(range(n), min(size, n))), m))
            trans[(s, a)] = outs
    n_acc = rng.randint(1, max(1, n // 2))
    acc = rng.sample(range(n), n_acc)
    names = [f"s{i}" for i in range(n)]
    m = MdpstModel([], [()] * n, 0, actions, trans, names)
    return as_product(m, acc)


def refine(p: ProductMdpst, seed: int) -> ProductMdpst:
    """Replace every target set by a random nonempty subset."""
    rng = random.Random(seed)
    trans = {}
    for key, outs in sorted(p.transitions.items()):
        new = []
        for o in outs:
            members = sorted(o.targets)
            k = rng.randint(1, len(members))
            new.append(SetOutcome(frozenset(rng.sample(members, k)), o.prob))
        trans[key] = new
    m = MdpstModel(p.props, p.labels, p.initial, p.actions, trans, p.names)
    return as_product(m, p.accepting)
