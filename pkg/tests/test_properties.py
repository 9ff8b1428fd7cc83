"""Property-based checks over randomly generated inputs."""
import json

import numpy as np
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from mdpst import jsonio
from mdpst.automata import accepts_lasso, fixture_dra, fixture_ldba
from mdpst.compiled import compiled_of
from mdpst.hexworld import default_layout, generate_hexworld
from mdpst.ltl import (
    Always, And, Atom, Eventually, Implies, Next, Not, Or, Until,
    eval_lasso, lasso, parse_ltl, to_str,
)
from mdpst.model import model_from_dict, model_to_dict, post_states, realize_feasible_distribution, validate_model
from mdpst.product import product_from_dict, product_to_dict
from mdpst.random_models import random_product, refine
from mdpst.synthesis import solve
from mdpst.winning_region import robust_reach_vi

seeds = st.integers(min_value=0, max_value=10**6)
fast = settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])


@fast
@given(seeds, st.data())
def test_feasible_distribution_is_a_distribution(seed, data):
    p = random_product(seed, max_set=3)
    (s, a) = data.draw(st.sampled_from(sorted(p.transitions)))
    alpha = {}
    for o in p.transitions[(s, a)]:
        members = sorted(o.targets)
        raw = data.draw(st.lists(st.integers(0, 5), min_size=len(members), max_size=len(members)))
        if sum(raw) == 0:
            raw[0] = 1
        alpha[o.targets] = {m: r / sum(raw) for m, r in zip(members, raw)}
    dist = realize_feasible_distribution(p, s, a, alpha)
    assert abs(sum(dist.values()) - 1.0) < 1e-9
    assert set(dist) <= post_states(p, s, a)


@fast
@given(seeds, st.data())
def test_reach_values_bounded_and_monotone_in_targets(seed, data):
    p = random_product(seed)
    c = compiled_of(p)
    small = data.draw(st.sets(st.integers(0, p.n_states - 1), min_size=1))
    extra = data.draw(st.sets(st.integers(0, p.n_states - 1)))
    v1 = robust_reach_vi(c, sorted(small), theta=1e-10).values
    v2 = robust_reach_vi(c, sorted(small | extra), theta=1e-10).values
    assert np.all(v1 >= -1e-12) and np.all(v1 <= 1 + 1e-12)
    assert np.all(v2 >= v1 - 1e-8)


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_refinement_never_lowers_value(seed):
    p = random_product(seed)
    q = refine(p, seed)
    assert solve(q, theta=1e-12)[0].value >= solve(p, theta=1e-12)[0].value - 1e-9


@fast
@given(seeds)
def test_json_round_trip(seed):
    p = random_product(seed, max_set=3)
    d = model_to_dict(p)
    m = model_from_dict(json.loads(jsonio.dumps(d)))
    assert validate_model(m).ok
    assert jsonio.dumps(model_to_dict(m)) == jsonio.dumps(d)
    pd = product_to_dict(p)
    assert jsonio.dumps(product_to_dict(product_from_dict(pd))) == jsonio.dumps(pd)


ATOMS = st.sampled_from(["a", "b", "c"]).map(Atom)


def _formulas():
    return st.recursive(
        ATOMS,
        lambda sub: st.one_of(
            sub.map(Not), sub.map(Next), sub.map(Eventually), sub.map(Always),
            st.tuples(sub, sub).map(lambda t: And(*t)),
            st.tuples(sub, sub).map(lambda t: Or(*t)),
            st.tuples(sub, sub).map(lambda t: Until(*t)),
            st.tuples(sub, sub).map(lambda t: Implies(*t)),
        ),
        max_leaves=8,
    )


letters = st.frozensets(st.sampled_from(["a", "b", "c"]))
lassos = st.tuples(st.lists(letters, max_size=4), st.lists(letters, min_size=1, max_size=4)) \
    .map(lambda t: lasso(*t))


@fast
@given(_formulas(), lassos)
def test_print_parse_round_trip(f, w):
    g = parse_ltl(to_str(f))
    assert to_str(g) == to_str(f)
    assert eval_lasso(g, w) == eval_lasso(f, w)


@fast
@given(lassos)
def test_gf_fixtures_match_formula(w):
    phi = parse_ltl("G F a")
    for aut in (fixture_ldba("gf", "a"), fixture_dra("gf", "a")):
        assert accepts_lasso(aut, w) == eval_lasso(phi, w)


@settings(max_examples=15, deadline=None)
@given(st.integers(6, 12), st.integers(3, 7))
def test_random_hexworld_sizes_are_valid(nx, ny):
    lay = default_layout(nx, ny)
    m = generate_hexworld(lay)
    assert m.n_states == 4 * nx * ny
    assert validate_model(m).ok
    assert len(lay.bases) == 5
