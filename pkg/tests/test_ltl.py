import pytest

from mdpst.ltl import (
    Always,
    And,
    Atom,
    Eventually,
    LtlSyntaxError,
    Not,
    TrueF,
    Until,
    eval_lasso,
    expand_derived,
    is_propositional,
    lasso,
    parse_ltl,
    persist_avoid_formula,
    to_str,
)

PHI = "(G F (b1 | b2)) & (G F b3) & (G F (b4 | b5)) & (G !obs)"


def _conjuncts(f):
    if isinstance(f, And):
        return _conjuncts(f.left) + _conjuncts(f.right)
    return [f]


def test_parse_simple():
    assert parse_ltl("G F b3") == Always(Eventually(Atom("b3")))


def test_parse_persist_avoid_has_four_conjuncts():
    parts = _conjuncts(parse_ltl(PHI))
    assert len(parts) == 4
    assert parts[-1] == Always(Not(Atom("obs")))


def test_syntax_error_at_end():
    with pytest.raises(LtlSyntaxError, match="end of input"):
        parse_ltl("a U")


@pytest.mark.parametrize("text", ["G F b3", PHI, "a U (b & X !c)", "!(a -> F b)"])
def test_print_parse_round_trip(text):
    f = parse_ltl(text)
    assert parse_ltl(to_str(f)) == f


def test_expand_derived():
    a, b = Atom("a"), Atom("b")
    assert expand_derived(parse_ltl("F a")) == Until(TrueF(), a)
    assert expand_derived(parse_ltl("G a")) == Not(Until(TrueF(), Not(a)))
    assert expand_derived(parse_ltl("a U b")) == Until(a, b)


def test_propositional():
    assert is_propositional(parse_ltl("a & !b"))
    assert not is_propositional(parse_ltl("F a"))


def test_eval_lasso_examples():
    assert eval_lasso(parse_ltl("G F a"), lasso([], [{"a"}, set()]))
    assert not eval_lasso(parse_ltl("G !obs"), lasso([{"obs"}], [set()]))
    assert eval_lasso(parse_ltl(PHI), lasso([], [{"b1"}, {"b3"}, {"b4"}]))
    assert not eval_lasso(parse_ltl(PHI), lasso([], [{"b1"}, {"b4"}]))


def test_until_and_next():
    w = lasso([{"a"}, {"a"}, {"b"}], [set()])
    assert eval_lasso(parse_ltl("a U b"), w)
    assert eval_lasso(parse_ltl("X X b"), w)
    assert not eval_lasso(parse_ltl("X b"), w)


def test_persist_avoid_formula_builder():
    f = persist_avoid_formula([["b1", "b2"], ["b3"], ["b4", "b5"]], "obs")
    w = lasso([], [{"b2"}, {"b3"}, {"b5"}])
    assert eval_lasso(f, w) == eval_lasso(parse_ltl(PHI), w)
