"""LTL formulas: AST, parser, printer and exact evaluation on lassos.

Surface syntax::

    true, identifiers, ! & | -> X U F G, parentheses

Binding, tightest first: ``! X F G``, ``U`` (right-assoc), ``&``, ``|``,
``->`` (right-assoc).
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence


class Formula:
    __slots__ = ()

    def __str__(self):
        return to_str(self)


@dataclass(frozen=True)
class TrueF(Formula):
    pass


@dataclass(frozen=True)
class Atom(Formula):
    name: str

    def __post_init__(self):
        if not self.name:
            raise ValueError("atom name must be nonempty")


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula


@dataclass(frozen=True)
class Next(Formula):
    arg: Formula


@dataclass(frozen=True)
class Eventually(Formula):
    arg: Formula


@dataclass(frozen=True)
class Always(Formula):
    arg: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Until(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


TRUE = TrueF()


def conj(fs: Iterable[Formula]) -> Formula:
    fs = list(fs)
    if not fs:
        return TRUE
    out = fs[0]
    for f in fs[1:]:
        out = And(out, f)
    return out


def disj(fs: Iterable[Formula]) -> Formula:
    fs = list(fs)
    if not fs:
        return Not(TRUE)
    out = fs[0]
    for f in fs[1:]:
        out = Or(out, f)
    return out


# -- parsing ---------------------------------------------------------------

class LtlSyntaxError(ValueError):
    def __init__(self, msg: str, pos: int):
        super().__init__(f"{msg} at position {pos}")
        self.pos = pos


_TOKEN = re.compile(r"\s*(?:(->)|([!&|()])|([A-Za-z_][A-Za-z0-9_]*))")
_KEYWORDS = {"true", "X", "U", "F", "G"}


def _tokenize(text: str):
    pos = 0
    toks = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            j = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise LtlSyntaxError(f"unknown token {text[j]!r}", j)
        start = m.start(m.lastindex)
        toks.append((m.group(m.lastindex), start))
        pos = m.end()
    toks.append(("<end>", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i][0]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def error(self, what):
        tok, pos = self.toks[self.i]
        where = "end of input" if tok == "<end>" else f"{tok!r}"
        raise LtlSyntaxError(f"{what}, found {where}", pos)

    def parse(self):
        f = self.implies()
        if self.peek() != "<end>":
            self.error("expected end of input")
        return f

    def implies(self):
        left = self.disjunction()
        if self.peek() == "->":
            self.take()
            return Implies(left, self.implies())
        return left

    def disjunction(self):
        left = self.conjunction()
        while self.peek() == "|":
            self.take()
            left = Or(left, self.conjunction())
        return left

    def conjunction(self):
        left = self.until()
        while self.peek() == "&":
            self.take()
            left = And(left, self.until())
        return left

    def until(self):
        left = self.unary()
        if self.peek() == "U":
            self.take()
            return Until(left, self.until())
        return left

    def unary(self):
        tok = self.peek()
        if tok == "!":
            self.take()
            return Not(self.unary())
        if tok == "X":
            self.take()
            return Next(self.unary())
        if tok == "F":
            self.take()
            return Eventually(self.unary())
        if tok == "G":
            self.take()
            return Always(self.unary())
        if tok == "(":
            self.take()
            f = self.implies()
            if self.peek() != ")":
                self.error("expected ')'")
            self.take()
            return f
        if tok == "true":
            self.take()
            return TRUE
        if tok == "<end>" or tok in _KEYWORDS or not re.match(r"[A-Za-z_]", tok):
            self.error("expected a formula")
        self.take()
        return Atom(tok)


def parse_ltl(text: str) -> Formula:
    return _Parser(text).parse()


# -- printing --------------------------------------------------------------

_PREC = {Implies: 1, Or: 2, And: 3, Until: 4}
_UNARY = {Not: "!", Next: "X ", Eventually: "F ", Always: "G "}
_BINOP = {Implies: " -> ", Or: " | ", And: " & ", Until: " U "}


def _prec(f):
    return _PREC.get(type(f), 5)


def to_str(f: Formula) -> str:
    if isinstance(f, TrueF):
        return "true"
    if isinstance(f, Atom):
        return f.name
    if type(f) in _UNARY:
        inner = to_str(f.arg)
        if _prec(f.arg) < 5:
            inner = f"({inner})"
        return _UNARY[type(f)] + inner
    p = _PREC[type(f)]
    right_assoc = type(f) in (Until, Implies)
    ls, rs = to_str(f.left), to_str(f.right)
    lp, rp = _prec(f.left), _prec(f.right)
    if lp < p or (right_assoc and lp == p):
        ls = f"({ls})"
    if rp < p or (not right_assoc and rp == p):
        rs = f"({rs})"
    return ls + _BINOP[type(f)] + rs


# -- rewriting ---------------------------------------------------------------

def expand_derived(f: Formula) -> Formula:
    """Rewrite ``->``, ``F`` and ``G`` into the core connectives."""
    if isinstance(f, (TrueF, Atom)):
        return f
    if isinstance(f, Implies):
        return Or(Not(expand_derived(f.left)), expand_derived(f.right))
    if isinstance(f, Eventually):
        return Until(TRUE, expand_derived(f.arg))
    if isinstance(f, Always):
        return Not(Until(TRUE, Not(expand_derived(f.arg))))
    if isinstance(f, (Not, Next)):
        return type(f)(expand_derived(f.arg))
    return type(f)(expand_derived(f.left), expand_derived(f.right))


def atoms(f: Formula) -> set:
    if isinstance(f, Atom):
        return {f.name}
    if isinstance(f, TrueF):
        return set()
    if hasattr(f, "arg"):
        return atoms(f.arg)
    return atoms(f.left) | atoms(f.right)


def is_propositional(f: Formula) -> bool:
    if isinstance(f, (TrueF, Atom)):
        return True
    if isinstance(f, Not):
        return is_propositional(f.arg)
    if isinstance(f, (And, Or, Implies)):
        return is_propositional(f.left) and is_propositional(f.right)
    return False


def eval_prop(f: Formula, letter) -> bool:
    """Evaluate a propositional formula on a set of true atoms."""
    if isinstance(f, TrueF):
        return True
    if isinstance(f, Atom):
        return f.name in letter
    if isinstance(f, Not):
        return not eval_prop(f.arg, letter)
    if isinstance(f, And):
        return eval_prop(f.left, letter) and eval_prop(f.right, letter)
    if isinstance(f, Or):
        return eval_prop(f.left, letter) or eval_prop(f.right, letter)
    if isinstance(f, Implies):
        return (not eval_prop(f.left, letter)) or eval_prop(f.right, letter)
    raise ValueError(f"temporal operator in propositional context: {to_str(f)}")


# -- lassos ----------------------------------------------------------------

@dataclass(frozen=True)
class Lasso:
    """The infinite word ``stem . loop^omega``."""
    stem: tuple
    loop: tuple

    def __post_init__(self):
        object.__setattr__(self, "stem", tuple(frozenset(x) for x in self.stem))
        object.__setattr__(self, "loop", tuple(frozenset(x) for x in self.loop))
        if not self.loop:
            raise ValueError("lasso loop must be nonempty")

    def __len__(self):
        return len(self.stem) + len(self.loop)

    @property
    def letters(self) -> tuple:
        return self.stem + self.loop

    def succ(self, i: int) -> int:
        return i + 1 if i + 1 < len(self) else len(self.stem)


def _eval_all(f: Formula, w: Lasso, memo: dict) -> list:
    got = memo.get(f)
    if got is not None:
        return got
    n = len(w)
    letters = w.letters
    succ = [w.succ(i) for i in range(n)]
    if isinstance(f, TrueF):
        res = [True] * n
    elif isinstance(f, Atom):
        res = [f.name in letters[i] for i in range(n)]
    elif isinstance(f, Not):
        res = [not x for x in _eval_all(f.arg, w, memo)]
    elif isinstance(f, And):
        a, b = _eval_all(f.left, w, memo), _eval_all(f.right, w, memo)
        res = [x and y for x, y in zip(a, b)]
    elif isinstance(f, Or):
        a, b = _eval_all(f.left, w, memo), _eval_all(f.right, w, memo)
        res = [x or y for x, y in zip(a, b)]
    elif isinstance(f, Implies):
        a, b = _eval_all(f.left, w, memo), _eval_all(f.right, w, memo)
        res = [(not x) or y for x, y in zip(a, b)]
    elif isinstance(f, Next):
        a = _eval_all(f.arg, w, memo)
        res = [a[succ[i]] for i in range(n)]
    elif isinstance(f, (Until, Eventually, Always)):
        if isinstance(f, Until):
            a, b = _eval_all(f.left, w, memo), _eval_all(f.right, w, memo)
        elif isinstance(f, Eventually):
            a, b = [True] * n, _eval_all(f.arg, w, memo)
        else:
            a, b = [True] * n, [not x for x in _eval_all(f.arg, w, memo)]
        # least fixpoint of u = b | (a & X u); at most n rounds
        res = [False] * n
        changed = True
        while changed:
            changed = False
            for i in reversed(range(n)):
                v = b[i] or (a[i] and res[succ[i]])
                if v and not res[i]:
                    res[i] = True
                    changed = True
        if isinstance(f, Always):
            res = [not x for x in res]
    else:
        raise TypeError(f"unknown formula node {f!r}")
    memo[f] = res
    return res


def eval_lasso(f: Formula, w: Lasso) -> bool:
    """Whether ``stem . loop^omega`` satisfies ``f`` (exact)."""
    return _eval_all(f, w, {})[0]


def lasso(stem: Sequence[Iterable[str]], loop: Sequence[Iterable[str]]) -> Lasso:
    return Lasso(tuple(frozenset(x) for x in stem), tuple(frozenset(x) for x in loop))


def persist_avoid_formula(goal_groups: Sequence[Iterable[str]], avoid: str | None = "obs") -> Formula:
    """``G F (g1) & ... & G F (gk) & G !avoid`` with each ``gi`` a disjunction."""
    parts = [Always(Eventually(disj(Atom(a) for a in sorted(g)))) for g in goal_groups]
    if avoid is not None:
        parts.append(Always(Not(Atom(avoid))))
    return conj(parts)
