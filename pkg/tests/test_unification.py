"""Robinson unification: examples, the mgu law, idempotence."""

import random

from hypothesis import given, settings
from hypothesis import strategies as st

from modalprover.syntax import App, Atom, Const, Var
from modalprover.unification import unify

from oracles import apply_mapping, enumerate_terms, enumerate_unifiers

C = Const("c")
D = Const("d")


def f(t):
    return App("f", (t,))


class TestExamples:
    def test_variable_to_constant(self):
        s = unify(Atom("P", (Var("?x"),)), Atom("P", (C,)))
        assert s is not None
        assert s.bindings == {"?x": C}

    def test_chained_bindings(self):
        s = unify(Atom("P", (Var("?x"), f(Var("?x")))),
                  Atom("P", (C, Var("?y"))))
        assert s is not None
        assert s.bindings == {"?x": C, "?y": f(C)}

    def test_occurs_check(self):
        assert unify(Var("?x"), f(Var("?x"))) is None

    def test_head_clash(self):
        assert unify(Atom("P", (C,)), Atom("Q", (C,))) is None

    def test_arity_clash(self):
        assert unify(Atom("P", (C,)), Atom("P", (C, D))) is None

    def test_function_clash(self):
        assert unify(f(C), App("g", (C,))) is None


def _random_term(rng: random.Random, depth: int):
    roll = rng.random()
    if depth <= 0 or roll < 0.4:
        return rng.choice([Var("?x"), Var("?y"), C, D])
    return f(_random_term(rng, depth - 1))


def test_mgu_law_against_enumeration():
    """Every unifier found by brute force factors through the mgu."""
    rng = random.Random(7)
    candidates = enumerate_terms(["c", "d"], ["f"], 2)
    checked_some = False
    for _ in range(400):
        a = _random_term(rng, 2)
        b = _random_term(rng, 2)
        found = enumerate_unifiers(a, b, ["?x", "?y"], candidates)
        mgu = unify(a, b)
        if mgu is None:
            assert found == [], (a, b)
            continue
        checked_some = True
        for u in found:
            for v in ("?x", "?y"):
                via_mgu = apply_mapping(mgu.apply_term(Var(v)), u)
                direct = apply_mapping(Var(v), u)
                assert via_mgu == direct, (a, b, u, mgu.bindings)
    assert checked_some


@given(st.integers(0, 10_000))
@settings(max_examples=100, deadline=None)
def test_substitution_idempotent(seed):
    rng = random.Random(seed)
    a = _random_term(rng, 3)
    b = _random_term(rng, 3)
    s = unify(a, b)
    if s is None:
        return
    for t in (a, b, Var("?x"), Var("?y")):
        once = s.apply_term(t)
        assert s.apply_term(once) == once
    assert s.apply_term(a) == s.apply_term(b)
