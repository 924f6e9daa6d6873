"""Shadowing: atomization, level reduction, idempotence, round trip."""

import pytest
from hypothesis import given, settings

import conftest
from modalprover.errors import FreeVariableError
from modalprover.shadowing import AtomTable, atomize, shadow, shadow_set, unshadow
from modalprover.syntax import (
    AgentSym, Atom, Believes, Const, Forall, Or, ShadowAtom, TimeSym,
    Var, alpha_equal, canon, level,
)

A = AgentSym("a")
B = AgentSym("b")
T = TimeSym(0, "t1")
P = Atom("P")
R = Atom("R")


class TestAtomize:
    def test_deterministic(self):
        table = AtomTable()
        f = Believes(A, T, P)
        first = table.atomize(f)
        second = table.atomize(f)
        assert first == second
        assert first.atom_id == second.atom_id

    def test_alpha_variants_collide(self):
        table = AtomTable()
        f = Forall("?x", Believes(A, T, Atom("Hot", (Var("?x"),))))
        g = Forall("?y", Believes(A, T, Atom("Hot", (Var("?y"),))))
        assert table.atomize(f).atom_id == table.atomize(g).atom_id

    def test_distinct_bodies_distinct_ids(self):
        table = AtomTable()
        x = table.atomize(Believes(A, T, P))
        y = table.atomize(Believes(A, T, Atom("Q")))
        assert x.atom_id != y.atom_id
        assert x != y

    def test_free_variable_rejected(self):
        with pytest.raises(FreeVariableError):
            atomize(Believes(A, T, Atom("Hot", (Var("?x"),))))

    def test_reverse_mapping(self):
        table = AtomTable()
        f = Believes(A, T, P)
        atom = table.atomize(f)
        assert table.expand(atom.atom_id) == f


class TestShadow:
    def test_modal_disjunct_becomes_atom(self):
        f = Or(Believes(A, T, P), R)
        out = shadow(f, 1)
        assert isinstance(out, Or)
        assert isinstance(out.left, ShadowAtom)
        assert out.left.body == Believes(A, T, P)
        assert out.right == R

    def test_first_order_fixed_point(self):
        f = Atom("Sleepy", (Const("jack"),))
        assert shadow(f, 1) == f

    def test_nested_modality_is_one_atom(self):
        f = Believes(A, T, Believes(B, T, P))
        out = shadow(f, 1)
        assert isinstance(out, ShadowAtom)
        assert out.body == f

    def test_level_two_is_identity(self):
        f = Believes(A, T, Believes(B, T, P))
        assert shadow(f, 2) == f

    def test_level_zero_collapses_quantifiers(self):
        f = Forall("?x", Atom("Hot", (Var("?x"),)))
        out = shadow(f, 0)
        assert isinstance(out, ShadowAtom)

    def test_level_zero_keeps_connectives(self):
        f = Or(Atom("Hot", (Const("c"),)), P)
        out = shadow(f, 0)
        assert isinstance(out, Or)
        assert isinstance(out.left, ShadowAtom)
        assert out.right == P

    def test_open_modal_subformula_rejected(self):
        f = Forall("?x", Believes(A, T, Atom("Hot", (Var("?x"),))))
        with pytest.raises(FreeVariableError):
            shadow(f, 1)


class TestShadowSet:
    def test_shared_interning(self):
        b = Believes(A, T, P)
        out = shadow_set([b, Or(b, Atom("Q"))], 1)
        assert isinstance(out[0], ShadowAtom)
        assert out[1].left == out[0]
        assert out[1].left.atom_id == out[0].atom_id

    def test_empty(self):
        assert shadow_set([], 1) == []

    def test_distinct_bodies(self):
        out = shadow_set([Believes(A, T, P), Believes(A, T, Atom("Q"))], 1)
        assert out[0] != out[1]
        assert out[0].atom_id != out[1].atom_id


@given(conftest.formulas(depth=3))
@settings(max_examples=150, deadline=None)
def test_shadow_reduces_level(f):
    for lvl in (0, 1, 2):
        assert level(shadow(f, lvl)) <= lvl


@given(conftest.formulas(depth=3))
@settings(max_examples=150, deadline=None)
def test_shadow_idempotent(f):
    for lvl in (0, 1, 2):
        table = AtomTable()
        once = shadow(f, lvl, table)
        twice = shadow(once, lvl, table)
        assert once == twice


@given(conftest.formulas(depth=3))
@settings(max_examples=150, deadline=None)
def test_unshadow_round_trip(f):
    for lvl in (0, 1, 2):
        assert alpha_equal(unshadow(shadow(f, lvl)), f)


@given(conftest.formulas(depth=2), conftest.formulas(depth=2))
@settings(max_examples=150, deadline=None)
def test_atomize_injective_up_to_alpha(f, g):
    table = AtomTable()
    fa = table.atomize(f)
    ga = table.atomize(g)
    assert (fa.atom_id == ga.atom_id) == (canon(f) == canon(g))


def test_atom_table_is_an_atomic_map():
    # insert-if-absent semantics under concurrent atomization: alpha
    # variants racing from many threads still collapse to one id
    import threading

    table = AtomTable()
    variants = [Forall(f"?v{i}", Believes(A, T, Atom("Hot", (Var(f"?v{i}"),))))
                for i in range(32)]
    ids: list[int] = []

    def work(start: int) -> None:
        for k in range(200):
            atom = table.atomize(variants[(start + k) % len(variants)])
            ids.append(atom.atom_id)

    threads = [threading.Thread(target=work, args=(i,)) for i in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert set(ids) == {1}
    assert len(table) == 1
