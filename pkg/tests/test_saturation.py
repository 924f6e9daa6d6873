"""Resolution rules and the given-clause saturation loop."""

import random

from modalprover.clauses import Clause, Literal, ResolveOrigin
from modalprover.cnf import cnf
from modalprover.saturation import (
    EXHAUSTED, PROVED, SATURATED, FoLimits, factors, prove_answer, prove_fo,
    resolve, subsumes,
)
from modalprover.syntax import (
    App, Atom, Const, Forall, Implies, Not, Or, Var, render_term,
)

from conftest import gen_ground_problem
from oracles import truth_table_entails

C = Const("c")


def lit(positive: bool, pred: str, *args) -> Literal:
    return Literal(positive, Atom(pred, tuple(args)))


def clause(*lits) -> Clause:
    return Clause.make(lits)


class TestResolve:
    def test_unit_resolution(self):
        c1 = clause(lit(False, "P", Var("?x")), lit(True, "Q", Var("?x")))
        c2 = clause(lit(True, "P", C))
        out = resolve(c1, c2)
        assert clause(lit(True, "Q", C)) in out

    def test_refutation(self):
        c1 = clause(lit(True, "P", Var("?x")))
        c2 = clause(lit(False, "P", App("f", (Var("?y"),))))
        out = resolve(c1, c2)
        assert any(c.is_empty() for c in out)

    def test_factoring_included(self):
        c1 = clause(lit(True, "P", Var("?x")),
                    lit(True, "P", App("f", (Var("?y"),))))
        other = clause(lit(True, "Q"))
        out = resolve(c1, other)
        assert clause(lit(True, "P", App("f", (Var("?y"),)))) in out

    def test_no_resolvents(self):
        assert resolve(clause(lit(True, "P")), clause(lit(True, "Q"))) == []

    def test_tautologies_suppressed(self):
        c1 = clause(lit(True, "P"), lit(True, "Q"))
        c2 = clause(lit(False, "P"), lit(False, "Q"))
        out = resolve(c1, c2)
        assert all(not c.is_tautology() for c in out)


class TestFactors:
    def test_factor_unifies_same_sign_literals(self):
        c = clause(lit(True, "P", Var("?x")),
                   lit(True, "P", App("f", (Var("?y"),))))
        out = factors(c)
        assert len(out) == 1
        lits, sigma = out[0]
        assert Clause.make(lits) == clause(lit(True, "P", App("f", (Var("?y"),))))
        assert sigma.bindings["?x"] == App("f", (Var("?y"),))


class TestSubsumption:
    def test_general_subsumes_instance(self):
        general = clause(lit(True, "P", Var("?x")))
        instance = clause(lit(True, "P", C), lit(True, "Q"))
        assert subsumes(general, instance)
        assert not subsumes(instance, general)

    def test_longer_never_subsumes_shorter(self):
        long_c = clause(lit(True, "P", Var("?x")), lit(True, "P", Var("?y")))
        short_c = clause(lit(True, "P", C))
        assert not subsumes(long_c, short_c)


class TestProveFo:
    def test_syllogism_has_two_resolution_steps(self):
        gamma = cnf(Forall("?x", Implies(Atom("H", (Var("?x"),)),
                                         Atom("M", (Var("?x"),)))))
        gamma += cnf(Atom("H", (Const("s"),)))
        out = prove_fo(gamma, Atom("M", (Const("s"),)))
        assert out.status == PROVED
        steps = out.store.derivation(out.refutation)
        resolutions = [r for r in steps if isinstance(r.origin, ResolveOrigin)]
        assert len(resolutions) == 2
        assert steps[-1].is_empty()

    def test_underivable_saturates(self):
        out = prove_fo(cnf(Atom("P")), Atom("Q"))
        assert out.status == SATURATED

    def test_tautology_from_empty(self):
        out = prove_fo([], Or(Atom("P"), Not(Atom("P"))))
        assert out.status == PROVED

    def test_clause_budget_reported(self):
        # unbounded term growth trips the generated-clause budget
        gamma = cnf(Forall("?x", Implies(Atom("P", (Var("?x"),)),
                                         Atom("P", (App("f", (Var("?x"),)),)))))
        gamma += cnf(Atom("P", (C,)))
        out = prove_fo(gamma, Atom("Q"),
                       FoLimits(max_clauses=50, timeout_ms=5_000))
        assert out.status == EXHAUSTED
        assert "budget" in out.reason

    def test_deterministic(self):
        gamma1 = cnf(Forall("?x", Implies(Atom("H", (Var("?x"),)),
                                          Atom("M", (Var("?x"),)))))
        gamma1 += cnf(Atom("H", (Const("s"),)))
        a = prove_fo(list(gamma1), Atom("M", (Const("s"),)))
        b = prove_fo(list(gamma1), Atom("M", (Const("s"),)))
        assert a.refutation == b.refutation
        assert [r.render() for r in a.store.derivation(a.refutation)] \
            == [r.render() for r in b.store.derivation(b.refutation)]


class TestAnswers:
    def test_two_witnesses(self):
        gamma = cnf(Atom("H", (Const("s"),))) + cnf(Atom("H", (Const("p"),)))
        out = prove_answer(gamma, Atom("H", (Var("?x"),)), ["?x"])
        assert out.status == PROVED
        bindings = sorted(render_term(a.bindings.bindings["?x"])
                          for a in out.answers)
        assert bindings == ["p", "s"]

    def test_no_witness(self):
        gamma = cnf(Atom("Safe", (Const("s"),)))
        out = prove_answer(gamma, Atom("H", (Var("?x"),)), ["?x"])
        assert out.status == SATURATED
        assert out.answers == []

    def test_schematic_answer(self):
        gamma = cnf(Forall("?y", Atom("P", (App("f", (Var("?y"),)),))))
        out = prove_answer(gamma, Atom("P", (Var("?x"),)), ["?x"])
        assert out.status == PROVED
        (ans,) = out.answers
        term = ans.bindings.bindings["?x"]
        assert isinstance(term, App) and term.fn == "f"

    def test_max_answers_cap(self):
        gamma = []
        for name in ("a1", "b1", "c1", "d1"):
            gamma += cnf(Atom("H", (Const(name),)))
        out = prove_answer(gamma, Atom("H", (Var("?x"),)), ["?x"],
                           FoLimits(max_answers=2))
        assert len(out.answers) == 2


def test_ground_completeness_sample():
    """prove_fo agrees with the truth-table oracle on random ground
    problems (the acceptance suite runs the full thousand)."""
    rng = random.Random(23)
    for _ in range(150):
        gamma_f, goal = gen_ground_problem(rng)
        clauses = []
        for f in gamma_f:
            clauses += cnf(f)
        out = prove_fo(clauses, goal)
        expected = truth_table_entails(gamma_f, goal)
        assert out.status in (PROVED, SATURATED)
        assert (out.status == PROVED) == expected, (gamma_f, goal)
