"""Modal engine: schema applications, the alternating loop, fixpoints."""

import pytest

from modalprover.engine import (
    EXHAUSTED, FAILED, PROVED, KnowledgeBase, ModalLimits, answer, apply_IB,
    apply_IO, expand_contexts, promote_belief, prove,
)
from modalprover.cnf import cnf
from modalprover.errors import TimeError, UsageError
from modalprover.proof import RULE_IB, RULE_IO, RULE_IR
from modalprover.saturation import prove_fo
from modalprover.syntax import (
    AgentSym, Atom, Believes, Const, Forall, Goal, Implies, Not, Or, Ought,
    TimeSym, Var, canon,
)

from conftest import make_problem

A = AgentSym("a")
B = AgentSym("b")
T0, T1, T2 = TimeSym(0, "t0"), TimeSym(1, "t1"), TimeSym(2, "t2")
P, Q = Atom("P"), Atom("Q")


def kb_of(*formulas) -> KnowledgeBase:
    kb = KnowledgeBase()
    for i, f in enumerate(formulas, start=1):
        kb.add(f, i)
    return kb


class TestApplyIB:
    def test_resolvent_lands_at_max_time(self):
        kb = kb_of(Believes(A, T1, Or(P, Q)), Believes(A, T2, Not(Q)))
        out = apply_IB(kb)
        assert Believes(A, T2, P) in out

    def test_different_agents_never_resolve(self):
        kb = kb_of(Believes(A, T1, P), Believes(B, T1, Not(P)))
        assert apply_IB(kb) == []

    def test_unification_within_context(self):
        rule = Forall("?x", Implies(Atom("H", (Var("?x"),)),
                                    Atom("M", (Var("?x"),))))
        kb = kb_of(Believes(A, T1, rule),
                   Believes(A, T1, Atom("H", (Const("s"),))))
        out = apply_IB(kb)
        assert Believes(A, T1, Atom("M", (Const("s"),))) in out

    def test_contradictory_bodies_yield_nothing(self):
        # the grammar has no falsum, so an empty resolvent is not emitted
        kb = kb_of(Believes(A, T1, P), Believes(A, T1, Not(P)))
        assert apply_IB(kb) == []


class TestPromote:
    def test_forward(self):
        assert promote_belief(Believes(A, T0, P), T2) == Believes(A, T2, P)

    def test_backward_rejected(self):
        with pytest.raises(TimeError):
            promote_belief(Believes(A, T2, P), T1)

    def test_promotion_then_ib_confluent_with_max_rule(self):
        # resolving at (t1, t2) directly equals promoting to t2 first
        direct = kb_of(Believes(A, T1, Or(P, Q)), Believes(A, T2, Not(Q)))
        promoted = kb_of(promote_belief(Believes(A, T1, Or(P, Q)), T2),
                         Believes(A, T2, Not(Q)))
        direct_out = {canon(f) for f in apply_IB(direct)}
        promoted_out = {canon(f) for f in apply_IB(promoted)}
        assert direct_out == promoted_out == {canon(Believes(A, T2, P))}


class TestApplyIO:
    def test_condition_plus_obligation_yields_goal(self):
        kb = kb_of(Believes(A, T1, Atom("Raining")),
                   Believes(A, T1, Ought(A, T1, Atom("Raining"),
                                         Atom("CarryUmbrella"))))
        out = apply_IO(kb)
        assert Goal(A, T1, Atom("CarryUmbrella")) in out

    def test_mismatched_believer_yields_nothing(self):
        kb = kb_of(Believes(A, T1, Atom("Raining")),
                   Believes(B, T1, Ought(B, T1, Atom("Raining"),
                                         Atom("CarryUmbrella"))))
        assert apply_IO(kb) == []

    def test_obligation_about_another_agent_yields_nothing(self):
        kb = kb_of(Believes(A, T1, Atom("Raining")),
                   Believes(A, T1, Ought(B, T1, Atom("Raining"),
                                         Atom("CarryUmbrella"))))
        assert apply_IO(kb) == []

    def test_unifier_applied_to_duty(self):
        kb = kb_of(
            Believes(A, T1, Atom("H", (Const("s"),))),
            Believes(A, T1, Ought(A, T1, Atom("H", (Var("?x"),)),
                                  Atom("Rescue", (Var("?x"),)))))
        out = apply_IO(kb)
        assert Goal(A, T1, Atom("Rescue", (Const("s"),))) in out

    def test_goal_time_is_max(self):
        kb = kb_of(Believes(A, T2, Atom("Raining")),
                   Believes(A, T0, Ought(A, T0, Atom("Raining"),
                                         Atom("CarryUmbrella"))))
        out = apply_IO(kb)
        assert Goal(A, T2, Atom("CarryUmbrella")) in out


class TestExpandContexts:
    def test_nested_belief_resolution(self):
        kb = kb_of(Believes(A, T1, Believes(B, T1, Or(P, Q))),
                   Believes(A, T1, Believes(B, T1, Not(P))))
        out = expand_contexts(kb, depth=3)
        assert Believes(A, T1, Believes(B, T1, Q)) in out

    def test_depth_zero_blocks_nesting_but_not_outer_ib(self):
        kb = kb_of(Believes(A, T1, Believes(B, T1, Or(P, Q))),
                   Believes(A, T1, Believes(B, T1, Not(P))),
                   Believes(A, T1, Or(P, Q)),
                   Believes(A, T1, Not(Q)))
        diag: list[str] = []
        assert expand_contexts(kb, depth=0, diag=diag) == []
        assert any("nesting limit" in d for d in diag)
        assert Believes(A, T1, P) in apply_IB(kb)

    def test_empty_context(self):
        kb = kb_of(P)
        assert expand_contexts(kb, depth=3) == []


class TestKnowledgeBase:
    def test_alpha_duplicates_ignored(self):
        kb = KnowledgeBase()
        f = Forall("?x", Believes(A, T1, Atom("Hot", (Var("?x"),))))
        g = Forall("?y", Believes(A, T1, Atom("Hot", (Var("?y"),))))
        assert kb.add(f, 1) is not None
        gen = kb.generation
        assert kb.add(g, 2) is None
        assert kb.generation == gen

    def test_contexts_view(self):
        kb = kb_of(Believes(A, T0, P), Believes(A, T2, Q),
                   Believes(B, T0, Q))
        assert kb.contexts("a", T1) == [P]
        assert kb.contexts("a", T2) == [P, Q]


class TestProve:
    def test_belief_resolution_two_iterations(self):
        problem = make_problem(
            [Believes(A, T1, Or(P, Q)), Believes(A, T1, Not(Q))],
            Believes(A, T1, P))
        res = prove(problem)
        assert res.verdict == PROVED
        fo_calls = [e for e in res.trace if e[0] == "fo-call"]
        expands = [e for e in res.trace if e[0] == "expand"]
        assert len(fo_calls) == 2 and len(expands) == 1
        rules = [s.rule for s in res.proof.steps]
        assert RULE_IB in rules and RULE_IR in rules

    def test_umbrella_has_io_step(self):
        problem = make_problem(
            [Believes(A, T1, Atom("Raining")),
             Believes(A, T1, Ought(A, T1, Atom("Raining"),
                                   Atom("CarryUmbrella")))],
            Goal(A, T1, Atom("CarryUmbrella")),
            preds={"Raining": 0, "CarryUmbrella": 0}, funcs={})
        res = prove(problem)
        assert res.verdict == PROVED
        assert any(s.rule == RULE_IO for s in res.proof.steps)

    def test_morning_star_fails_shadowed(self):
        eqc = Atom("Equal", (Const("c"), Const("d")))
        eqd = Atom("Equal", (Const("d"), Const("c")))
        pc = Atom("Hot", (Const("c"),))
        pd = Atom("Hot", (Const("d"),))
        problem = make_problem(
            [Believes(A, T1, pc), eqc,
             Implies(eqc, eqd),
             Implies(eqc, Implies(pc, pd)),
             Implies(eqd, Implies(pd, pc))],
            Believes(A, T1, pd),
            preds={"Hot": 1, "Equal": 2}, funcs={"c": 0, "d": 0})
        res = prove(problem)
        assert res.verdict == FAILED
        assert res.trace[-1][0] == "fixpoint"

    def test_naive_predicate_encoding_derives_the_unwanted_conclusion(self):
        # test-only contrast harness: beliefs as a first-order predicate over
        # an encoded proposition term, equality free to substitute into it
        from modalprover.syntax import App

        def bel(t):
            return Atom("Bel", (Const("a"), Const("t1"), t))

        def p_of(x):
            return App("p", (x,))

        gamma = []
        gamma += cnf(bel(p_of(Const("c"))))
        gamma += cnf(Atom("Equal", (Const("c"), Const("d"))))
        gamma += cnf(Forall("?x", Forall("?y", Implies(
            Atom("Equal", (Var("?x"), Var("?y"))),
            Atom("Equal", (p_of(Var("?x")), p_of(Var("?y"))))))))
        gamma += cnf(Forall("?u", Forall("?v", Forall("?z", Forall("?w",
            Implies(Atom("Equal", (Var("?z"), Var("?w"))),
                    Implies(Atom("Bel", (Var("?u"), Var("?v"), Var("?z"))),
                            Atom("Bel", (Var("?u"), Var("?v"), Var("?w"))))))))))
        out = prove_fo(gamma, bel(p_of(Const("d"))))
        assert out.status == "proved"

    def test_fixpoint_is_genuine(self):
        # after a fail verdict, no single schema adds anything
        problem = make_problem(
            [Believes(A, T1, P), Believes(B, T1, Not(P))],
            Believes(A, T1, Q))
        res = prove(problem)
        assert res.verdict == FAILED
        kb = kb_of(Believes(A, T1, P), Believes(B, T1, Not(P)))
        assert apply_IB(kb) == []
        assert apply_IO(kb) == []
        assert expand_contexts(kb, depth=3) == []

    def test_exhaustion_reports_iteration_budget(self):
        from modalprover.syntax import App
        rule = Forall("?x", Implies(Atom("Hot", (Var("?x"),)),
                                    Atom("Hot", (App("f", (Var("?x"),)),))))
        problem = make_problem(
            [Believes(A, T1, rule), Believes(A, T1, Atom("Hot", (Const("c"),)))],
            Believes(A, T1, Q))
        res = prove(problem, ModalLimits(max_outer_iterations=3))
        assert res.verdict == EXHAUSTED
        assert "iterations" in res.reason

    def test_prove_rejects_answer_problems(self):
        problem = make_problem([], Atom("Hot", (Var("?x"),)),
                               query_vars=["?x"])
        with pytest.raises(UsageError):
            prove(problem)

    def test_kb_grows_monotonically_until_fixpoint(self):
        # every expansion round before the fixpoint adds formulae
        problem = make_problem(
            [Believes(A, T1, Or(P, Q)), Believes(A, T1, Not(Q)),
             Believes(A, T1, Ought(A, T1, P, Atom("R")))],
            Goal(A, T2, Atom("NoSuch")),
            preds={"P": 0, "Q": 0, "R": 0, "NoSuch": 0}, funcs={})
        res = prove(problem)
        assert res.verdict == FAILED
        expands = [e for e in res.trace if e[0] == "expand"]
        assert all(e[2] > 0 for e in expands[:-1])
        assert expands[-1][2] == 0
        assert res.kb_size > 3


class TestAnswer:
    def test_pattern_mode_two_witnesses(self):
        duty = Believes(A, T1, Forall("?x", Ought(A, T1,
                                                  Atom("Hot", (Var("?x"),)),
                                                  Atom("Rescue", (Var("?x"),)))))
        problem = make_problem(
            [Believes(A, T1, Atom("Hot", (Const("c"),))),
             Believes(A, T1, Atom("Hot", (Const("d"),))),
             duty],
            Goal(A, T1, Atom("Rescue", (Var("?x"),))),
            query_vars=["?x"],
            preds={"Hot": 1, "Rescue": 1}, funcs={"c": 0, "d": 0})
        res = answer(problem)
        assert res.verdict == "answered"
        got = sorted(v.name for a in res.answers
                     for v in [a.bindings["?x"]])
        assert got == ["c", "d"]

    def test_fo_mode(self):
        problem = make_problem(
            [Atom("Hot", (Const("c"),)), Atom("Hot", (Const("d"),))],
            Atom("Hot", (Var("?x"),)), query_vars=["?x"])
        res = answer(problem)
        assert res.verdict == "answered"
        assert len(res.answers) == 2

    def test_max_answers_limit(self):
        problem = make_problem(
            [Atom("Hot", (Const("c"),)), Atom("Hot", (Const("d"),))],
            Atom("Hot", (Var("?x"),)), query_vars=["?x"])
        res = answer(problem, ModalLimits(max_answers=1))
        assert len(res.answers) == 1

    def test_no_witness_fails(self):
        problem = make_problem([P], Atom("Hot", (Var("?x"),)),
                               query_vars=["?x"])
        res = answer(problem)
        assert res.verdict == FAILED

    def test_mixed_placement_rejected(self):
        goal = Or(Believes(A, T1, Atom("Hot", (Var("?x"),))), P)
        problem = make_problem([], goal, query_vars=["?x"])
        with pytest.raises(UsageError):
            answer(problem)
