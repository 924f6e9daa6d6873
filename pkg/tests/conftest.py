"""Shared fixtures: a fixed test vocabulary, hypothesis strategies for
random formulae, and seeded random-problem generators used by the oracle
comparison suites."""

from __future__ import annotations

import random
from pathlib import Path

import pytest
from hypothesis import strategies as st

from modalprover.parser import Problem, SymbolEnv
from modalprover.syntax import (
    AgentSym, And, App, Atom, Believes, Const, Exists, Forall, Formula, Goal,
    Implies, Not, Or, Ought, TimeSym, Var, canon,
)

CORPUS_DIR = Path(__file__).resolve().parent.parent / "corpus"

AGENTS = (AgentSym("a"), AgentSym("b"))
TIMES = (TimeSym(0, "t0"), TimeSym(1, "t1"), TimeSym(2, "t2"))
PREDS = {"P": 0, "Q": 0, "R": 0, "Hot": 1, "Near": 2}
FUNCS = {"c": 0, "d": 0, "f": 1, "g": 2}


@pytest.fixture
def corpus_dir() -> Path:
    return CORPUS_DIR


def vocab_env(strict: bool = True) -> SymbolEnv:
    return SymbolEnv(
        agents={a.name: a for a in AGENTS},
        times={t.name: t for t in TIMES},
        time_order=list(TIMES),
        preds=dict(PREDS),
        funcs=dict(FUNCS),
        strict=strict,
    )


def make_problem(assumptions: list[Formula], goal: Formula,
                 query_vars: list[str] | None = None,
                 preds: dict[str, int] | None = None,
                 funcs: dict[str, int] | None = None) -> Problem:
    return Problem(
        agents=list(AGENTS),
        times=list(TIMES),
        predicates=dict(preds if preds is not None else PREDS),
        functions=dict(funcs if funcs is not None else FUNCS),
        assumptions=[(f"a{i}", f) for i, f in enumerate(assumptions, start=1)],
        goal=goal,
        query_vars=list(query_vars or []),
    )


# --- hypothesis strategies ----------------------------------------------

_VAR_NAMES = ("?x", "?y", "?z")


def _terms(bound: tuple[str, ...], depth: int):
    leaves = [st.sampled_from([Const("c"), Const("d")])]
    if bound:
        leaves.append(st.sampled_from([Var(v) for v in bound]))
    leaf = st.one_of(*leaves)
    if depth <= 0:
        return leaf

    def extend(children):
        return st.one_of(
            st.builds(lambda t: App("f", (t,)), children),
            st.builds(lambda t, u: App("g", (t, u)), children, children),
        )

    return st.recursive(leaf, extend, max_leaves=4)


def _atoms(bound: tuple[str, ...]):
    t = _terms(bound, 1)
    return st.one_of(
        st.sampled_from([Atom("P"), Atom("Q"), Atom("R")]),
        st.builds(lambda x: Atom("Hot", (x,)), t),
        st.builds(lambda x, y: Atom("Near", (x, y)), t, t),
    )


def formulas(depth: int = 3, bound: tuple[str, ...] = (),
             modal: bool = True) -> st.SearchStrategy[Formula]:
    """Random well-formed formulae over the fixed test vocabulary; every
    variable is bound, so the result is closed."""
    base = _atoms(bound)
    if depth <= 0:
        return base
    sub = formulas(depth - 1, bound, modal)
    options = [
        base,
        st.builds(Not, sub),
        st.builds(Or, sub, sub),
        st.builds(And, sub, sub),
        st.builds(Implies, sub, sub),
    ]
    for v in _VAR_NAMES:
        if v not in bound:
            inner = formulas(depth - 1, bound + (v,), modal)
            options.append(st.builds(lambda b, _v=v: Forall(_v, b), inner))
            options.append(st.builds(lambda b, _v=v: Exists(_v, b), inner))
            break
    if modal:
        closed = formulas(depth - 1, (), modal)
        agent = st.sampled_from(list(AGENTS))
        time = st.sampled_from(list(TIMES))
        options.append(st.builds(Believes, agent, time, closed))
        options.append(st.builds(Goal, agent, time, closed))
        options.append(st.builds(Ought, agent, time, closed, closed))
    return st.one_of(*options)


# --- seeded random generators for the oracle suites ----------------------


def gen_ground_formula(rng: random.Random, atoms: list[str],
                       depth: int) -> Formula:
    if depth <= 0 or rng.random() < 0.35:
        return Atom(rng.choice(atoms))
    kind = rng.random()
    if kind < 0.25:
        return Not(gen_ground_formula(rng, atoms, depth - 1))
    left = gen_ground_formula(rng, atoms, depth - 1)
    right = gen_ground_formula(rng, atoms, depth - 1)
    if kind < 0.55:
        return Or(left, right)
    if kind < 0.8:
        return And(left, right)
    return Implies(left, right)


def gen_ground_problem(rng: random.Random) -> tuple[list[Formula], Formula]:
    atoms = ["A1", "A2", "A3", "A4", "A5"][:rng.randint(2, 5)]
    n = rng.randint(0, 3)
    gamma = [gen_ground_formula(rng, atoms, rng.randint(1, 3))
             for _ in range(n)]
    goal = gen_ground_formula(rng, atoms, rng.randint(1, 3))
    return gamma, goal


# modal generator vocabulary: ground atoms only, so the closure oracle's
# syntactic resolution is exact
_M_ATOMS = [Atom("P"), Atom("Q"), Atom("R"),
            Atom("Hot", (Const("c"),)), Atom("Hot", (Const("d"),))]
_M_DUTIES = [Atom("D1"), Atom("D2")]
_M_PREDS = {"P": 0, "Q": 0, "R": 0, "Hot": 1, "D1": 0, "D2": 0}
_M_FUNCS = {"c": 0, "d": 0}


def _gen_clause_body(rng: random.Random) -> Formula:
    from oracles import literals_to_body
    k = rng.randint(1, 2)
    picked: dict[str, tuple[bool, Atom]] = {}
    while len(picked) < k:
        atom = rng.choice(_M_ATOMS)
        sign = rng.random() < 0.7
        picked.setdefault(canon(atom), (sign, atom))
    atom_map = {canon(a): a for _, a in picked.values()}
    lits = frozenset((sign, canon(a)) for sign, a in picked.values())
    return literals_to_body(lits, atom_map)


def gen_modal_problem(rng: random.Random) -> tuple[Problem, list[Formula], Formula]:
    agents = [AGENTS[0]] if rng.random() < 0.5 else list(AGENTS)
    times = list(TIMES)

    def some_agent() -> AgentSym:
        return rng.choice(agents)

    def some_time() -> TimeSym:
        return rng.choice(times)

    def gen_member() -> Formula:
        roll = rng.random()
        if roll < 0.2:
            return _gen_clause_body(rng)
        if roll < 0.62:
            return Believes(some_agent(), some_time(), _gen_clause_body(rng))
        if roll < 0.8:
            return Believes(some_agent(), some_time(),
                            Believes(some_agent(), some_time(),
                                     _gen_clause_body(rng)))
        agent = some_agent()
        cond = rng.choice(_M_ATOMS)
        duty = rng.choice(_M_DUTIES)
        return Believes(agent, some_time(),
                        Ought(agent, some_time(), cond, duty))

    n = rng.randint(2, 6)
    members = []
    seen = set()
    while len(members) < n:
        f = gen_member()
        if canon(f) in seen:
            continue
        seen.add(canon(f))
        members.append(f)

    roll = rng.random()
    if roll < 0.25:
        goal = _gen_clause_body(rng)
    elif roll < 0.65:
        goal = Believes(some_agent(), some_time(), _gen_clause_body(rng))
    elif roll < 0.82:
        goal = Believes(some_agent(), some_time(),
                        Believes(some_agent(), some_time(),
                                 _gen_clause_body(rng)))
    else:
        goal = Goal(some_agent(), some_time(), rng.choice(_M_DUTIES))

    problem = Problem(
        agents=agents,
        times=times,
        predicates=dict(_M_PREDS),
        functions=dict(_M_FUNCS),
        assumptions=[(f"m{i}", f) for i, f in enumerate(members, start=1)],
        goal=goal,
        query_vars=[],
    )
    return problem, members, goal
