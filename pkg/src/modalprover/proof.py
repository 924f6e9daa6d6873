"""Proof objects: a DAG of inference steps with text and JSON rendering.

Steps are numbered so that every parent precedes its child.  Conclusions
are either formulae (input, modal schema, promote, shadow, unshadow steps)
or clauses (cnf, I_R, factor steps).  JSON output is byte-deterministic:
wall time is reported as null and substitution keys are sorted.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .clauses import Clause, Literal
from .errors import ParseError
from .parser import Problem, SList, SSym, parse_term, read_nodes
from .parser import _parse_formula  # lenient formula reading for proofs
from .syntax import Atom, Formula, ShadowAtom, render
from .unification import Substitution

RULE_INPUT = "input"
RULE_IR = "I_R"
RULE_IB = "I_B"
RULE_IO = "I_O"
RULE_PROMOTE = "promote"
RULE_SHADOW = "shadow"
RULE_UNSHADOW = "unshadow"
RULE_FACTOR = "factor"
RULE_CNF = "cnf"

RULES = {RULE_INPUT, RULE_IR, RULE_IB, RULE_IO, RULE_PROMOTE, RULE_SHADOW,
         RULE_UNSHADOW, RULE_FACTOR, RULE_CNF}

# parent counts fixed by rule; None = no constraint beyond >= 1
RULE_ARITY = {
    RULE_INPUT: 0,
    RULE_IR: 2,
    RULE_IB: 2,
    RULE_IO: 2,
    RULE_PROMOTE: 1,
    RULE_SHADOW: 1,
    RULE_UNSHADOW: 1,
    RULE_FACTOR: 1,
    RULE_CNF: 1,
}


@dataclass(frozen=True)
class ProofStep:
    id: int
    rule: str
    conclusion: Formula | Clause
    parents: tuple[int, ...] = ()
    substitution: Substitution | None = None
    note: str | None = None


@dataclass(frozen=True)
class ProofStats:
    iterations: int
    clauses_generated: int
    wall_time_ms: float | None = field(default=None, compare=False)


@dataclass(frozen=True)
class Proof:
    steps: tuple[ProofStep, ...]
    goal_step: int
    stats: ProofStats

    def step(self, sid: int) -> ProofStep:
        return self.steps[sid - 1]


def _conclusion_text(c: Formula | Clause) -> str:
    return c.render() if isinstance(c, Clause) else render(c)


def render_text(proof: Proof) -> str:
    """Numbered listing; shadow atoms print expanded as #shadowN{...}."""
    lines = []
    for s in proof.steps:
        if s.rule == RULE_INPUT:
            bracket = f"input: {s.note}" if s.note else "input"
        else:
            bracket = s.rule
            if s.parents:
                bracket += ": " + ", ".join(str(p) for p in s.parents)
            if s.substitution is not None:
                bracket += f" | subst: {s.substitution.render()}"
            if s.note:
                bracket += f" | {s.note}"
        lines.append(f"{s.id:4d}. {_conclusion_text(s.conclusion)}  [{bracket}]")
    lines.append(f"goal established at step {proof.goal_step}")
    return "\n".join(lines)


def render_json(proof: Proof) -> str:
    steps = []
    for s in proof.steps:
        subst = None
        if s.substitution is not None:
            from .syntax import render_term
            subst = {k: render_term(v)
                     for k, v in sorted(s.substitution.bindings.items())}
        steps.append({
            "id": s.id,
            "rule": s.rule,
            "conclusion": _conclusion_text(s.conclusion),
            "parents": list(s.parents),
            "subst": subst,
            "note": s.note,
        })
    doc = {
        "steps": steps,
        "goal": proof.goal_step,
        "stats": {
            "iterations": proof.stats.iterations,
            "clauses_generated": proof.stats.clauses_generated,
            "wall_time_ms": None,
        },
    }
    return json.dumps(doc, indent=2)


def _parse_conclusion(text: str, problem: Problem) -> Formula | Clause:
    env = problem.env(strict=False)
    nodes = read_nodes(text)
    if len(nodes) != 1:
        raise ParseError("expected one conclusion expression", 1, 1)
    node = nodes[0]
    if isinstance(node, SList) and node.items \
            and isinstance(node.items[0], SSym) \
            and node.items[0].text == "clause":
        lits = []
        for item in node.items[1:]:
            negative = (isinstance(item, SList) and len(item.items) == 2
                        and isinstance(item.items[0], SSym)
                        and item.items[0].text == "not")
            inner = item.items[1] if negative else item
            f = _parse_formula(inner, env, set())
            if not isinstance(f, (Atom, ShadowAtom)):
                raise ParseError("clause literals must be atoms",
                                 item.line, item.col)
            lits.append(Literal(not negative, f))
        return Clause.make(lits)
    return _parse_formula(node, env, set())


def parse_proof_json(text: str, problem: Problem) -> Proof:
    doc = json.loads(text)
    steps = []
    for raw in doc["steps"]:
        subst = None
        if raw.get("subst") is not None:
            subst = Substitution({
                k: parse_term(v, problem, lenient=True)
                for k, v in raw["subst"].items()
            })
        steps.append(ProofStep(
            id=raw["id"],
            rule=raw["rule"],
            conclusion=_parse_conclusion(raw["conclusion"], problem),
            parents=tuple(raw.get("parents", ())),
            substitution=subst,
            note=raw.get("note"),
        ))
    stats_raw = doc.get("stats", {})
    stats = ProofStats(
        iterations=stats_raw.get("iterations", 0),
        clauses_generated=stats_raw.get("clauses_generated", 0),
        wall_time_ms=stats_raw.get("wall_time_ms"),
    )
    return Proof(steps=tuple(steps), goal_step=doc["goal"], stats=stats)
