"""Refutation proving by saturation.

Otter-style given-clause loop: clauses wait in a passive queue ordered by
(symbol weight, age); the lightest is selected, checked against the active
set for forward subsumption, factored, and resolved against every active
clause.  Activation back-subsumes older clauses out of the search but
never out of the archive, so proof reconstruction always succeeds.

``saturated`` is only reported when the search space was genuinely
exhausted: if any clause was discarded for exceeding the literal cap, a
later empty queue counts as resource exhaustion instead.
"""

from __future__ import annotations

import heapq
import time
from dataclasses import dataclass
from typing import Iterable

from .clauses import (
    ANS_PRED, Clause, FactorOrigin, GoalOrigin, Literal, Origin,
    ResolveOrigin, standardize_apart,
)
from .cnf import SkolemNamer, cnf
from .syntax import Atom, Formula, Not, Var, canon
from .unification import Substitution, match_atoms, unify

PROVED = "proved"
SATURATED = "saturated"
EXHAUSTED = "exhausted"


@dataclass
class FoLimits:
    max_clauses: int = 100_000
    timeout_ms: int = 10_000
    max_literals: int = 64
    max_answers: int = 10

    def validate(self) -> None:
        for name in ("max_clauses", "timeout_ms", "max_literals", "max_answers"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


@dataclass
class FoAnswer:
    bindings: Substitution
    clause_id: int


@dataclass
class FoOutcome:
    status: str
    refutation: int | None
    answers: list[FoAnswer]
    generated: int
    reason: str | None
    store: "ClauseStore"

    @property
    def proved(self) -> bool:
        return self.status == PROVED


class ClauseStore:
    """Archive of every clause ever created, addressed by id."""

    def __init__(self) -> None:
        self._records: list[Clause] = []

    def new(self, literals, origin: Origin | None) -> Clause:
        cl = Clause.make(literals, id=len(self._records), origin=origin)
        self._records.append(cl)
        return cl

    def get(self, cid: int) -> Clause:
        return self._records[cid]

    def __len__(self) -> int:
        return len(self._records)

    def derivation(self, target: int) -> list[Clause]:
        """Ancestors of ``target`` (inclusive) in id order."""
        seen: set[int] = set()
        stack = [target]
        while stack:
            cid = stack.pop()
            if cid in seen:
                continue
            seen.add(cid)
            origin = self._records[cid].origin
            if isinstance(origin, ResolveOrigin):
                stack.extend((origin.left, origin.right))
            elif isinstance(origin, FactorOrigin):
                stack.append(origin.parent)
        return [self._records[cid] for cid in sorted(seen)]


# --- inference rules -----------------------------------------------------

def _resolvable(lit: Literal) -> bool:
    return not lit.is_answer()


def binary_resolvents(c1: Clause, c2: Clause) -> list[tuple[list[Literal], Substitution]]:
    """All binary resolvents of two clauses (both polarities), after
    standardizing c2 apart from c1."""
    c2r = standardize_apart(c2, c1.variables())
    out: list[tuple[list[Literal], Substitution]] = []
    for lit1 in c1.literals:
        if not _resolvable(lit1):
            continue
        for lit2 in c2r.literals:
            if lit2.positive == lit1.positive or not _resolvable(lit2):
                continue
            sigma = unify(lit1.atom, lit2.atom)
            if sigma is None:
                continue
            rest = [Literal(l.positive, sigma.apply_atom(l.atom))
                    for l in c1.literals if l != lit1]
            rest += [Literal(l.positive, sigma.apply_atom(l.atom))
                     for l in c2r.literals if l != lit2]
            out.append((rest, sigma))
    return out


def factors(c: Clause) -> list[tuple[list[Literal], Substitution]]:
    out: list[tuple[list[Literal], Substitution]] = []
    lits = c.literals
    for i in range(len(lits)):
        if not _resolvable(lits[i]):
            continue
        for j in range(i + 1, len(lits)):
            if lits[j].positive != lits[i].positive or not _resolvable(lits[j]):
                continue
            sigma = unify(lits[i].atom, lits[j].atom)
            if sigma is None or sigma.is_empty():
                continue
            out.append(([Literal(l.positive, sigma.apply_atom(l.atom))
                         for l in lits], sigma))
    return out


def resolve(c1: Clause, c2: Clause) -> list[Clause]:
    """Public rule surface: every binary resolvent of the pair plus the
    factors of each input, as fresh unstored clauses."""
    out = [Clause.make(lits) for lits, _ in binary_resolvents(c1, c2)]
    out += [Clause.make(lits) for lits, _ in factors(c1)]
    out += [Clause.make(lits) for lits, _ in factors(c2)]
    seen: set[Clause] = set()
    unique = []
    for cl in out:
        if cl.is_tautology() or cl in seen:
            continue
        seen.add(cl)
        unique.append(cl)
    return unique


def subsumes(c: Clause, d: Clause) -> bool:
    """theta-subsumption: some substitution maps c's literals into d."""
    if len(c.literals) > len(d.literals):
        return False
    return _subsume_search(list(c.literals), d, Substitution({}))


def _subsume_search(lits: list[Literal], d: Clause, sigma: Substitution) -> bool:
    if not lits:
        return True
    head, rest = lits[0], lits[1:]
    for cand in d.literals:
        if cand.positive != head.positive:
            continue
        nxt = match_atoms(head.atom, cand.atom, sigma)
        if nxt is None:
            continue
        if _subsume_search(rest, d, nxt):
            return True
    return False


# --- the loop ------------------------------------------------------------

class _Done(Exception):
    pass


class _Saturation:
    def __init__(self, limits: FoLimits, answer_mode: bool,
                 query_vars: list[str]):
        limits.validate()
        self.limits = limits
        self.answer_mode = answer_mode
        self.query_vars = query_vars
        self.store = ClauseStore()
        self.passive: list[tuple[int, int]] = []
        self.active: list[Clause] = []
        self.generated = 0
        self.clipped = False
        self.refutation: int | None = None
        self.answers: list[FoAnswer] = []
        self._answer_keys: set[str] = set()
        self.reason: str | None = None
        self.deadline = time.monotonic() + limits.timeout_ms / 1000.0

    def admit(self, literals, origin: Origin | None, counted: bool) -> None:
        if counted:
            self.generated += 1
            if self.generated > self.limits.max_clauses:
                self.reason = f"clause budget ({self.limits.max_clauses}) exceeded"
                raise _Done
        cl = Clause.make(literals, origin=origin)
        if len(cl.literals) > self.limits.max_literals:
            self.clipped = True
            return
        cl = self.store.new(cl.literals, origin)
        if cl.is_tautology():
            return
        if cl.is_empty():
            self.refutation = cl.id
            raise _Done
        if self.answer_mode and cl.is_answer_only():
            self._record_answer(cl)
            return
        heapq.heappush(self.passive, (cl.weight(), cl.id))

    def _record_answer(self, cl: Clause) -> None:
        bindings: dict[str, "object"] = {}
        for lit in cl.literals:
            atom = lit.atom
            assert isinstance(atom, Atom) and atom.pred == ANS_PRED
            for var, term in zip(self.query_vars, atom.args):
                bindings.setdefault(var, term)
        sub = Substitution({v: t for v, t in bindings.items()
                            if not (isinstance(t, Var) and t.name == v)})
        key = sub.render()
        if key in self._answer_keys:
            return
        self._answer_keys.add(key)
        self.answers.append(FoAnswer(sub, cl.id))
        if len(self.answers) >= self.limits.max_answers:
            raise _Done

    def run(self, inputs: Iterable[Clause]) -> FoOutcome:
        try:
            for cl in inputs:
                self.admit(cl.literals, cl.origin, counted=False)
            self._loop()
        except _Done:
            pass
        if self.refutation is not None:
            status = PROVED
        elif self.answer_mode and self.answers:
            status = PROVED
        elif self.reason is not None or self.clipped:
            status = EXHAUSTED
            if self.reason is None:
                self.reason = (f"clauses over {self.limits.max_literals} "
                               "literals were discarded")
        else:
            status = SATURATED
        return FoOutcome(status, self.refutation, self.answers,
                         self.generated, self.reason, self.store)

    def _loop(self) -> None:
        while self.passive:
            if time.monotonic() > self.deadline:
                self.reason = f"timeout ({self.limits.timeout_ms} ms)"
                raise _Done
            _, cid = heapq.heappop(self.passive)
            given = self.store.get(cid)
            if any(subsumes(a, given) for a in self.active):
                continue
            for lits, sigma in factors(given):
                self.admit(lits, FactorOrigin(given.id, sigma), counted=True)
            for other in self.active:
                for lits, sigma in binary_resolvents(given, other):
                    self.admit(lits, ResolveOrigin(given.id, other.id, sigma),
                               counted=True)
            self.active = [a for a in self.active if not subsumes(given, a)]
            self.active.append(given)


def prove_fo(gamma: Iterable[Clause], goal: Formula | None,
             limits: FoLimits | None = None,
             namer: SkolemNamer | None = None) -> FoOutcome:
    """Refutation proof of goal from the clause set, or ``saturated`` when
    no resolution derivation exists, or ``exhausted`` at a resource limit."""
    limits = limits or FoLimits()
    clauses = list(gamma)
    if goal is not None:
        negated = Not(goal)
        key = "(negated-goal " + canon(goal) + ")"
        clauses += cnf(negated, namer or SkolemNamer(), source_key=key,
                       origin=GoalOrigin("negated goal"))
    sat = _Saturation(limits, answer_mode=False, query_vars=[])
    return sat.run(clauses)


def prove_answer(gamma: Iterable[Clause], goal: Formula,
                 query_vars: list[str],
                 limits: FoLimits | None = None,
                 namer: SkolemNamer | None = None) -> FoOutcome:
    """Answer extraction: negated-goal clauses carry an answer literal whose
    arguments track the query variables; each answer-only clause derived by
    the saturation yields one witness binding."""
    limits = limits or FoLimits()
    clauses = list(gamma)
    negated = Not(goal)
    key = "(negated-goal " + canon(goal) + ")"
    ans = Literal(True, Atom(ANS_PRED, tuple(Var(v) for v in query_vars)))
    for cl in cnf(negated, namer or SkolemNamer(), source_key=key,
                  origin=GoalOrigin("negated goal")):
        clauses.append(Clause.make(list(cl.literals) + [ans],
                                   origin=cl.origin))
    sat = _Saturation(limits, answer_mode=True, query_vars=query_vars)
    return sat.run(clauses)
