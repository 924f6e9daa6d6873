"""The alternating proof loop over the modal knowledge base.

Each iteration shadows the knowledge base and the goal down to the
first-order level (one shared atom table per run) and hands the result to
the saturation prover.  On failure the base is expanded one breadth-first
round: obligation-to-goal derivation, belief resolution (conclusion at the
least admissible time, max of the premise times), goal-directed promotion,
and recursive expansion inside every belief context.  When a round adds
nothing the input cannot be expanded further and the run fails; resource
exhaustion is reported separately so "failed" always means the schemata
were genuinely saturated.

Expansion inside a context reuses the same round procedure on the believed
bodies, so a nested derivation surfaces as an I_B/I_O/promote step whose
premises are the enclosing beliefs; the proof checker validates these
recursively.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from .clauses import Clause, GoalOrigin, InputOrigin, FactorOrigin, ResolveOrigin
from .cnf import SkolemNamer, cnf
from .errors import FreeVariableError, TimeError, UsageError
from .matching import formula_unify
from .parser import Problem
from .proof import (
    Proof, ProofStats, ProofStep, RULE_CNF, RULE_FACTOR, RULE_IB, RULE_INPUT,
    RULE_IO, RULE_IR, RULE_PROMOTE, RULE_SHADOW, RULE_UNSHADOW,
)
from .saturation import (
    EXHAUSTED as FO_EXHAUSTED, FoLimits, FoOutcome, binary_resolvents,
    prove_answer, prove_fo,
)
from .shadowing import AtomTable, shadow
from .syntax import (
    MODAL_NODES, AgentSym, Believes, Formula, Goal, Not, Ought,
    ShadowAtom, Term, TimeSym, Var, alpha_equal, believes_subformulas, canon,
    desugar, disjunction_of, forall_close, Forall, free_vars, level,
    subformulas, subst_formula,
)
from .unification import Substitution

PROVED = "proved"
FAILED = "failed"
EXHAUSTED = "exhausted"
ANSWERED = "answered"


@dataclass
class ModalLimits:
    max_outer_iterations: int = 25
    max_nesting_depth: int = 3
    fo: FoLimits = field(default_factory=FoLimits)
    max_answers: int = 10

    def validate(self) -> None:
        if self.max_outer_iterations <= 0 or self.max_answers <= 0:
            raise ValueError("limits must be positive")
        if self.max_nesting_depth < 0:
            raise ValueError("max_nesting_depth must be >= 0")
        self.fo.validate()


@dataclass
class KBEntry:
    formula: Formula
    key: str
    step: int


class KnowledgeBase:
    """Insertion-ordered formula set with alpha-equivalence semantics.

    Adding a formula already present (up to bound-variable renaming)
    leaves the base unchanged; ``generation`` counts successful adds so
    monotone growth is observable.
    """

    def __init__(self) -> None:
        self.entries: list[KBEntry] = []
        self._index: dict[str, KBEntry] = {}
        self._agent_order: list[str] = []
        self._agents: dict[str, AgentSym] = {}
        self.generation = 0

    def add(self, f: Formula, step: int) -> KBEntry | None:
        key = canon(f)
        if key in self._index:
            return None
        entry = KBEntry(f, key, step)
        self.entries.append(entry)
        self._index[key] = entry
        self.generation += 1
        if isinstance(f, Believes) and f.agent.name not in self._agents:
            self._agents[f.agent.name] = f.agent
            self._agent_order.append(f.agent.name)
        return entry

    def contains(self, key: str) -> bool:
        return key in self._index

    def __len__(self) -> int:
        return len(self.entries)

    def agent_names(self) -> list[str]:
        return list(self._agent_order)

    def agent(self, name: str) -> AgentSym:
        return self._agents[name]

    def beliefs(self, agent_name: str | None = None) -> list[KBEntry]:
        return [e for e in self.entries
                if isinstance(e.formula, Believes)
                and (agent_name is None or e.formula.agent.name == agent_name)]

    def contexts(self, agent_name: str, bound: TimeSym) -> list[Formula]:
        """Bodies believed by the agent at or before ``bound``."""
        return [e.formula.body for e in self.beliefs(agent_name)
                if e.formula.time <= bound]

    def has_belief_at_or_before(self, b: Believes) -> bool:
        for e in self.beliefs(b.agent.name):
            if e.formula.time <= b.time and alpha_equal(e.formula.body, b.body):
                return True
        return False


@dataclass
class Derivation:
    formula: Formula
    rule: str
    parents: tuple[int, ...]
    subst: Substitution | None = None
    note: str | None = None


class StepLog:
    def __init__(self) -> None:
        self.steps: list[ProofStep] = []

    def add(self, rule: str, conclusion, parents: tuple[int, ...] = (),
            subst: Substitution | None = None, note: str | None = None) -> int:
        sid = len(self.steps) + 1
        self.steps.append(ProofStep(sid, rule, conclusion, parents, subst, note))
        return sid

    def step(self, sid: int) -> ProofStep:
        return self.steps[sid - 1]


# --- schema applications -------------------------------------------------

def promote_belief(b: Believes, t: TimeSym) -> Believes:
    """Beliefs propagate forward in time; never backward."""
    if t < b.time:
        raise TimeError(f"cannot promote a belief from {b.time} back to {t}")
    return Believes(b.agent, t, b.body)


def _strip_foralls(f: Formula) -> tuple[Formula, list[str]]:
    out = []
    while isinstance(f, Forall):
        out.append(f.var)
        f = f.body
    return f, out


def _clause_to_formula(cl: Clause) -> Formula:
    parts: list[Formula] = []
    for lit in cl.literals:
        atom: Formula = lit.atom
        if isinstance(atom, ShadowAtom):
            atom = atom.body
        parts.append(atom if lit.positive else Not(atom))
    return forall_close(disjunction_of(parts))


def _body_resolvents(b1: Formula, b2: Formula,
                     namer: SkolemNamer) -> list[tuple[Formula, Substitution]]:
    """Resolvents of two believed bodies, clausified within the context.
    Inner modal material is shadowed first, so the resolvent may carry a
    nested modal formula back out through its shadow atom."""
    table = AtomTable()
    cls1 = cnf(shadow(b1, 1, table), namer, source_key=canon(b1))
    cls2 = cnf(shadow(b2, 1, table), namer, source_key=canon(b2))
    out: list[tuple[Formula, Substitution]] = []
    seen: set[str] = set()
    for c1 in cls1:
        for c2 in cls2:
            for lits, sigma in binary_resolvents(c1, c2):
                res = Clause.make(lits)
                if res.is_tautology() or res.is_empty():
                    continue
                f = _clause_to_formula(res)
                key = canon(f)
                if key in seen:
                    continue
                seen.add(key)
                out.append((f, sigma))
    return out


def _ib_derivations(kb: KnowledgeBase, namer: SkolemNamer) -> list[Derivation]:
    out: list[Derivation] = []
    for agent_name in kb.agent_names():
        bel = kb.beliefs(agent_name)
        for i in range(len(bel)):
            for j in range(i, len(bel)):
                e1, e2 = bel[i], bel[j]
                t = max(e1.formula.time, e2.formula.time)
                try:
                    pairs = _body_resolvents(e1.formula.body,
                                             e2.formula.body, namer)
                except FreeVariableError:
                    # a quantifier reaching into a modal operator (e.g. a
                    # schematic obligation) has no clausal form; such bodies
                    # take part in I_O matching only
                    continue
                for body, sigma in pairs:
                    out.append(Derivation(
                        Believes(kb.agent(agent_name), t, body),
                        RULE_IB, (e1.step, e2.step), sigma))
    return out


def _io_derivations(kb: KnowledgeBase) -> list[Derivation]:
    out: list[Derivation] = []
    for agent_name in kb.agent_names():
        bel = kb.beliefs(agent_name)
        for e2 in bel:
            core2, _ = _strip_foralls(e2.formula.body)
            if not isinstance(core2, Ought):
                continue
            if core2.agent.name != agent_name:
                continue
            ren2 = {v: Var(f"?o{i}")
                    for i, v in enumerate(sorted(free_vars(core2)))}
            cond = subst_formula(core2.condition, ren2)
            duty = subst_formula(core2.duty, ren2)
            for e1 in bel:
                core1, _ = _strip_foralls(e1.formula.body)
                ren1 = {v: Var(f"?c{i}")
                        for i, v in enumerate(sorted(free_vars(core1)))}
                body1 = subst_formula(core1, ren1)
                theta = formula_unify(cond, body1)
                if theta is None:
                    continue
                inst = forall_close(subst_formula(duty, theta.bindings))
                t = max(e1.formula.time, e2.formula.time)
                out.append(Derivation(
                    Goal(core2.agent, t, inst), RULE_IO,
                    (e1.step, e2.step), theta,
                    "goal time = max of premise belief times"))
    return out


def _promote_derivations(kb: KnowledgeBase,
                         targets: list[Formula]) -> list[Derivation]:
    """Goal-directed promotion: materialize later-time copies of beliefs
    that some target formula needs.  A belief target promotes its exact
    body; a goal target promotes every belief of its agent up to the
    goal's time, because a goal never propagates on its own and can only
    land at the max of its premise times."""
    out: list[Derivation] = []
    seen_needs: set[str] = set()
    for tf in targets:
        for need in believes_subformulas(tf):
            nk = canon(need)
            if nk in seen_needs:
                continue
            seen_needs.add(nk)
            for e in kb.beliefs(need.agent.name):
                if e.formula.time < need.time \
                        and alpha_equal(e.formula.body, need.body):
                    out.append(Derivation(
                        promote_belief(e.formula, need.time),
                        RULE_PROMOTE, (e.step,), None,
                        "forward time propagation"))
        for need in subformulas(tf):
            if not isinstance(need, Goal):
                continue
            nk = canon(need)
            if nk in seen_needs:
                continue
            seen_needs.add(nk)
            for e in kb.beliefs(need.agent.name):
                if e.formula.time < need.time:
                    out.append(Derivation(
                        promote_belief(e.formula, need.time),
                        RULE_PROMOTE, (e.step,), None,
                        "forward time propagation"))
    return out


def _context_derivations(kb: KnowledgeBase, targets: list[Formula],
                         depth: int, limits: ModalLimits, namer: SkolemNamer,
                         diag: list[str]) -> list[Derivation]:
    out: list[Derivation] = []
    for agent_name in kb.agent_names():
        bel = kb.beliefs(agent_name)
        if not bel:
            continue
        if depth <= 0:
            if any(level(e.formula.body) == 2 for e in bel):
                diag.append(f"nesting limit: context of {agent_name} skipped")
            continue
        # one inner entry per distinct body, kept at its earliest time
        chosen: dict[str, tuple[Formula, TimeSym, int]] = {}
        for e in bel:
            k = canon(e.formula.body)
            prev = chosen.get(k)
            if prev is None or e.formula.time < prev[1]:
                chosen[k] = (e.formula.body, e.formula.time, e.step)
        inner_kb = KnowledgeBase()
        meta: list[tuple[int, TimeSym]] = []
        for body, t, outer_step in chosen.values():
            meta.append((outer_step, t))
            inner_kb.add(body, len(meta) - 1)
        inner_targets = [b.body for tf in targets
                         for b in believes_subformulas(tf)
                         if b.agent.name == agent_name]
        inner = _round_derivations(inner_kb, inner_targets, depth - 1,
                                   limits, namer, diag)
        agent = kb.agent(agent_name)
        for d in inner[:limits.fo.max_clauses]:
            parent_meta = [meta[p] for p in d.parents]
            t_out = max(m[1] for m in parent_meta)
            note = f"within beliefs of {agent_name}"
            if d.note:
                note += f"; {d.note}"
            out.append(Derivation(
                Believes(agent, t_out, d.formula), d.rule,
                tuple(m[0] for m in parent_meta), d.subst, note))
    return out


def _round_derivations(kb: KnowledgeBase, targets: list[Formula], depth: int,
                       limits: ModalLimits, namer: SkolemNamer,
                       diag: list[str]) -> list[Derivation]:
    """One breadth-first round of every applicable schema, filtered down to
    formulae genuinely new to the base."""
    ders: list[Derivation] = []
    ders += _io_derivations(kb)
    ders += _ib_derivations(kb, namer)
    ders += _promote_derivations(kb, targets)
    ders += _context_derivations(kb, targets, depth, limits, namer, diag)
    seen: set[str] = set()
    out: list[Derivation] = []
    for d in ders:
        k = canon(d.formula)
        if k in seen or kb.contains(k):
            continue
        # a belief already held at an earlier time is reachable by promote;
        # only explicit promotions materialize later copies
        if d.rule != RULE_PROMOTE and isinstance(d.formula, Believes) \
                and kb.has_belief_at_or_before(d.formula):
            continue
        seen.add(k)
        out.append(d)
        if len(out) >= limits.fo.max_clauses:
            break
    return out


# --- public one-shot schema surfaces ------------------------------------

def apply_IB(kb: KnowledgeBase, namer: SkolemNamer | None = None) -> list[Formula]:
    ders = _ib_derivations(kb, namer or SkolemNamer())
    return _novel(kb, ders)


def apply_IO(kb: KnowledgeBase) -> list[Formula]:
    return _novel(kb, _io_derivations(kb))


def expand_contexts(kb: KnowledgeBase, depth: int,
                    limits: ModalLimits | None = None,
                    namer: SkolemNamer | None = None,
                    diag: list[str] | None = None) -> list[Formula]:
    limits = limits or ModalLimits()
    ders = _context_derivations(kb, [], depth, limits,
                                namer or SkolemNamer(),
                                diag if diag is not None else [])
    return _novel(kb, ders)


def _novel(kb: KnowledgeBase, ders: list[Derivation]) -> list[Formula]:
    seen: set[str] = set()
    out = []
    for d in ders:
        k = canon(d.formula)
        if k in seen or kb.contains(k):
            continue
        if d.rule != RULE_PROMOTE and isinstance(d.formula, Believes) \
                and kb.has_belief_at_or_before(d.formula):
            continue
        seen.add(k)
        out.append(d.formula)
    return out


# --- results -------------------------------------------------------------

@dataclass
class ProveResult:
    verdict: str
    proof: Proof | None
    reason: str | None
    iterations: int
    kb_size: int
    trace: list[tuple]
    diagnostics: list[str]


@dataclass
class AnswerEntry:
    bindings: dict[str, Term]
    proof: Proof


@dataclass
class AnswerResult:
    verdict: str
    answers: list[AnswerEntry]
    reason: str | None
    iterations: int
    kb_size: int
    trace: list[tuple]
    diagnostics: list[str]


# --- the run -------------------------------------------------------------

class _Run:
    def __init__(self, problem: Problem, limits: ModalLimits):
        limits.validate()
        self.problem = problem
        self.limits = limits
        self.log = StepLog()
        self.kb = KnowledgeBase()
        self.atoms = AtomTable()
        reserved = (set(problem.predicates) | set(problem.functions)
                    | {a.name for a in problem.agents}
                    | {t.name for t in problem.times})
        self.namer = SkolemNamer(reserved)
        self.cnf_cache: dict[str, list[Clause]] = {}
        self.trace: list[tuple] = []
        self.diag: list[str] = []
        self.generated = 0
        self.t0 = time.perf_counter()
        self._labelmap_cache: tuple = ([], {})

        for name, f in problem.assumptions:
            fn = desugar(f)
            self.kb.add(fn, self.log.add(RULE_INPUT, fn, (),
                                         note=f"assumption {name}"))
        self.goal = desugar(problem.goal)

    # -- first-order interface --

    def fo_inputs(self) -> tuple[list[Clause], dict[str, tuple[KBEntry, Formula, int]]]:
        inputs: list[Clause] = []
        labels: dict[str, tuple[KBEntry, Formula, int]] = {}
        for entry in self.kb.entries:
            sh = shadow(entry.formula, 1, self.atoms)
            assert level(sh) <= 1, "modal node leaked past shadowing"
            cached = self.cnf_cache.get(entry.key)
            if cached is None:
                cached = cnf(sh, self.namer, source_key=entry.key)
                self.cnf_cache[entry.key] = cached
            for idx, cl in enumerate(cached):
                label = f"kb{entry.step}c{idx}"
                labels[label] = (entry, sh, idx)
                inputs.append(Clause.make(cl.literals,
                                          origin=InputOrigin(label)))
        return inputs, labels

    def stats(self, iterations: int) -> ProofStats:
        ms = (time.perf_counter() - self.t0) * 1000.0
        return ProofStats(iterations, self.generated, ms)

    # -- proof assembly --

    def _log_closure(self, roots: list[int]) -> list[int]:
        seen: set[int] = set()
        stack = list(roots)
        while stack:
            sid = stack.pop()
            if sid in seen:
                continue
            seen.add(sid)
            stack.extend(self.log.step(sid).parents)
        return sorted(seen)

    def formula_proof(self, goal_sid: int, iterations: int) -> Proof:
        order = self._log_closure([goal_sid])
        remap = {old: new for new, old in enumerate(order, start=1)}
        steps = []
        for old in order:
            s = self.log.step(old)
            steps.append(ProofStep(remap[old], s.rule, s.conclusion,
                                   tuple(remap[p] for p in s.parents),
                                   s.substitution, s.note))
        return Proof(tuple(steps), remap[goal_sid], self.stats(iterations))

    def splice(self, outcome: FoOutcome, target_cid: int,
               goal_shadowed: Formula, goal_conclusion: Formula,
               iterations: int) -> Proof:
        records = outcome.store.derivation(target_cid)
        used_entries: list[KBEntry] = []
        seen_entry_steps: set[int] = set()
        _, labelmap = self._labelmap_cache
        for rec in records:
            if isinstance(rec.origin, InputOrigin):
                entry = labelmap[rec.origin.label][0]
                if entry.step not in seen_entry_steps:
                    seen_entry_steps.add(entry.step)
                    used_entries.append(entry)
        used_entries.sort(key=lambda e: e.step)

        steps: list[ProofStep] = []

        def emit(rule, conclusion, parents=(), subst=None, note=None) -> int:
            sid = len(steps) + 1
            steps.append(ProofStep(sid, rule, conclusion, tuple(parents),
                                   subst, note))
            return sid

        # modal/formula layer
        order = self._log_closure([e.step for e in used_entries])
        remap: dict[int, int] = {}
        for old in order:
            s = self.log.step(old)
            remap[old] = emit(s.rule, s.conclusion,
                              [remap[p] for p in s.parents],
                              s.substitution, s.note)

        # per-entry shadow steps
        shadow_step: dict[int, int] = {}
        for entry in used_entries:
            sh = shadow(entry.formula, 1, self.atoms)
            if canon(sh) != entry.key:
                shadow_step[entry.step] = emit(
                    RULE_SHADOW, sh, [remap[entry.step]],
                    note="modal subformulae replaced by shadow atoms")
            else:
                shadow_step[entry.step] = remap[entry.step]

        # negated goal
        negated = Not(self.goal)
        neg_sid = emit(RULE_INPUT, negated, (), note="negated goal")
        neg_sh = Not(goal_shadowed)
        if canon(neg_sh) != canon(negated):
            neg_sid = emit(RULE_SHADOW, neg_sh, [neg_sid],
                           note="modal subformulae replaced by shadow atoms")

        # clause layer
        cid_step: dict[int, int] = {}
        for rec in records:
            if isinstance(rec.origin, InputOrigin):
                entry = labelmap[rec.origin.label][0]
                cid_step[rec.id] = emit(RULE_CNF, rec,
                                        [shadow_step[entry.step]])
            elif isinstance(rec.origin, GoalOrigin):
                cid_step[rec.id] = emit(RULE_CNF, rec, [neg_sid])
            elif isinstance(rec.origin, ResolveOrigin):
                cid_step[rec.id] = emit(
                    RULE_IR, rec,
                    [cid_step[rec.origin.left], cid_step[rec.origin.right]],
                    rec.origin.subst)
            elif isinstance(rec.origin, FactorOrigin):
                cid_step[rec.id] = emit(RULE_FACTOR, rec,
                                        [cid_step[rec.origin.parent]],
                                        rec.origin.subst)

        goal_sid = emit(RULE_UNSHADOW, goal_conclusion, [cid_step[target_cid]],
                        note="refutation of the negated goal discharges it")
        return Proof(tuple(steps), goal_sid, self.stats(iterations))


def prove(problem: Problem, limits: ModalLimits | None = None) -> ProveResult:
    """Run the alternating loop: shadow, call the first-order prover,
    expand by the modal schemata, stop at proof or fixpoint."""
    if problem.query_vars:
        raise UsageError("problem declares answer variables; use answer()")
    limits = limits or ModalLimits()
    run = _Run(problem, limits)

    last_fo: FoOutcome | None = None
    for it in range(1, limits.max_outer_iterations + 1):
        inputs, labelmap = run.fo_inputs()
        run._labelmap_cache = (inputs, labelmap)
        goal_sh = shadow(run.goal, 1, run.atoms)
        run.trace.append(("fo-call", it, len(run.kb)))
        out = prove_fo(inputs, goal_sh, limits.fo, run.namer)
        run.generated += out.generated
        last_fo = out
        if out.proved:
            run.trace.append(("proved", it))
            proof = run.splice(out, out.refutation, goal_sh, run.goal, it)
            return ProveResult(PROVED, proof, None, it, len(run.kb),
                               run.trace, run.diag)

        # goal-directed shortcut: a belief goal reachable by promotion alone
        if isinstance(run.goal, Believes):
            hit = None
            for e in run.kb.beliefs(run.goal.agent.name):
                if e.formula.time < run.goal.time \
                        and alpha_equal(e.formula.body, run.goal.body):
                    hit = e
                    break
            if hit is not None:
                sid = run.log.add(RULE_PROMOTE, run.goal, (hit.step,),
                                  note="forward time propagation")
                run.trace.append(("promoted-goal", it))
                return ProveResult(PROVED, run.formula_proof(sid, it), None,
                                   it, len(run.kb), run.trace, run.diag)

        ders = _round_derivations(run.kb, [run.goal],
                                  limits.max_nesting_depth, limits,
                                  run.namer, run.diag)
        run.trace.append(("expand", it, len(ders)))
        if not ders:
            run.trace.append(("fixpoint", it))
            if out.status == FO_EXHAUSTED:
                return ProveResult(
                    EXHAUSTED, None,
                    f"first-order prover exhausted: {out.reason}", it,
                    len(run.kb), run.trace, run.diag)
            return ProveResult(FAILED, None,
                               "saturated under the modal schemata", it,
                               len(run.kb), run.trace, run.diag)
        for d in ders:
            sid = run.log.add(d.rule, d.formula, d.parents, d.subst, d.note)
            run.kb.add(d.formula, sid)

    reason = "max outer iterations reached"
    if last_fo is not None and last_fo.status == FO_EXHAUSTED:
        reason += f"; first-order prover exhausted: {last_fo.reason}"
    return ProveResult(EXHAUSTED, None, reason,
                       limits.max_outer_iterations, len(run.kb),
                       run.trace, run.diag)


def _query_var_placement(goal: Formula, query_vars: list[str]) -> str:
    inside: set[str] = set()
    for sub in subformulas(goal):
        if isinstance(sub, MODAL_NODES):
            inside |= free_vars(sub) & set(query_vars)
    if not inside:
        return "fo"
    if isinstance(goal, MODAL_NODES):
        return "pattern"
    raise UsageError(
        "query variables inside a modal operator are only supported when "
        "the goal is a single modal formula")


def answer(problem: Problem, limits: ModalLimits | None = None) -> AnswerResult:
    """Answer finding: witnesses for the problem's query variables, each
    with its own proof."""
    if not problem.query_vars:
        raise UsageError("problem declares no answer variables; use prove()")
    limits = limits or ModalLimits()
    run = _Run(problem, limits)
    mode = _query_var_placement(run.goal, problem.query_vars)

    answers: dict[str, AnswerEntry] = {}
    last_fo: FoOutcome | None = None
    fo_limits = FoLimits(limits.fo.max_clauses, limits.fo.timeout_ms,
                         limits.fo.max_literals, limits.max_answers)

    for it in range(1, limits.max_outer_iterations + 1):
        if mode == "fo":
            inputs, labelmap = run.fo_inputs()
            run._labelmap_cache = (inputs, labelmap)
            goal_sh = shadow(run.goal, 1, run.atoms)
            run.trace.append(("fo-call", it, len(run.kb)))
            out = prove_answer(inputs, goal_sh, problem.query_vars,
                               fo_limits, run.namer)
            run.generated += out.generated
            last_fo = out
            for fo_ans in out.answers:
                key = fo_ans.bindings.render()
                if key in answers:
                    continue
                conclusion = subst_formula(run.goal, fo_ans.bindings.bindings)
                proof = run.splice(out, fo_ans.clause_id, goal_sh,
                                   conclusion, it)
                answers[key] = AnswerEntry(dict(fo_ans.bindings.bindings),
                                           proof)
        else:
            run.trace.append(("match", it, len(run.kb)))
            for e in run.kb.entries:
                if len(answers) >= limits.max_answers:
                    break
                theta = None
                promoted = False
                if type(e.formula) is type(run.goal):
                    theta = formula_unify(run.goal, e.formula)
                if theta is None and isinstance(run.goal, Believes) \
                        and isinstance(e.formula, Believes) \
                        and e.formula.agent == run.goal.agent \
                        and e.formula.time < run.goal.time:
                    theta = formula_unify(run.goal.body, e.formula.body)
                    promoted = theta is not None
                if theta is None:
                    continue
                bindings = theta.restrict(problem.query_vars)
                key = bindings.render()
                if key in answers:
                    continue
                sid = e.step
                if promoted:
                    sid = run.log.add(
                        RULE_PROMOTE,
                        Believes(e.formula.agent, run.goal.time,
                                 e.formula.body),
                        (e.step,), note="forward time propagation")
                answers[key] = AnswerEntry(dict(bindings.bindings),
                                           run.formula_proof(sid, it))

        if len(answers) >= limits.max_answers:
            break
        ders = _round_derivations(run.kb, [run.goal],
                                  limits.max_nesting_depth, limits,
                                  run.namer, run.diag)
        run.trace.append(("expand", it, len(ders)))
        if not ders:
            run.trace.append(("fixpoint", it))
            break
        for d in ders:
            sid = run.log.add(d.rule, d.formula, d.parents, d.subst, d.note)
            run.kb.add(d.formula, sid)
    else:
        it = limits.max_outer_iterations

    found = list(answers.values())
    if found:
        return AnswerResult(ANSWERED, found, None, it, len(run.kb),
                            run.trace, run.diag)
    if last_fo is not None and last_fo.status == FO_EXHAUSTED:
        return AnswerResult(EXHAUSTED, [],
                            f"first-order prover exhausted: {last_fo.reason}",
                            it, len(run.kb), run.trace, run.diag)
    if run.trace and run.trace[-1][0] != "fixpoint":
        return AnswerResult(EXHAUSTED, [], "max outer iterations reached",
                            it, len(run.kb), run.trace, run.diag)
    return AnswerResult(FAILED, [], "saturated under the modal schemata",
                        it, len(run.kb), run.trace, run.diag)
