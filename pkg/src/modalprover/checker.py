"""Independent proof checking.

This module re-verifies every step of a proof against the problem it
claims to prove.  By policy it shares only the core syntax layer (terms,
formulae, shadowing, clause value types) with the search engine: it has
its own unification, its own clausifier, and its own schema side-condition
checks, so a defect in the search code cannot hide a defect in the same
code during verification.

Clause-level steps are validated structurally: resolution and factoring
steps must reproduce their recorded conclusion exactly when the recorded
substitution is applied (so a tampered substitution is caught), while cnf
steps are compared against this module's own conversion up to a bijection
of variables and Skolem symbols.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .clauses import Clause, Literal
from .errors import FreeVariableError
from .parser import Problem
from .proof import (
    Proof, RULE_ARITY, RULE_CNF, RULE_FACTOR, RULE_IB, RULE_INPUT, RULE_IO,
    RULE_IR, RULE_PROMOTE, RULE_SHADOW, RULE_UNSHADOW, RULES, ProofStep,
)
from .shadowing import AtomTable, shadow
from .syntax import (
    And, App, Atom, Believes, Const, Exists, Forall, Formula, Goal,
    Implies, Not, Or, Ought, ShadowAtom, Term, Var, alpha_equal,
    canon, desugar, free_vars,
)

_SKOLEM_RE = re.compile(r"^sk\d+$")
_OWN_SKOLEM = "@sk"


@dataclass(frozen=True)
class CheckResult:
    ok: bool
    step: int | None = None
    reason: str | None = None

    @property
    def valid(self) -> bool:
        return self.ok

    def __str__(self) -> str:
        if self.ok:
            return "valid"
        return f"invalid step {self.step}: {self.reason}"


def check(proof: Proof, problem: Problem) -> CheckResult:
    """Re-verify every step; reports the first failing step."""
    checker = _Checker(problem)
    try:
        checker.run(proof)
    except _Invalid as bad:
        return CheckResult(False, bad.step, bad.reason)
    return CheckResult(True)


class _Invalid(Exception):
    def __init__(self, step: int, reason: str):
        self.step = step
        self.reason = reason
        super().__init__(f"step {step}: {reason}")


_FORMULA_RULES = {RULE_INPUT, RULE_IB, RULE_IO, RULE_PROMOTE, RULE_SHADOW,
                  RULE_UNSHADOW}
_CLAUSE_RULES = {RULE_CNF, RULE_IR, RULE_FACTOR}


class _Checker:
    def __init__(self, problem: Problem):
        self.problem = problem
        self.declared = set(problem.predicates) | set(problem.functions) \
            | {a.name for a in problem.agents} | {t.name for t in problem.times}
        self.inputs = {canon(desugar(f)) for _, f in problem.assumptions}
        self.goal = desugar(problem.goal)
        self.inputs.add(canon(Not(self.goal)))

    # -- plumbing --

    def run(self, proof: Proof) -> None:
        steps = proof.steps
        for i, s in enumerate(steps):
            if s.id != i + 1:
                raise _Invalid(s.id, "step ids must be sequential from 1")
            if s.rule not in RULES:
                raise _Invalid(s.id, f"unknown rule {s.rule!r}")
            want = RULE_ARITY[s.rule]
            if len(s.parents) != want:
                raise _Invalid(s.id, f"{s.rule} takes {want} parent(s), "
                                     f"got {len(s.parents)}")
            for p in s.parents:
                if not (1 <= p < s.id):
                    raise _Invalid(s.id, "parents must precede the step")
            if s.rule in _FORMULA_RULES and isinstance(s.conclusion, Clause):
                raise _Invalid(s.id, f"{s.rule} concludes a formula")
            if s.rule in _CLAUSE_RULES and not isinstance(s.conclusion, Clause):
                raise _Invalid(s.id, f"{s.rule} concludes a clause")
            self._check_step(s, steps)
        if not (1 <= proof.goal_step <= len(steps)):
            raise _Invalid(proof.goal_step, "goal step out of range")
        final = steps[proof.goal_step - 1]
        if isinstance(final.conclusion, Clause):
            raise _Invalid(final.id, "goal step must conclude a formula")
        if not self._matches_goal(final.conclusion):
            raise _Invalid(final.id,
                           "goal step does not match the problem goal")

    def _check_step(self, s: ProofStep, steps) -> None:
        parents = [steps[p - 1] for p in s.parents]
        if s.rule == RULE_INPUT:
            if canon(s.conclusion) not in self.inputs:
                raise _Invalid(s.id, "not an assumption or the negated goal")
        elif s.rule == RULE_SHADOW:
            src = parents[0].conclusion
            if isinstance(src, Clause):
                raise _Invalid(s.id, "shadow applies to a formula")
            expected = shadow(src, 1, AtomTable())
            if canon(expected) != canon(s.conclusion):
                raise _Invalid(s.id, "not the level-1 shadowing of its parent")
        elif s.rule == RULE_CNF:
            src = parents[0].conclusion
            if isinstance(src, Clause):
                raise _Invalid(s.id, "cnf applies to a formula")
            if not self._cnf_membership(src, s.conclusion, s.id):
                raise _Invalid(s.id, "clause does not follow from the "
                                     "parent formula's clausification")
        elif s.rule == RULE_IR:
            self._check_resolution(s, parents)
        elif s.rule == RULE_FACTOR:
            self._check_factor(s, parents)
        elif s.rule == RULE_IB:
            err = self._check_ib(parents[0].conclusion, parents[1].conclusion,
                                 s.conclusion)
            if err:
                raise _Invalid(s.id, err)
        elif s.rule == RULE_IO:
            err = self._check_io(parents[0].conclusion, parents[1].conclusion,
                                 s.conclusion)
            if err is not None:
                err2 = self._check_io(parents[1].conclusion,
                                      parents[0].conclusion, s.conclusion)
                if err2 is not None:
                    raise _Invalid(s.id, err)
        elif s.rule == RULE_PROMOTE:
            err = self._check_promote(parents[0].conclusion, s.conclusion)
            if err:
                raise _Invalid(s.id, err)
        elif s.rule == RULE_UNSHADOW:
            src = parents[0].conclusion
            if not isinstance(src, Clause):
                raise _Invalid(s.id, "unshadow discharges a refutation clause")
            if not (src.is_empty() or src.is_answer_only()):
                raise _Invalid(s.id, "parent is not an empty or answer-only "
                                     "clause")
            if not self._matches_goal(s.conclusion):
                raise _Invalid(s.id, "conclusion does not match the goal")

    def _matches_goal(self, f: Formula) -> bool:
        if canon(f) == canon(self.goal):
            return True
        if self.problem.query_vars:
            return _formula_unify(self.goal, f) is not None
        return False

    # -- clause steps --

    def _check_resolution(self, s: ProofStep, parents) -> None:
        if s.substitution is None:
            raise _Invalid(s.id, "resolution must record its unifier")
        c1, c2 = parents[0].conclusion, parents[1].conclusion
        c2r = _prime_apart(c2, c1)
        theta = s.substitution
        for lit1 in c1.literals:
            if lit1.is_answer():
                continue
            for lit2 in c2r.literals:
                if lit2.positive == lit1.positive or lit2.is_answer():
                    continue
                a1 = _apply_subst_atom(lit1.atom, theta)
                a2 = _apply_subst_atom(lit2.atom, theta)
                if a1 != a2:
                    continue
                rest = [Literal(l.positive, _apply_subst_atom(l.atom, theta))
                        for l in c1.literals if l != lit1]
                rest += [Literal(l.positive, _apply_subst_atom(l.atom, theta))
                         for l in c2r.literals if l != lit2]
                if Clause.make(rest) == Clause.make(s.conclusion.literals):
                    return
        raise _Invalid(s.id, "recorded substitution does not yield this "
                             "resolvent from the parents")

    def _check_factor(self, s: ProofStep, parents) -> None:
        if s.substitution is None:
            raise _Invalid(s.id, "factoring must record its unifier")
        c = parents[0].conclusion
        theta = s.substitution
        lits = c.literals
        for i in range(len(lits)):
            for j in range(i + 1, len(lits)):
                if lits[i].positive != lits[j].positive:
                    continue
                if _apply_subst_atom(lits[i].atom, theta) \
                        != _apply_subst_atom(lits[j].atom, theta):
                    continue
                merged = [Literal(l.positive, _apply_subst_atom(l.atom, theta))
                          for l in lits]
                if Clause.make(merged) == Clause.make(s.conclusion.literals):
                    return
        raise _Invalid(s.id, "recorded substitution does not factor the "
                             "parent into this clause")

    def _cnf_membership(self, src: Formula, cl: Clause, sid: int) -> bool:
        try:
            candidates = _clausify(src)
        except _NotFirstOrder:
            raise _Invalid(sid, "cnf parent is not first-order")
        ans = [l for l in cl.literals if l.is_answer()]
        target = [(l.positive, l.atom) for l in cl.literals
                  if not l.is_answer()]
        qv = self.problem.query_vars
        for cand in candidates:
            maps = _clause_bijection_maps(target, cand, self.declared)
            if maps is None:
                continue
            vf = maps[0]
            if all(self._answer_literal_ok(lit, qv, vf) for lit in ans):
                return True
        return False

    @staticmethod
    def _answer_literal_ok(lit: Literal, qv: list[str],
                           vf: dict[str, str]) -> bool:
        """The answer literal must track exactly the query variables."""
        if not lit.positive or len(lit.atom.args) != len(qv):
            return False
        for arg, name in zip(lit.atom.args, qv):
            if not isinstance(arg, Var) or vf.get(arg.name, arg.name) != name:
                return False
        return True

    # -- modal schema steps (recursive through nesting) --

    def _check_ib(self, p1: Formula, p2: Formula, c: Formula) -> str | None:
        if not (isinstance(p1, Believes) and isinstance(p2, Believes)
                and isinstance(c, Believes)):
            return "I_B relates three belief formulae"
        if not (p1.agent == p2.agent == c.agent):
            return "I_B premises and conclusion must share one agent"
        if c.time < p1.time or c.time < p2.time:
            return "time ordering: conclusion time must be >= premise times"
        if self._is_body_resolvent(p1.body, p2.body, c.body):
            return None
        nested = self._check_ib(p1.body, p2.body, c.body)
        if nested is None:
            return None
        return "conclusion body is not a resolvent of the premise bodies"

    def _is_body_resolvent(self, b1: Formula, b2: Formula,
                           target: Formula) -> bool:
        table = AtomTable()
        try:
            cls1 = _clausify(shadow(b1, 1, table))
            cls2 = _clausify(shadow(b2, 1, table))
        except (_NotFirstOrder, FreeVariableError):
            return False
        tlits = _formula_to_signed(target)
        if tlits is None:
            return False
        for c1 in cls1:
            for c2 in cls2:
                c2r = _rename_signed(c2, "~")
                for i, (s1, a1) in enumerate(c1):
                    for j, (s2, a2) in enumerate(c2r):
                        if s1 == s2:
                            continue
                        sigma = _unify_atoms(a1, a2, {})
                        if sigma is None:
                            continue
                        rest = [(s, _apply_map_atom(a, sigma))
                                for k, (s, a) in enumerate(c1) if k != i]
                        rest += [(s, _apply_map_atom(a, sigma))
                                 for k, (s, a) in enumerate(c2r) if k != j]
                        rest = _dedup_signed(rest)
                        if not rest:
                            continue
                        if _clause_bijection(tlits, rest, self.declared):
                            return True
        return False

    def _check_io(self, p1: Formula, p2: Formula, c: Formula) -> str | None:
        if isinstance(p1, Believes) and isinstance(p2, Believes) \
                and isinstance(c, Goal) and p1.agent == p2.agent == c.agent:
            core2, _ = _strip_foralls(p2.body)
            if not isinstance(core2, Ought):
                return "second premise must be a believed obligation"
            if core2.agent != p2.agent:
                return "obligation agent must equal the believing agent"
            if c.time != max(p1.time, p2.time):
                return "goal time must be the max of the premise belief times"
            core1, _ = _strip_foralls(p1.body)
            ren = {v: Var(v + "~b") for v in free_vars(core1)}
            core1 = _apply_map_formula(core1, ren)
            theta = _formula_unify(core2.condition, core1)
            if theta is None:
                return "believed formula does not match the obligation's " \
                       "condition"
            expected = _apply_map_formula(core2.duty, theta)
            if _open_formula_alpha_equal(expected, c.body):
                return None
            return "conclusion duty is not the matched obligation duty"
        if isinstance(p1, Believes) and isinstance(p2, Believes) \
                and isinstance(c, Believes) \
                and p1.agent == p2.agent == c.agent:
            if c.time < p1.time or c.time < p2.time:
                return "time ordering: conclusion time must be >= premise " \
                       "times"
            return self._check_io(p1.body, p2.body, c.body)
        return "I_O relates two beliefs to a goal"

    def _check_promote(self, p: Formula, c: Formula) -> str | None:
        if not (isinstance(p, Believes) and isinstance(c, Believes)):
            return "promote relates two belief formulae"
        if p.agent != c.agent:
            return "promote must keep the agent"
        if c.time < p.time:
            return "time ordering: beliefs only propagate forward"
        if alpha_equal(p.body, c.body):
            return None
        if c.time == p.time:
            err = self._check_promote(p.body, c.body)
            if err is None:
                return None
        return "promoted belief must keep its body"


# --- the checker's own first-order kernel --------------------------------

class _NotFirstOrder(Exception):
    pass


def _strip_foralls(f: Formula) -> tuple[Formula, list[str]]:
    out: list[str] = []
    while isinstance(f, Forall):
        out.append(f.var)
        f = f.body
    return f, out


SignedAtom = tuple[bool, Atom | ShadowAtom]


def _formula_to_signed(f: Formula) -> list[SignedAtom] | None:
    """Read a universally closed disjunction back into signed literals."""
    matrix, _ = _strip_foralls(f)
    out: list[SignedAtom] = []
    stack = [matrix]
    table = AtomTable()
    while stack:
        g = stack.pop()
        if isinstance(g, Or):
            stack.append(g.right)
            stack.append(g.left)
            continue
        sign = True
        if isinstance(g, Not):
            sign = False
            g = g.body
        if isinstance(g, (Atom, ShadowAtom)):
            out.append((sign, g))
        elif isinstance(g, (Believes, Ought, Goal)):
            out.append((sign, table.atomize(g)))
        else:
            return None
    return _dedup_signed(out)


def _dedup_signed(lits: list[SignedAtom]) -> list[SignedAtom]:
    seen = set()
    out = []
    for s, a in lits:
        key = (s, canon(a))
        if key in seen:
            continue
        seen.add(key)
        out.append((s, a))
    return out


# own term unification (engine-independent)

def _unify_terms(a: Term, b: Term, env: dict[str, Term]) -> dict[str, Term] | None:
    a = _walk(a, env)
    b = _walk(b, env)
    if isinstance(a, Var) and isinstance(b, Var) and a.name == b.name:
        return env
    if isinstance(a, Var):
        if _occurs(a.name, b, env):
            return None
        env = dict(env)
        env[a.name] = b
        return env
    if isinstance(b, Var):
        return _unify_terms(b, a, env)
    if isinstance(a, Const) and isinstance(b, Const):
        return env if a.name == b.name else None
    if isinstance(a, App) and isinstance(b, App):
        if a.fn != b.fn or len(a.args) != len(b.args):
            return None
        for x, y in zip(a.args, b.args):
            env2 = _unify_terms(x, y, env)
            if env2 is None:
                return None
            env = env2
        return env
    return None


def _walk(t: Term, env: dict[str, Term]) -> Term:
    while isinstance(t, Var) and t.name in env:
        t = env[t.name]
    return t


def _occurs(name: str, t: Term, env: dict[str, Term]) -> bool:
    t = _walk(t, env)
    if isinstance(t, Var):
        return t.name == name
    if isinstance(t, Const):
        return False
    return any(_occurs(name, a, env) for a in t.args)


def _unify_atoms(a, b, env) -> dict[str, Term] | None:
    if isinstance(a, ShadowAtom) or isinstance(b, ShadowAtom):
        return env if a == b else None
    if a.pred != b.pred or len(a.args) != len(b.args):
        return None
    for x, y in zip(a.args, b.args):
        env2 = _unify_terms(x, y, env)
        if env2 is None:
            return None
        env = env2
    return env


def _resolve_term(t: Term, env: dict[str, Term]) -> Term:
    t = _walk(t, env)
    if isinstance(t, App):
        return App(t.fn, tuple(_resolve_term(a, env) for a in t.args))
    return t


def _apply_map_atom(a, env: dict[str, Term]):
    if isinstance(a, ShadowAtom):
        return a
    return Atom(a.pred, tuple(_resolve_term(t, env) for t in a.args))


def _rename_signed(lits: list[SignedAtom], suffix: str) -> list[SignedAtom]:
    out = []
    for s, a in lits:
        if isinstance(a, ShadowAtom):
            out.append((s, a))
        else:
            out.append((s, Atom(a.pred, tuple(_suffix_vars(t, suffix)
                                              for t in a.args))))
    return out


def _suffix_vars(t: Term, suffix: str) -> Term:
    if isinstance(t, Var):
        return Var(t.name + suffix)
    if isinstance(t, Const):
        return t
    return App(t.fn, tuple(_suffix_vars(a, suffix) for a in t.args))


# substitution application used when replaying recorded unifiers

def _apply_subst_atom(a, subst):
    if isinstance(a, ShadowAtom):
        return a
    return Atom(a.pred, tuple(_apply_subst_term(t, subst) for t in a.args))


def _apply_subst_term(t: Term, subst) -> Term:
    if isinstance(t, Var):
        bound = subst.bindings.get(t.name)
        return t if bound is None else bound
    if isinstance(t, Const):
        return t
    return App(t.fn, tuple(_apply_subst_term(a, subst) for a in t.args))


def _prime_apart(c2: Clause, c1: Clause) -> Clause:
    """Reproduce the proof format's standardize-apart convention."""
    from .clauses import standardize_apart
    return standardize_apart(c2, c1.variables())


# own clausifier (textbook; names its variables ?k.. and skolems @sk..)

def _clausify(f: Formula) -> list[list[SignedAtom]]:
    state = {"var": 0, "sk": 0}

    def fresh_var() -> str:
        state["var"] += 1
        return f"?k{state['var']}"

    def fresh_sk() -> str:
        state["sk"] += 1
        return f"{_OWN_SKOLEM}{state['sk']}"

    def sub_term(t: Term, env: dict[str, Term]) -> Term:
        if isinstance(t, Var):
            return env.get(t.name, t)
        if isinstance(t, Const):
            return t
        return App(t.fn, tuple(sub_term(a, env) for a in t.args))

    def nnf(g: Formula, pos: bool, env: dict[str, Term],
            universals: list[str]) -> Formula:
        if isinstance(g, ShadowAtom):
            return g if pos else Not(g)
        if isinstance(g, Atom):
            g = Atom(g.pred, tuple(sub_term(t, env) for t in g.args))
            return g if pos else Not(g)
        if isinstance(g, Not):
            return nnf(g.body, not pos, env, universals)
        if isinstance(g, Or):
            cls = Or if pos else And
            return cls(nnf(g.left, pos, env, universals),
                       nnf(g.right, pos, env, universals))
        if isinstance(g, And):
            cls = And if pos else Or
            return cls(nnf(g.left, pos, env, universals),
                       nnf(g.right, pos, env, universals))
        if isinstance(g, Implies):
            cls = Or if pos else And
            return cls(nnf(g.left, not pos, env, universals),
                       nnf(g.right, pos, env, universals))
        if isinstance(g, (Forall, Exists)):
            is_universal = isinstance(g, Forall) == pos
            env2 = dict(env)
            if is_universal:
                v = fresh_var()
                env2[g.var] = Var(v)
                return Forall(v, nnf(g.body, pos, env2, universals + [v]))
            name = fresh_sk()
            term: Term = Const(name) if not universals \
                else App(name, tuple(Var(u) for u in universals))
            env2[g.var] = term
            return nnf(g.body, pos, env2, universals)
        raise _NotFirstOrder

    def strip(g: Formula) -> Formula:
        if isinstance(g, Forall):
            return strip(g.body)
        if isinstance(g, (Or, And)):
            return type(g)(strip(g.left), strip(g.right))
        return g

    def split(g: Formula) -> list[list[SignedAtom]]:
        if isinstance(g, And):
            return split(g.left) + split(g.right)
        if isinstance(g, Or):
            return [a + b for a in split(g.left) for b in split(g.right)]
        if isinstance(g, Not):
            return [[(False, g.body)]]
        return [[(True, g)]]

    matrix = strip(nnf(f, True, {}, []))
    out = []
    for lits in split(matrix):
        lits = _dedup_signed(lits)
        pos = {canon(a) for s, a in lits if s}
        if any(not s and canon(a) in pos for s, a in lits):
            continue
        out.append(lits)
    return out


# bijective clause comparison (variables and Skolem symbols both rename)

def _clause_bijection(target: list[SignedAtom], cand: list[SignedAtom],
                      declared: set[str]) -> bool:
    return _clause_bijection_maps(target, cand, declared) is not None


def _clause_bijection_maps(target: list[SignedAtom], cand: list[SignedAtom],
                           declared: set[str]):
    if len(target) != len(cand):
        return None
    return _assign(target, list(cand), {}, {}, {}, {}, declared)


def _is_skolem(name: str, declared: set[str]) -> bool:
    if name in declared:
        return False
    return bool(_SKOLEM_RE.match(name)) or name.startswith(_OWN_SKOLEM)


def _assign(targets, cands, vf, vb, sf, sb, declared):
    if not targets:
        return (vf, vb, sf, sb)
    (sign, atom), rest = targets[0], targets[1:]
    for i, (csign, catom) in enumerate(cands):
        if csign != sign:
            continue
        state = (dict(vf), dict(vb), dict(sf), dict(sb))
        if _bij_atom(atom, catom, *state, declared):
            got = _assign(rest, cands[:i] + cands[i + 1:], *state, declared)
            if got is not None:
                return got
    return None


def _bij_atom(a, b, vf, vb, sf, sb, declared) -> bool:
    if isinstance(a, ShadowAtom) or isinstance(b, ShadowAtom):
        return a == b
    if a.pred != b.pred or len(a.args) != len(b.args):
        return False
    return all(_bij_term(x, y, vf, vb, sf, sb, declared)
               for x, y in zip(a.args, b.args))


def _bij_name(x: str, y: str, fwd: dict, bwd: dict) -> bool:
    if fwd.get(x, y) != y or bwd.get(y, x) != x:
        return False
    fwd[x] = y
    bwd[y] = x
    return True


def _bij_term(x: Term, y: Term, vf, vb, sf, sb, declared) -> bool:
    if isinstance(x, Var) and isinstance(y, Var):
        return _bij_name(x.name, y.name, vf, vb)
    if isinstance(x, Const) and isinstance(y, Const):
        if _is_skolem(x.name, declared) and _is_skolem(y.name, declared):
            return _bij_name(x.name, y.name, sf, sb)
        return x.name == y.name
    if isinstance(x, App) and isinstance(y, App):
        if len(x.args) != len(y.args):
            return False
        if _is_skolem(x.fn, declared) and _is_skolem(y.fn, declared):
            if not _bij_name(x.fn, y.fn, sf, sb):
                return False
        elif x.fn != y.fn:
            return False
        return all(_bij_term(p, q, vf, vb, sf, sb, declared)
                   for p, q in zip(x.args, y.args))
    return False


# own whole-formula unification for obligation matching

def _formula_unify(f: Formula, g: Formula) -> dict[str, Term] | None:
    env = _fu(f, g, {}, {}, 0, {})
    if env is None:
        return None
    for t in env.values():
        if _has_bound_marker(_resolve_term(t, env)):
            return None
    return env


_BOUND = "\x01bnd"


def _has_bound_marker(t: Term) -> bool:
    if isinstance(t, Const):
        return t.name.startswith(_BOUND)
    if isinstance(t, Var):
        return False
    return any(_has_bound_marker(a) for a in t.args)


def _fu(f, g, fenv, genv, depth, env):
    if isinstance(f, Atom) and isinstance(g, Atom):
        if f.pred != g.pred or len(f.args) != len(g.args):
            return None
        for x, y in zip(f.args, g.args):
            env = _unify_terms(_env_term(x, fenv), _env_term(y, genv), env)
            if env is None:
                return None
        return env
    if isinstance(f, ShadowAtom) and isinstance(g, ShadowAtom):
        return env if f == g else None
    if isinstance(f, Not) and isinstance(g, Not):
        return _fu(f.body, g.body, fenv, genv, depth, env)
    if type(f) is type(g) and isinstance(f, (Or, And, Implies)):
        env = _fu(f.left, g.left, fenv, genv, depth, env)
        if env is None:
            return None
        return _fu(f.right, g.right, fenv, genv, depth, env)
    if type(f) is type(g) and isinstance(f, (Forall, Exists)):
        mark = Const(f"{_BOUND}{depth}")
        fenv2 = dict(fenv)
        genv2 = dict(genv)
        fenv2[f.var] = mark
        genv2[g.var] = mark
        return _fu(f.body, g.body, fenv2, genv2, depth + 1, env)
    if type(f) is type(g) and isinstance(f, (Believes, Goal)):
        if f.agent != g.agent or f.time != g.time:
            return None
        return _fu(f.body, g.body, fenv, genv, depth, env)
    if isinstance(f, Ought) and isinstance(g, Ought):
        if f.agent != g.agent or f.time != g.time:
            return None
        env = _fu(f.condition, g.condition, fenv, genv, depth, env)
        if env is None:
            return None
        return _fu(f.duty, g.duty, fenv, genv, depth, env)
    return None


def _env_term(t: Term, benv: dict[str, Const]) -> Term:
    if isinstance(t, Var):
        return benv.get(t.name, t)
    if isinstance(t, Const):
        return t
    return App(t.fn, tuple(_env_term(a, benv) for a in t.args))


def _apply_map_formula(f: Formula, env: dict[str, Term]) -> Formula:
    if isinstance(f, Atom):
        return Atom(f.pred, tuple(_resolve_term(t, env) for t in f.args))
    if isinstance(f, ShadowAtom):
        return f
    if isinstance(f, Not):
        return Not(_apply_map_formula(f.body, env))
    if isinstance(f, (Or, And, Implies)):
        return type(f)(_apply_map_formula(f.left, env),
                       _apply_map_formula(f.right, env))
    if isinstance(f, (Forall, Exists)):
        inner = {k: v for k, v in env.items() if k != f.var}
        return type(f)(f.var, _apply_map_formula(f.body, inner))
    if isinstance(f, (Believes, Goal)):
        return type(f)(f.agent, f.time, _apply_map_formula(f.body, env))
    if isinstance(f, Ought):
        return Ought(f.agent, f.time, _apply_map_formula(f.condition, env),
                     _apply_map_formula(f.duty, env))
    raise TypeError(f"not a formula: {f!r}")


def _open_formula_alpha_equal(f: Formula, g: Formula) -> bool:
    """Alpha equality that also tolerates a reordered universal prefix and
    a bijective renaming of the remaining free variables."""
    fm, _ = _strip_foralls(f)
    gm, _ = _strip_foralls(g)
    return _fu_rigid(fm, gm, {}, {})


def _fu_rigid(f, g, fwd, bwd) -> bool:
    if isinstance(f, Atom) and isinstance(g, Atom):
        if f.pred != g.pred or len(f.args) != len(g.args):
            return False
        return all(_bij_term(x, y, fwd, bwd, {}, {}, set())
                   for x, y in zip(f.args, g.args))
    if isinstance(f, ShadowAtom) and isinstance(g, ShadowAtom):
        return f == g
    if isinstance(f, Not) and isinstance(g, Not):
        return _fu_rigid(f.body, g.body, fwd, bwd)
    if type(f) is type(g) and isinstance(f, (Or, And, Implies)):
        return _fu_rigid(f.left, g.left, fwd, bwd) \
            and _fu_rigid(f.right, g.right, fwd, bwd)
    if type(f) is type(g) and isinstance(f, (Forall, Exists)):
        return _bij_name(f.var, g.var, fwd, bwd) \
            and _fu_rigid(f.body, g.body, fwd, bwd)
    if type(f) is type(g) and isinstance(f, (Believes, Goal)):
        return f.agent == g.agent and f.time == g.time \
            and _fu_rigid(f.body, g.body, fwd, bwd)
    if isinstance(f, Ought) and isinstance(g, Ought):
        return f.agent == g.agent and f.time == g.time \
            and _fu_rigid(f.condition, g.condition, fwd, bwd) \
            and _fu_rigid(f.duty, g.duty, fwd, bwd)
    return False
