"""Clause and literal value types.

A clause is a disjunction of literals with clause-local variable scope.
Construction normalizes: exact-duplicate literals are merged and the
literal order is made deterministic, so structurally equal clauses compare
equal.  Search logic (resolution, subsumption) lives in ``saturation``;
this module is shared with the proof checker and therefore holds data and
rendering only.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .syntax import Atom, ShadowAtom, Term, Var, App, Const, render
from .unification import Substitution

ANS_PRED = "#ans"


@dataclass(frozen=True)
class Literal:
    positive: bool
    atom: Atom | ShadowAtom

    def complement(self) -> "Literal":
        return Literal(not self.positive, self.atom)

    def is_answer(self) -> bool:
        return isinstance(self.atom, Atom) and self.atom.pred == ANS_PRED

    def render(self) -> str:
        inner = render(self.atom)
        return inner if self.positive else f"(not {inner})"


def _literal_key(lit: Literal) -> tuple:
    return (lit.render(), not lit.positive)


# --- provenance records --------------------------------------------------

@dataclass(frozen=True)
class InputOrigin:
    label: str


@dataclass(frozen=True)
class GoalOrigin:
    label: str


@dataclass(frozen=True)
class ResolveOrigin:
    left: int
    right: int
    subst: Substitution


@dataclass(frozen=True)
class FactorOrigin:
    parent: int
    subst: Substitution


Origin = InputOrigin | GoalOrigin | ResolveOrigin | FactorOrigin


@dataclass(frozen=True)
class Clause:
    literals: tuple[Literal, ...]
    id: int | None = field(default=None, compare=False)
    origin: Origin | None = field(default=None, compare=False)

    @staticmethod
    def make(literals, id: int | None = None,
             origin: Origin | None = None) -> "Clause":
        unique = sorted(set(literals), key=_literal_key)
        return Clause(tuple(unique), id=id, origin=origin)

    def is_empty(self) -> bool:
        return not self.literals

    def is_answer_only(self) -> bool:
        return bool(self.literals) and all(l.is_answer() for l in self.literals)

    def is_tautology(self) -> bool:
        atoms_pos = {l.atom for l in self.literals if l.positive}
        return any(not l.positive and l.atom in atoms_pos
                   for l in self.literals)

    def variables(self) -> set[str]:
        out: set[str] = set()
        for lit in self.literals:
            if isinstance(lit.atom, Atom):
                for t in lit.atom.args:
                    out |= _term_vars(t)
        return out

    def weight(self) -> int:
        return sum(_atom_size(l.atom) for l in self.literals)

    def apply(self, subst: Substitution, id: int | None = None,
              origin: Origin | None = None) -> "Clause":
        return Clause.make((Literal(l.positive, subst.apply_atom(l.atom))
                            for l in self.literals), id=id, origin=origin)

    def rename(self, mapping: dict[str, str]) -> "Clause":
        sub = Substitution({old: Var(new) for old, new in mapping.items()})
        return self.apply(sub, id=self.id, origin=self.origin)

    def render(self) -> str:
        if not self.literals:
            return "(clause)"
        return "(clause " + " ".join(l.render() for l in self.literals) + ")"


def _term_vars(t: Term) -> set[str]:
    if isinstance(t, Var):
        return {t.name}
    if isinstance(t, Const):
        return set()
    out: set[str] = set()
    for a in t.args:
        out |= _term_vars(a)
    return out


def _term_size(t: Term) -> int:
    if isinstance(t, (Var, Const)):
        return 1
    return 1 + sum(_term_size(a) for a in t.args)


def _atom_size(a: Atom | ShadowAtom) -> int:
    if isinstance(a, ShadowAtom):
        return 1
    return 1 + sum(_term_size(t) for t in a.args)


def standardize_apart(c: Clause, avoid: set[str]) -> Clause:
    """Rename c's variables away from ``avoid`` (deterministic priming)."""
    own = c.variables()
    if not (own & avoid):
        return c
    mapping: dict[str, str] = {}
    taken = set(avoid) | own
    for v in sorted(own):
        fresh = v
        while fresh in avoid or (fresh != v and fresh in taken):
            fresh += "'"
        if fresh != v:
            mapping[v] = fresh
            taken.add(fresh)
    return c.rename(mapping)


def clause_alpha_equal(c: Clause, d: Clause) -> bool:
    """Equality up to a consistent renaming of variables."""
    if len(c.literals) != len(d.literals):
        return False
    return _match_lits(list(c.literals), list(d.literals), {}, {})


def _match_lits(cs: list[Literal], ds: list[Literal],
                fwd: dict[str, str], bwd: dict[str, str]) -> bool:
    if not cs:
        return True
    head, rest = cs[0], cs[1:]
    for i, cand in enumerate(ds):
        if cand.positive != head.positive:
            continue
        pair = _bijective_atom_match(head.atom, cand.atom, dict(fwd), dict(bwd))
        if pair is None:
            continue
        f2, b2 = pair
        if _match_lits(rest, ds[:i] + ds[i + 1:], f2, b2):
            return True
    return False


def _bijective_atom_match(a, b, fwd, bwd):
    if isinstance(a, ShadowAtom) or isinstance(b, ShadowAtom):
        return (fwd, bwd) if a == b else None
    if a.pred != b.pred or len(a.args) != len(b.args):
        return None
    for x, y in zip(a.args, b.args):
        if not _bijective_term_match(x, y, fwd, bwd):
            return None
    return (fwd, bwd)


def _bijective_term_match(x: Term, y: Term, fwd, bwd) -> bool:
    if isinstance(x, Var) and isinstance(y, Var):
        if fwd.get(x.name, y.name) != y.name:
            return False
        if bwd.get(y.name, x.name) != x.name:
            return False
        fwd[x.name] = y.name
        bwd[y.name] = x.name
        return True
    if isinstance(x, Const) and isinstance(y, Const):
        return x.name == y.name
    if isinstance(x, App) and isinstance(y, App):
        if x.fn != y.fn or len(x.args) != len(y.args):
            return False
        return all(_bijective_term_match(p, q, fwd, bwd)
                   for p, q in zip(x.args, y.args))
    return False
