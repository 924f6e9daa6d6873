"""Most general unification over first-order terms and flat atoms.

Substitutions are kept in solved (idempotent) form: every binding's
right-hand side is fully applied, and the occurs check rejects cyclic
bindings.  Shadow atoms are opaque constants for unification: they unify
exactly when they stand for alpha-equivalent formulae.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .syntax import App, Atom, Const, ShadowAtom, Term, Var, render_term


@dataclass(frozen=True)
class Substitution:
    bindings: dict[str, Term] = field(default_factory=dict)

    def is_empty(self) -> bool:
        return not self.bindings

    def get(self, name: str) -> Term | None:
        return self.bindings.get(name)

    def apply_term(self, t: Term) -> Term:
        if isinstance(t, Var):
            bound = self.bindings.get(t.name)
            return bound if bound is not None else t
        if isinstance(t, Const):
            return t
        return App(t.fn, tuple(self.apply_term(a) for a in t.args))

    def apply_atom(self, a: Atom | ShadowAtom) -> Atom | ShadowAtom:
        if isinstance(a, ShadowAtom):
            return a
        return Atom(a.pred, tuple(self.apply_term(t) for t in a.args))

    def bind(self, name: str, t: Term) -> "Substitution | None":
        """Extend with name -> t, keeping solved form; None on occurs check."""
        t = self.apply_term(t)
        if isinstance(t, Var) and t.name == name:
            return self
        if _occurs(name, t):
            return None
        one = {name: t}
        merged = {k: _subst(v, one) for k, v in self.bindings.items()}
        merged[name] = t
        return Substitution(merged)

    def restrict(self, names: list[str]) -> "Substitution":
        return Substitution({n: self.bindings[n] for n in names
                             if n in self.bindings})

    def render(self) -> str:
        inner = ", ".join(f"{k} -> {render_term(v)}"
                          for k, v in sorted(self.bindings.items()))
        return "{" + inner + "}"


EMPTY_SUBST = Substitution({})


def _subst(t: Term, mapping: dict[str, Term]) -> Term:
    if isinstance(t, Var):
        return mapping.get(t.name, t)
    if isinstance(t, Const):
        return t
    return App(t.fn, tuple(_subst(a, mapping) for a in t.args))


def _occurs(name: str, t: Term) -> bool:
    if isinstance(t, Var):
        return t.name == name
    if isinstance(t, Const):
        return False
    return any(_occurs(name, a) for a in t.args)


def unify_terms(a: Term, b: Term,
                subst: Substitution = EMPTY_SUBST) -> Substitution | None:
    a = subst.apply_term(a)
    b = subst.apply_term(b)
    if isinstance(a, Var):
        return subst.bind(a.name, b)
    if isinstance(b, Var):
        return subst.bind(b.name, a)
    if isinstance(a, Const) and isinstance(b, Const):
        return subst if a.name == b.name else None
    if isinstance(a, App) and isinstance(b, App):
        if a.fn != b.fn or len(a.args) != len(b.args):
            return None
        for x, y in zip(a.args, b.args):
            nxt = unify_terms(x, y, subst)
            if nxt is None:
                return None
            subst = nxt
        return subst
    return None


def unify(a: Atom | ShadowAtom | Term, b: Atom | ShadowAtom | Term,
          subst: Substitution = EMPTY_SUBST) -> Substitution | None:
    """Most general unifier of two atoms or two terms; None when they clash."""
    if isinstance(a, (Atom, ShadowAtom)) or isinstance(b, (Atom, ShadowAtom)):
        if isinstance(a, ShadowAtom) and isinstance(b, ShadowAtom):
            return subst if a == b else None
        if not (isinstance(a, Atom) and isinstance(b, Atom)):
            return None
        if a.pred != b.pred or len(a.args) != len(b.args):
            return None
        for x, y in zip(a.args, b.args):
            nxt = unify_terms(x, y, subst)
            if nxt is None:
                return None
            subst = nxt
        return subst
    return unify_terms(a, b, subst)


def match_terms(pattern: Term, target: Term,
                subst: Substitution = EMPTY_SUBST) -> Substitution | None:
    """One-way matching: binds only pattern variables, target is rigid."""
    if isinstance(pattern, Var):
        bound = subst.get(pattern.name)
        if bound is not None:
            return subst if bound == target else None
        return Substitution({**subst.bindings, pattern.name: target})
    if isinstance(pattern, Const):
        return subst if pattern == target else None
    if isinstance(pattern, App) and isinstance(target, App):
        if pattern.fn != target.fn or len(pattern.args) != len(target.args):
            return None
        for x, y in zip(pattern.args, target.args):
            nxt = match_terms(x, y, subst)
            if nxt is None:
                return None
            subst = nxt
        return subst
    return None


def match_atoms(pattern: Atom | ShadowAtom, target: Atom | ShadowAtom,
                subst: Substitution = EMPTY_SUBST) -> Substitution | None:
    if isinstance(pattern, ShadowAtom) or isinstance(target, ShadowAtom):
        return subst if pattern == target else None
    if pattern.pred != target.pred or len(pattern.args) != len(target.args):
        return None
    for x, y in zip(pattern.args, target.args):
        nxt = match_terms(x, y, subst)
        if nxt is None:
            return None
        subst = nxt
    return subst
