"""First-order unification lifted to whole formulae.

Used for obligation matching and for answer patterns over modal goals:
two formulae unify when they are structurally identical up to alpha
renaming of bound variables and a substitution on their free variables.
Bound variables are rigid: a binding whose value would smuggle one out of
its quantifier scope fails.
"""

from __future__ import annotations

from .syntax import (
    And, App, Atom, Believes, Const, Exists, Forall, Formula, Goal, Implies,
    Not, Or, Ought, ShadowAtom, Term, Var,
)
from .unification import Substitution, unify_terms

_MARK = "\x00bound"


def _marker(depth: int) -> Const:
    return Const(f"{_MARK}{depth}")


def _is_marker(name: str) -> bool:
    return name.startswith(_MARK)


def _term_has_marker(t: Term) -> bool:
    if isinstance(t, Const):
        return _is_marker(t.name)
    if isinstance(t, Var):
        return False
    return any(_term_has_marker(a) for a in t.args)


def _apply_env(t: Term, env: dict[str, Const]) -> Term:
    if isinstance(t, Var):
        return env.get(t.name, t)
    if isinstance(t, Const):
        return t
    return App(t.fn, tuple(_apply_env(a, env) for a in t.args))


def _unify(f: Formula, g: Formula, fenv: dict[str, Const],
           genv: dict[str, Const], depth: int,
           subst: Substitution) -> Substitution | None:
    if isinstance(f, Atom) and isinstance(g, Atom):
        if f.pred != g.pred or len(f.args) != len(g.args):
            return None
        for x, y in zip(f.args, g.args):
            nxt = unify_terms(_apply_env(x, fenv), _apply_env(y, genv), subst)
            if nxt is None:
                return None
            subst = nxt
        return subst
    if isinstance(f, ShadowAtom) and isinstance(g, ShadowAtom):
        return subst if f == g else None
    if isinstance(f, Not) and isinstance(g, Not):
        return _unify(f.body, g.body, fenv, genv, depth, subst)
    if type(f) is type(g) and isinstance(f, (Or, And, Implies)):
        nxt = _unify(f.left, g.left, fenv, genv, depth, subst)
        if nxt is None:
            return None
        return _unify(f.right, g.right, fenv, genv, depth, nxt)
    if type(f) is type(g) and isinstance(f, (Forall, Exists)):
        mark = _marker(depth)
        fenv2 = dict(fenv)
        genv2 = dict(genv)
        fenv2[f.var] = mark
        genv2[g.var] = mark
        return _unify(f.body, g.body, fenv2, genv2, depth + 1, subst)
    if isinstance(f, Believes) and isinstance(g, Believes):
        if f.agent != g.agent or f.time != g.time:
            return None
        return _unify(f.body, g.body, fenv, genv, depth, subst)
    if isinstance(f, Goal) and isinstance(g, Goal):
        if f.agent != g.agent or f.time != g.time:
            return None
        return _unify(f.body, g.body, fenv, genv, depth, subst)
    if isinstance(f, Ought) and isinstance(g, Ought):
        if f.agent != g.agent or f.time != g.time:
            return None
        nxt = _unify(f.condition, g.condition, fenv, genv, depth, subst)
        if nxt is None:
            return None
        return _unify(f.duty, g.duty, fenv, genv, depth, nxt)
    return None


def formula_unify(f: Formula, g: Formula) -> Substitution | None:
    """Most general substitution on free variables making f and g alpha
    equal, or None.  Fails when a binding would capture a bound variable."""
    subst = _unify(f, g, {}, {}, 0, Substitution({}))
    if subst is None:
        return None
    for term in subst.bindings.values():
        if _term_has_marker(term):
            return None
    return subst
