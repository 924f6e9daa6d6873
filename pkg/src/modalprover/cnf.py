"""Clausification: negation normal form, Skolemization, distribution.

Skolem names are interned per (source formula, position) through
:class:`SkolemNamer`, so converting the same formula twice yields
byte-identical clauses.  The knowledge base relies on this: re-derived
formulae must collide with their earlier copies for the expansion
fixpoint test to hold.
"""

from __future__ import annotations

from .clauses import Clause, Literal, Origin
from .errors import ModalNodeError
from .syntax import (
    And, App, Atom, Const, Exists, Forall, Formula, Implies, Not, Or,
    ShadowAtom, Var, canon, free_vars, level, subformulas, term_vars,
)

MODAL = ("believes", "ought", "goal-of")


class SkolemNamer:
    """Deterministic, collision-free Skolem symbol supply."""

    def __init__(self, reserved: set[str] | None = None):
        self.reserved = set(reserved or ())
        self._names: dict[tuple[str, int], str] = {}
        self._count = 0

    def name(self, source_key: str, seq: int) -> str:
        key = (source_key, seq)
        got = self._names.get(key)
        if got is None:
            while True:
                self._count += 1
                got = f"sk{self._count}"
                if got not in self.reserved:
                    break
            self._names[key] = got
        return got


def _nnf(f: Formula, positive: bool, rename: dict[str, str],
         fresh: "_FreshVars") -> Formula:
    if isinstance(f, (Atom, ShadowAtom)):
        if isinstance(f, Atom) and f.args:
            sub = {old: Var(new) for old, new in rename.items()}
            if sub:
                from .syntax import subst_term
                f = Atom(f.pred, tuple(subst_term(a, sub) for a in f.args))
        return f if positive else Not(f)
    if isinstance(f, Not):
        return _nnf(f.body, not positive, rename, fresh)
    if isinstance(f, Or):
        cls = Or if positive else And
        return cls(_nnf(f.left, positive, rename, fresh),
                   _nnf(f.right, positive, rename, fresh))
    if isinstance(f, And):
        cls = And if positive else Or
        return cls(_nnf(f.left, positive, rename, fresh),
                   _nnf(f.right, positive, rename, fresh))
    if isinstance(f, Implies):
        cls = Or if positive else And
        return cls(_nnf(f.left, not positive, rename, fresh),
                   _nnf(f.right, positive, rename, fresh))
    if isinstance(f, (Forall, Exists)):
        universal = isinstance(f, Forall) == positive
        new = fresh.next()
        rename2 = dict(rename)
        rename2[f.var] = new
        body = _nnf(f.body, positive, rename2, fresh)
        return Forall(new, body) if universal else Exists(new, body)
    raise ModalNodeError(f"modal node reached the first-order layer: {f!r}")


class _FreshVars:
    def __init__(self, taken: set[str]):
        self.taken = set(taken)
        self.n = 0

    def next(self) -> str:
        while True:
            self.n += 1
            cand = f"?v{self.n}"
            if cand not in self.taken:
                self.taken.add(cand)
                return cand


def _skolemize(f: Formula, universals: list[str], namer: SkolemNamer,
               source_key: str, counter: list[int]) -> Formula:
    if isinstance(f, (Atom, ShadowAtom, Not)):
        return f
    if isinstance(f, (Or, And)):
        cls = type(f)
        return cls(_skolemize(f.left, universals, namer, source_key, counter),
                   _skolemize(f.right, universals, namer, source_key, counter))
    if isinstance(f, Forall):
        return Forall(f.var, _skolemize(f.body, universals + [f.var], namer,
                                        source_key, counter))
    if isinstance(f, Exists):
        counter[0] += 1
        name = namer.name(source_key, counter[0])
        term = Const(name) if not universals \
            else App(name, tuple(Var(u) for u in universals))
        from .syntax import subst_formula
        body = subst_formula(f.body, {f.var: term})
        return _skolemize(body, universals, namer, source_key, counter)
    raise ModalNodeError(f"unexpected node during skolemization: {f!r}")


def _drop_foralls(f: Formula) -> Formula:
    if isinstance(f, Forall):
        return _drop_foralls(f.body)
    if isinstance(f, (Or, And)):
        return type(f)(_drop_foralls(f.left), _drop_foralls(f.right))
    return f


def _distribute(f: Formula) -> list[list[Literal]]:
    if isinstance(f, And):
        return _distribute(f.left) + _distribute(f.right)
    if isinstance(f, Or):
        return [a + b
                for a in _distribute(f.left)
                for b in _distribute(f.right)]
    if isinstance(f, Not):
        return [[Literal(False, f.body)]]
    if isinstance(f, (Atom, ShadowAtom)):
        return [[Literal(True, f)]]
    raise ModalNodeError(f"unexpected node during distribution: {f!r}")


def cnf(f: Formula, namer: SkolemNamer | None = None,
        source_key: str | None = None,
        origin: Origin | None = None) -> list[Clause]:
    """Equisatisfiable clause set for a first-order (level <= 1) formula."""
    if level(f) > 1:
        raise ModalNodeError(f"cannot clausify a modal formula: {canon(f)}")
    if namer is None:
        namer = SkolemNamer()
    if source_key is None:
        source_key = canon(f)

    taken: set[str] = set()
    for g in subformulas(f):
        if isinstance(g, (Forall, Exists)):
            taken.add(g.var)
        elif isinstance(g, Atom):
            for t in g.args:
                taken |= term_vars(t)
    rename = {v: v for v in free_vars(f)}

    nnf = _nnf(f, True, rename, _FreshVars(taken))
    sko = _skolemize(nnf, [], namer, source_key, [0])
    matrix = _drop_foralls(sko)

    out: list[Clause] = []
    seen: set[Clause] = set()
    for lits in _distribute(matrix):
        cl = Clause.make(lits, origin=origin)
        if cl.is_tautology() or cl in seen:
            continue
        seen.add(cl)
        out.append(cl)
    return out
