"""Shadowing: collapsing subformulae above a target level into
propositional stand-ins so the first-order prover can run on the rest.

The replacement is outermost-first: once a subformula is swapped for its
shadow atom, its interior is never scanned, so nested modal operators
become a single atom.  Atoms are interned per :class:`AtomTable`, keyed by
alpha-canonical form, which makes identical (up to bound-variable
renaming) subformulae collide to the same atom across an entire formula
set.
"""

from __future__ import annotations

import threading
from typing import Iterable

from .errors import FreeVariableError
from .syntax import (
    Atom, Believes, Exists, Forall, Formula, Goal, Not, Or, And, Implies,
    Ought, ShadowAtom, canon, free_vars, _intrinsic,
)


class AtomTable:
    """Interning table from closed formulae to shadow atoms.

    Behaves as a single atomic map (insert-if-absent); safe to share
    between threads.
    """

    def __init__(self) -> None:
        self._by_canon: dict[str, ShadowAtom] = {}
        self._by_id: dict[int, Formula] = {}
        self._lock = threading.Lock()

    def atomize(self, f: Formula) -> ShadowAtom:
        fv = free_vars(f)
        if fv:
            raise FreeVariableError(fv, "atomize")
        key = canon(f)
        with self._lock:
            atom = self._by_canon.get(key)
            if atom is None:
                atom = ShadowAtom(len(self._by_canon) + 1, f, key)
                self._by_canon[key] = atom
                self._by_id[atom.atom_id] = f
        return atom

    def expand(self, atom_id: int) -> Formula:
        """Reverse mapping, kept for proof rendering."""
        return self._by_id[atom_id]

    def __len__(self) -> int:
        return len(self._by_canon)


def atomize(f: Formula, table: AtomTable | None = None) -> ShadowAtom:
    return (table or AtomTable()).atomize(f)


def shadow(f: Formula, lvl: int, table: AtomTable | None = None) -> Formula:
    """Replace every maximal subformula whose level exceeds ``lvl`` with
    its shadow atom.  level(shadow(f, lvl)) <= lvl; shadow(f, 2) == f."""
    if table is None:
        table = AtomTable()
    return _shadow(f, lvl, table)


def _shadow(f: Formula, lvl: int, table: AtomTable) -> Formula:
    if _intrinsic(f) > lvl:
        return table.atomize(f)
    if isinstance(f, (Atom, ShadowAtom)):
        return f
    if isinstance(f, Not):
        return Not(_shadow(f.body, lvl, table))
    if isinstance(f, Or):
        return Or(_shadow(f.left, lvl, table), _shadow(f.right, lvl, table))
    if isinstance(f, And):
        return And(_shadow(f.left, lvl, table), _shadow(f.right, lvl, table))
    if isinstance(f, Implies):
        return Implies(_shadow(f.left, lvl, table), _shadow(f.right, lvl, table))
    if isinstance(f, Forall):
        return Forall(f.var, _shadow(f.body, lvl, table))
    if isinstance(f, Exists):
        return Exists(f.var, _shadow(f.body, lvl, table))
    # Modal nodes are intrinsic level 2: only reachable here when lvl == 2,
    # where shadowing is the identity.
    if isinstance(f, (Believes, Ought, Goal)):
        return f
    raise TypeError(f"not a formula: {f!r}")


def shadow_set(formulas: Iterable[Formula], lvl: int,
               table: AtomTable | None = None) -> list[Formula]:
    """Element-wise shadow with one shared interning table."""
    if table is None:
        table = AtomTable()
    return [_shadow(f, lvl, table) for f in formulas]


def unshadow(f: Formula) -> Formula:
    """Expand every shadow atom back to the formula it stands for."""
    if isinstance(f, ShadowAtom):
        return f.body
    if isinstance(f, Atom):
        return f
    if isinstance(f, Not):
        return Not(unshadow(f.body))
    if isinstance(f, Or):
        return Or(unshadow(f.left), unshadow(f.right))
    if isinstance(f, And):
        return And(unshadow(f.left), unshadow(f.right))
    if isinstance(f, Implies):
        return Implies(unshadow(f.left), unshadow(f.right))
    if isinstance(f, Forall):
        return Forall(f.var, unshadow(f.body))
    if isinstance(f, Exists):
        return Exists(f.var, unshadow(f.body))
    if isinstance(f, Believes):
        return Believes(f.agent, f.time, unshadow(f.body))
    if isinstance(f, Ought):
        return Ought(f.agent, f.time, unshadow(f.condition), unshadow(f.duty))
    if isinstance(f, Goal):
        return Goal(f.agent, f.time, unshadow(f.body))
    raise TypeError(f"not a formula: {f!r}")
