"""Terms and formulae of the modal language.

The surface language is first-order logic extended with three operators
indexed by an agent and a time symbol: ``believes``, ``ought`` (conditional
obligation) and ``goal-of``.  ``and``/``implies``/``exists`` are surface
sugar over the core connectives {not, or, forall}; :func:`desugar` rewrites
them away without ever moving material across a modal boundary.

Every value here is immutable and hashable.  Alpha-equivalence is decided
through :func:`canon`, which renders a formula with bound variables
renumbered in binder order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import total_ordering

from .errors import FreeVariableError


@dataclass(frozen=True)
class AgentSym:
    name: str

    def __str__(self) -> str:
        return self.name


@total_ordering
@dataclass(frozen=True)
class TimeSym:
    """A point in the problem's totally ordered timeline.

    Ordering (and therefore belief promotion) is by ``index``; ``name`` is
    only for display.
    """

    index: int
    name: str

    def __lt__(self, other: "TimeSym") -> bool:
        return self.index < other.index

    def __str__(self) -> str:
        return self.name


# --- terms -------------------------------------------------------------

@dataclass(frozen=True)
class Var:
    name: str  # includes the '?' sigil, e.g. "?x"


@dataclass(frozen=True)
class Const:
    name: str


@dataclass(frozen=True)
class App:
    fn: str
    args: tuple["Term", ...]


Term = Var | Const | App


# --- formulae ----------------------------------------------------------

@dataclass(frozen=True)
class Atom:
    pred: str
    args: tuple[Term, ...] = ()


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Forall:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class Believes:
    agent: AgentSym
    time: TimeSym
    body: "Formula"


@dataclass(frozen=True)
class Ought:
    """Conditional obligation: when ``condition`` holds, ``duty`` is owed."""

    agent: AgentSym
    time: TimeSym
    condition: "Formula"
    duty: "Formula"


@dataclass(frozen=True)
class Goal:
    agent: AgentSym
    time: TimeSym
    body: "Formula"


@dataclass(frozen=True)
class ShadowAtom:
    """Propositional stand-in for a closed formula.

    Compares (and hashes) by the alpha-canonical form of the formula it
    stands for, so two tables that atomize alpha-variants independently
    still produce equal atoms.  ``atom_id`` is display/interning metadata.
    """

    atom_id: int = field(compare=False)
    body: "Formula" = field(compare=False)
    canon_key: str

    def __post_init__(self) -> None:
        # equality rides on canon_key, so a stale key would let distinct
        # formulae collide; reject the inconsistency at construction
        if self.canon_key != canon(self.body):
            raise ValueError("shadow atom key does not match its formula")

    @property
    def pred(self) -> str:
        return f"#shadow{self.atom_id}"


Formula = (
    Atom | Not | Or | And | Implies | Forall | Exists
    | Believes | Ought | Goal | ShadowAtom
)

MODAL_NODES = (Believes, Ought, Goal)


# --- rendering ---------------------------------------------------------

def render_term(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Const):
        return t.name
    if not t.args:
        return f"({t.fn})"
    return "(" + t.fn + " " + " ".join(render_term(a) for a in t.args) + ")"


def render(f: Formula) -> str:
    """S-expression text for a formula; inverse of the parser."""
    if isinstance(f, Atom):
        if not f.args:
            return f"({f.pred})"
        return "(" + f.pred + " " + " ".join(render_term(a) for a in f.args) + ")"
    if isinstance(f, ShadowAtom):
        return f"#shadow{f.atom_id}{{{render(f.body)}}}"
    if isinstance(f, Not):
        return f"(not {render(f.body)})"
    if isinstance(f, Or):
        return f"(or {render(f.left)} {render(f.right)})"
    if isinstance(f, And):
        return f"(and {render(f.left)} {render(f.right)})"
    if isinstance(f, Implies):
        return f"(implies {render(f.left)} {render(f.right)})"
    if isinstance(f, Forall):
        return f"(forall ({f.var}) {render(f.body)})"
    if isinstance(f, Exists):
        return f"(exists ({f.var}) {render(f.body)})"
    if isinstance(f, Believes):
        return f"(believes {f.agent.name} {f.time.name} {render(f.body)})"
    if isinstance(f, Ought):
        return (f"(ought {f.agent.name} {f.time.name} "
                f"{render(f.condition)} {render(f.duty)})")
    if isinstance(f, Goal):
        return f"(goal-of {f.agent.name} {f.time.name} {render(f.body)})"
    raise TypeError(f"not a formula: {f!r}")


def _canon_term(t: Term, env: dict[str, str]) -> str:
    if isinstance(t, Var):
        return env.get(t.name, t.name)
    if isinstance(t, Const):
        return t.name
    inner = " ".join(_canon_term(a, env) for a in t.args)
    return f"({t.fn} {inner})" if inner else f"({t.fn})"


def _canon(f: Formula, env: dict[str, str], depth: int) -> str:
    if isinstance(f, Atom):
        inner = " ".join(_canon_term(a, env) for a in f.args)
        return f"({f.pred} {inner})" if inner else f"({f.pred})"
    if isinstance(f, ShadowAtom):
        return f"#shadow{{{f.canon_key}}}"
    if isinstance(f, Not):
        return f"(not {_canon(f.body, env, depth)})"
    if isinstance(f, Or):
        return f"(or {_canon(f.left, env, depth)} {_canon(f.right, env, depth)})"
    if isinstance(f, And):
        return f"(and {_canon(f.left, env, depth)} {_canon(f.right, env, depth)})"
    if isinstance(f, Implies):
        return (f"(implies {_canon(f.left, env, depth)} "
                f"{_canon(f.right, env, depth)})")
    if isinstance(f, (Forall, Exists)):
        tag = "forall" if isinstance(f, Forall) else "exists"
        fresh = f"?.{depth}"
        env2 = dict(env)
        env2[f.var] = fresh
        return f"({tag} ({fresh}) {_canon(f.body, env2, depth + 1)})"
    if isinstance(f, Believes):
        return (f"(believes {f.agent.name} {f.time.name} "
                f"{_canon(f.body, env, depth)})")
    if isinstance(f, Ought):
        return (f"(ought {f.agent.name} {f.time.name} "
                f"{_canon(f.condition, env, depth)} {_canon(f.duty, env, depth)})")
    if isinstance(f, Goal):
        return (f"(goal-of {f.agent.name} {f.time.name} "
                f"{_canon(f.body, env, depth)})")
    raise TypeError(f"not a formula: {f!r}")


def canon(f: Formula) -> str:
    """Alpha-canonical rendering: bound variables renamed by binder order.

    Two formulae are alpha-equivalent iff their canon strings are equal.
    """
    return _canon(f, {}, 0)


def alpha_equal(f: Formula, g: Formula) -> bool:
    return canon(f) == canon(g)


# --- traversals --------------------------------------------------------

def children(f: Formula) -> tuple[Formula, ...]:
    if isinstance(f, (Atom, ShadowAtom)):
        return ()
    if isinstance(f, Not):
        return (f.body,)
    if isinstance(f, (Or, And, Implies)):
        return (f.left, f.right)
    if isinstance(f, (Forall, Exists)):
        return (f.body,)
    if isinstance(f, (Believes, Goal)):
        return (f.body,)
    if isinstance(f, Ought):
        return (f.condition, f.duty)
    raise TypeError(f"not a formula: {f!r}")


def subformulas(f: Formula):
    """Preorder iterator over all subformulae, f itself included."""
    yield f
    for c in children(f):
        yield from subformulas(c)


def believes_subformulas(f: Formula) -> list[Believes]:
    return [g for g in subformulas(f) if isinstance(g, Believes)]


def term_vars(t: Term) -> set[str]:
    if isinstance(t, Var):
        return {t.name}
    if isinstance(t, Const):
        return set()
    out: set[str] = set()
    for a in t.args:
        out |= term_vars(a)
    return out


def free_vars(f: Formula) -> set[str]:
    if isinstance(f, Atom):
        out: set[str] = set()
        for a in f.args:
            out |= term_vars(a)
        return out
    if isinstance(f, ShadowAtom):
        return set()
    if isinstance(f, (Forall, Exists)):
        return free_vars(f.body) - {f.var}
    out = set()
    for c in children(f):
        out |= free_vars(c)
    return out


def is_closed(f: Formula) -> bool:
    return not free_vars(f)


# --- level -------------------------------------------------------------

def _intrinsic(f: Formula) -> int:
    """Stratum contributed by the node itself, ignoring its children."""
    if isinstance(f, MODAL_NODES):
        return 2
    if isinstance(f, (Forall, Exists)):
        return 1
    if isinstance(f, Atom):
        return 1 if f.args else 0
    return 0  # connectives and shadow atoms


def level(f: Formula) -> int:
    """Syntactic stratum: 0 propositional, 1 first-order, 2 modal."""
    best = _intrinsic(f)
    if best == 2:
        return 2
    for c in children(f):
        best = max(best, level(c))
        if best == 2:
            return 2
    return best


# --- substitution and desugaring --------------------------------------

def subst_term(t: Term, mapping: dict[str, Term]) -> Term:
    if isinstance(t, Var):
        return mapping.get(t.name, t)
    if isinstance(t, Const):
        return t
    return App(t.fn, tuple(subst_term(a, mapping) for a in t.args))


def _vars_in_range(mapping: dict[str, Term]) -> set[str]:
    out: set[str] = set()
    for t in mapping.values():
        out |= term_vars(t)
    return out


def subst_formula(f: Formula, mapping: dict[str, Term]) -> Formula:
    """Capture-avoiding substitution of terms for free variables."""
    if not mapping:
        return f
    if isinstance(f, Atom):
        return Atom(f.pred, tuple(subst_term(a, mapping) for a in f.args))
    if isinstance(f, ShadowAtom):
        return f
    if isinstance(f, Not):
        return Not(subst_formula(f.body, mapping))
    if isinstance(f, Or):
        return Or(subst_formula(f.left, mapping), subst_formula(f.right, mapping))
    if isinstance(f, And):
        return And(subst_formula(f.left, mapping), subst_formula(f.right, mapping))
    if isinstance(f, Implies):
        return Implies(subst_formula(f.left, mapping),
                       subst_formula(f.right, mapping))
    if isinstance(f, (Forall, Exists)):
        inner = {k: v for k, v in mapping.items() if k != f.var}
        if not inner:
            return f
        var = f.var
        body = f.body
        if var in _vars_in_range(inner):
            fresh = var + "'"
            taken = free_vars(body) | _vars_in_range(inner) | set(inner)
            while fresh in taken:
                fresh += "'"
            body = subst_formula(body, {var: Var(fresh)})
            var = fresh
        cls = Forall if isinstance(f, Forall) else Exists
        return cls(var, subst_formula(body, inner))
    if isinstance(f, Believes):
        return Believes(f.agent, f.time, subst_formula(f.body, mapping))
    if isinstance(f, Ought):
        return Ought(f.agent, f.time, subst_formula(f.condition, mapping),
                     subst_formula(f.duty, mapping))
    if isinstance(f, Goal):
        return Goal(f.agent, f.time, subst_formula(f.body, mapping))
    raise TypeError(f"not a formula: {f!r}")


def desugar(f: Formula) -> Formula:
    """Rewrite and/implies/exists into {not, or, forall}, recursing into
    modal bodies but never across a modal boundary."""
    if isinstance(f, (Atom, ShadowAtom)):
        return f
    if isinstance(f, Not):
        return Not(desugar(f.body))
    if isinstance(f, Or):
        return Or(desugar(f.left), desugar(f.right))
    if isinstance(f, And):
        return Not(Or(Not(desugar(f.left)), Not(desugar(f.right))))
    if isinstance(f, Implies):
        return Or(Not(desugar(f.left)), desugar(f.right))
    if isinstance(f, Forall):
        return Forall(f.var, desugar(f.body))
    if isinstance(f, Exists):
        return Not(Forall(f.var, Not(desugar(f.body))))
    if isinstance(f, Believes):
        return Believes(f.agent, f.time, desugar(f.body))
    if isinstance(f, Ought):
        return Ought(f.agent, f.time, desugar(f.condition), desugar(f.duty))
    if isinstance(f, Goal):
        return Goal(f.agent, f.time, desugar(f.body))
    raise TypeError(f"not a formula: {f!r}")


# --- small constructors used across the engine -------------------------

def disjunction_of(parts: list[Formula]) -> Formula:
    """Right-fold a non-empty list into nested Or nodes."""
    if not parts:
        raise ValueError("empty disjunction has no formula form")
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = Or(p, out)
    return out


def forall_close(f: Formula) -> Formula:
    """Universally close a formula over its free variables (sorted by name)."""
    for v in sorted(free_vars(f), reverse=True):
        f = Forall(v, f)
    return f


def require_closed(f: Formula, context: str) -> None:
    fv = free_vars(f)
    if fv:
        raise FreeVariableError(fv, context)
