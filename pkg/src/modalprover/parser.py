"""Problem-file and formula parsing.

Problem files are s-expressions::

    (problem
      (agents a b ...)
      (times t0 t1 ...)
      (signature (pred P 1) (func f 2) ...)
      (assume <name> <formula>) ...
      (goal <formula>)
      [(answer ?x ...)])

Formula forms: ``(not f) (or f g ...) (and f g ...) (implies f g)
(forall (?x ...) f) (exists (?x ...) f) (believes a t f)
(ought a t cond duty) (goal-of a t f)`` and atoms ``(P t1 ...)``.
Variables carry a ``?`` sigil; times may also be written as integer
literals indexing the declared timeline.  ``;`` starts a comment; a
header comment ``; expect: proved`` records the expected verdict for the
corpus runner.

Every error raised here carries a line and column.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import (
    ArityError, ParseError, TimeOrderError, UndeclaredSymbolError,
)
from .syntax import (
    AgentSym, App, Atom, Believes, Const, Exists, Forall, Formula, Goal,
    Not, Or, And, Implies, Ought, ShadowAtom, Term, TimeSym, Var, canon,
    free_vars, render, render_term,
)

__all__ = [
    "Problem", "parse_problem", "parse_formula", "parse_term", "render",
    "render_term", "SymbolEnv",
]

KEYWORDS = {
    "problem", "agents", "times", "signature", "pred", "func", "assume",
    "goal", "answer", "not", "or", "and", "implies", "forall", "exists",
    "believes", "ought", "goal-of", "clause",
}

ANS_PRED = "#ans"

_SYMBOL_CHARS = set("abcdefghijklmnopqrstuvwxyz"
                    "ABCDEFGHIJKLMNOPQRSTUVWXYZ"
                    "0123456789-_'?*+=<>./!@$%&")


# --- tokenizer ---------------------------------------------------------

@dataclass(frozen=True)
class _Tok:
    kind: str  # ( ) } sym int shadow
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Tok]:
    toks: list[_Tok] = []
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
        elif ch in " \t\r":
            i += 1
            col += 1
        elif ch == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif ch == "(":
            toks.append(_Tok("(", "(", line, col))
            i += 1
            col += 1
        elif ch == ")":
            toks.append(_Tok(")", ")", line, col))
            i += 1
            col += 1
        elif ch == "}":
            toks.append(_Tok("}", "}", line, col))
            i += 1
            col += 1
        elif ch == "#":
            start_line, start_col = line, col
            j = i + 1
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            if word == ANS_PRED:
                toks.append(_Tok("sym", word, start_line, start_col))
                col += j - i
                i = j
            elif word.startswith("#shadow") and word[7:].isdigit() \
                    and j < n and text[j] == "{":
                toks.append(_Tok("shadow", word[7:], start_line, start_col))
                col += j - i + 1
                i = j + 1
            else:
                raise ParseError(f"unexpected token {word!r}", start_line, start_col)
        elif ch in _SYMBOL_CHARS:
            start_line, start_col = line, col
            j = i
            while j < n and text[j] in _SYMBOL_CHARS:
                j += 1
            word = text[i:j]
            kind = "int" if word.lstrip("-").isdigit() else "sym"
            toks.append(_Tok(kind, word, start_line, start_col))
            col += j - i
            i = j
        else:
            raise ParseError(f"unexpected character {ch!r}", line, col)
    return toks


# --- generic s-expression reader ---------------------------------------

@dataclass(frozen=True)
class SSym:
    text: str
    line: int
    col: int


@dataclass(frozen=True)
class SInt:
    value: int
    line: int
    col: int


@dataclass(frozen=True)
class SList:
    items: tuple
    line: int
    col: int


@dataclass(frozen=True)
class SShadow:
    atom_id: int
    body: "SNode"
    line: int
    col: int


SNode = SSym | SInt | SList | SShadow


class _Reader:
    def __init__(self, toks: list[_Tok]):
        self.toks = toks
        self.pos = 0

    def _peek(self) -> _Tok | None:
        return self.toks[self.pos] if self.pos < len(self.toks) else None

    def _next(self, expected: str) -> _Tok:
        t = self._peek()
        if t is None:
            last = self.toks[-1] if self.toks else _Tok("", "", 1, 1)
            raise ParseError(f"unexpected end of input, expected {expected}",
                             last.line, last.col)
        self.pos += 1
        return t

    def read(self) -> SNode:
        t = self._next("an expression")
        if t.kind == "sym":
            return SSym(t.text, t.line, t.col)
        if t.kind == "int":
            return SInt(int(t.text), t.line, t.col)
        if t.kind == "shadow":
            body = self.read()
            close = self._next("'}'")
            if close.kind != "}":
                raise ParseError("expected '}' closing shadow atom",
                                 close.line, close.col)
            return SShadow(int(t.text), body, t.line, t.col)
        if t.kind == "(":
            items = []
            while True:
                nxt = self._peek()
                if nxt is None:
                    raise ParseError("unclosed '('", t.line, t.col)
                if nxt.kind == ")":
                    self.pos += 1
                    return SList(tuple(items), t.line, t.col)
                items.append(self.read())
        raise ParseError(f"unexpected {t.text!r}", t.line, t.col)


def read_nodes(text: str) -> list[SNode]:
    reader = _Reader(_tokenize(text))
    nodes = []
    while reader._peek() is not None:
        nodes.append(reader.read())
    return nodes


# --- symbol environment -------------------------------------------------

@dataclass
class SymbolEnv:
    """Resolution context for formula parsing.

    Strict mode enforces the problem signature; lenient mode (used when
    reading formulae back out of proofs) accepts unseen predicate and
    function symbols, which covers Skolem symbols introduced during
    clausification.
    """

    agents: dict[str, AgentSym] = field(default_factory=dict)
    times: dict[str, TimeSym] = field(default_factory=dict)
    time_order: list[TimeSym] = field(default_factory=list)
    preds: dict[str, int] = field(default_factory=dict)
    funcs: dict[str, int] = field(default_factory=dict)
    strict: bool = True

    def time_by_index(self, idx: int, node: SNode) -> TimeSym:
        if 0 <= idx < len(self.time_order):
            return self.time_order[idx]
        raise UndeclaredSymbolError(f"no time with index {idx}",
                                    node.line, node.col)


def _want_sym(node: SNode, what: str) -> SSym:
    if not isinstance(node, SSym):
        raise ParseError(f"expected {what}", node.line, node.col)
    return node


def _check_name(sym: SSym, what: str) -> str:
    name = sym.text
    if name in KEYWORDS:
        raise ParseError(f"{what} may not be the keyword {name!r}",
                         sym.line, sym.col)
    if name.startswith("?") or name.startswith("#"):
        raise ParseError(f"{what} may not start with {name[0]!r}",
                         sym.line, sym.col)
    return name


# --- terms and formulae -------------------------------------------------

def _parse_term(node: SNode, env: SymbolEnv, bound: set[str]) -> Term:
    if isinstance(node, SSym):
        name = node.text
        if name.startswith("?"):
            return Var(name)
        if name in env.agents or name in env.times:
            return Const(name)
        if name in env.funcs:
            if env.funcs[name] != 0:
                raise ArityError(
                    f"function {name} has arity {env.funcs[name]}, used bare",
                    node.line, node.col)
            return Const(name)
        if env.strict:
            raise UndeclaredSymbolError(f"undeclared symbol {name}",
                                        node.line, node.col)
        return Const(name)
    if isinstance(node, SList):
        if not node.items:
            raise ParseError("empty term", node.line, node.col)
        head = _want_sym(node.items[0], "a function symbol")
        args = tuple(_parse_term(a, env, bound) for a in node.items[1:])
        if env.strict:
            if head.text not in env.funcs:
                raise UndeclaredSymbolError(f"undeclared function {head.text}",
                                            head.line, head.col)
            if env.funcs[head.text] != len(args):
                raise ArityError(
                    f"function {head.text} expects {env.funcs[head.text]} "
                    f"argument(s), got {len(args)}", head.line, head.col)
        if not args:
            return Const(head.text)
        return App(head.text, args)
    raise ParseError("expected a term", node.line, node.col)


def _parse_agent(node: SNode, env: SymbolEnv) -> AgentSym:
    sym = _want_sym(node, "an agent symbol")
    agent = env.agents.get(sym.text)
    if agent is None:
        raise UndeclaredSymbolError(f"undeclared agent {sym.text}",
                                    sym.line, sym.col)
    return agent


def _parse_time(node: SNode, env: SymbolEnv) -> TimeSym:
    if isinstance(node, SInt):
        return env.time_by_index(node.value, node)
    sym = _want_sym(node, "a time symbol")
    time = env.times.get(sym.text)
    if time is None:
        raise UndeclaredSymbolError(f"undeclared time {sym.text}",
                                    sym.line, sym.col)
    return time


def _parse_binders(node: SNode) -> list[str]:
    if not isinstance(node, SList) or not node.items:
        raise ParseError("expected a non-empty (?x ...) binder list",
                         node.line, node.col)
    out = []
    for item in node.items:
        sym = _want_sym(item, "a ?-variable")
        if not sym.text.startswith("?"):
            raise ParseError(f"binder {sym.text!r} must start with '?'",
                             sym.line, sym.col)
        out.append(sym.text)
    return out


def _parse_formula(node: SNode, env: SymbolEnv, bound: set[str]) -> Formula:
    if isinstance(node, SShadow):
        body = _parse_formula(node.body, env, bound)
        return ShadowAtom(node.atom_id, body, canon(body))
    if isinstance(node, SSym):
        # bare symbol in formula position: a 0-ary atom; rendering always
        # emits the parenthesized form
        name = node.text
        if name in KEYWORDS or name.startswith(("?", "#")):
            raise ParseError("expected a formula", node.line, node.col)
        if env.strict:
            if name not in env.preds:
                raise UndeclaredSymbolError(f"undeclared predicate {name}",
                                            node.line, node.col)
            if env.preds[name] != 0:
                raise ArityError(
                    f"predicate {name} expects {env.preds[name]} "
                    "argument(s), got 0", node.line, node.col)
        return Atom(name, ())
    if not isinstance(node, SList) or not node.items:
        raise ParseError("expected a formula", node.line, node.col)
    head_node = node.items[0]
    head = _want_sym(head_node, "a connective or predicate")
    args = node.items[1:]
    name = head.text

    if name == "not":
        if len(args) != 1:
            raise ParseError("not requires exactly one formula",
                             head.line, head.col)
        return Not(_parse_formula(args[0], env, bound))
    if name in ("or", "and"):
        if len(args) < 2:
            raise ParseError(f"{name} requires at least two formulae",
                             head.line, head.col)
        parts = [_parse_formula(a, env, bound) for a in args]
        cls = Or if name == "or" else And
        out = parts[-1]
        for p in reversed(parts[:-1]):
            out = cls(p, out)
        return out
    if name == "implies":
        if len(args) != 2:
            raise ParseError("implies requires exactly two formulae",
                             head.line, head.col)
        return Implies(_parse_formula(args[0], env, bound),
                       _parse_formula(args[1], env, bound))
    if name in ("forall", "exists"):
        if len(args) != 2:
            raise ParseError(f"{name} requires a binder list and a body",
                             head.line, head.col)
        binders = _parse_binders(args[0])
        body = _parse_formula(args[1], env, bound | set(binders))
        cls = Forall if name == "forall" else Exists
        for v in reversed(binders):
            body = cls(v, body)
        return body
    if name == "believes":
        if len(args) != 3:
            raise ParseError("believes requires agent, time, body",
                             head.line, head.col)
        return Believes(_parse_agent(args[0], env), _parse_time(args[1], env),
                        _parse_formula(args[2], env, bound))
    if name == "ought":
        if len(args) != 4:
            raise ParseError("ought requires agent, time, condition, duty",
                             head.line, head.col)
        return Ought(_parse_agent(args[0], env), _parse_time(args[1], env),
                     _parse_formula(args[2], env, bound),
                     _parse_formula(args[3], env, bound))
    if name == "goal-of":
        if len(args) != 3:
            raise ParseError("goal-of requires agent, time, body",
                             head.line, head.col)
        return Goal(_parse_agent(args[0], env), _parse_time(args[1], env),
                    _parse_formula(args[2], env, bound))

    # atom
    if name in KEYWORDS:
        raise ParseError(f"misplaced keyword {name!r}", head.line, head.col)
    if name.startswith("?"):
        raise ParseError("a variable cannot head an atom", head.line, head.col)
    terms = tuple(_parse_term(a, env, bound) for a in args)
    if env.strict or name != ANS_PRED:
        if name.startswith("#"):
            raise ParseError(f"unexpected token {name!r}", head.line, head.col)
    if env.strict:
        if name not in env.preds:
            raise UndeclaredSymbolError(f"undeclared predicate {name}",
                                        head.line, head.col)
        if env.preds[name] != len(terms):
            raise ArityError(
                f"predicate {name} expects {env.preds[name]} argument(s), "
                f"got {len(terms)}", head.line, head.col)
    return Atom(name, terms)


# --- problems -----------------------------------------------------------

@dataclass
class Problem:
    agents: list[AgentSym]
    times: list[TimeSym]
    predicates: dict[str, int]
    functions: dict[str, int]
    assumptions: list[tuple[str, Formula]]
    goal: Formula
    query_vars: list[str]
    expect: str | None = None
    expect_answers: int | None = None
    limit_overrides: dict[str, int] = field(default_factory=dict)

    def env(self, strict: bool = True) -> SymbolEnv:
        return SymbolEnv(
            agents={a.name: a for a in self.agents},
            times={t.name: t for t in self.times},
            time_order=list(self.times),
            preds=dict(self.predicates),
            funcs=dict(self.functions),
            strict=strict,
        )


_LIMIT_KEYS = {"max-iterations", "max-clauses", "timeout-ms", "max-depth",
               "max-answers"}


def _scan_expect(text: str) -> tuple[str | None, int | None, dict[str, int]]:
    expect = None
    expect_answers = None
    overrides: dict[str, int] = {}
    for raw in text.splitlines():
        line = raw.strip()
        if not line.startswith(";"):
            continue
        body = line.lstrip(";").strip()
        if body.startswith("expect-answers:"):
            expect_answers = int(body.split(":", 1)[1].strip())
        elif body.startswith("expect:"):
            expect = body.split(":", 1)[1].strip()
        elif body.startswith("limits:"):
            parts = body.split(":", 1)[1].split()
            for key, value in zip(parts[::2], parts[1::2]):
                if key in _LIMIT_KEYS:
                    overrides[key] = int(value)
    return expect, expect_answers, overrides


def _parse_signature(node: SList, env: SymbolEnv) -> None:
    for item in node.items[1:]:
        if not isinstance(item, SList) or len(item.items) != 3:
            raise ParseError("expected (pred NAME ARITY) or (func NAME ARITY)",
                             item.line, item.col)
        kind = _want_sym(item.items[0], "pred or func")
        sym = _want_sym(item.items[1], "a symbol name")
        name = _check_name(sym, "a signature symbol")
        arity_node = item.items[2]
        if not isinstance(arity_node, SInt) or arity_node.value < 0:
            raise ParseError("arity must be a non-negative integer",
                             arity_node.line, arity_node.col)
        if name in env.preds or name in env.funcs or name in env.agents \
                or name in env.times:
            raise ParseError(f"duplicate declaration of {name}",
                             sym.line, sym.col)
        if kind.text == "pred":
            env.preds[name] = arity_node.value
        elif kind.text == "func":
            env.funcs[name] = arity_node.value
        else:
            raise ParseError("expected pred or func", kind.line, kind.col)


def parse_problem(text: str) -> Problem:
    nodes = read_nodes(text)
    if len(nodes) != 1:
        if not nodes:
            raise ParseError("empty input", 1, 1)
        extra = nodes[1]
        raise ParseError("expected a single (problem ...) form",
                         extra.line, extra.col)
    top = nodes[0]
    if not isinstance(top, SList) or not top.items \
            or not isinstance(top.items[0], SSym) \
            or top.items[0].text != "problem":
        raise ParseError("expected (problem ...)", top.line, top.col)

    env = SymbolEnv()
    assumptions: list[tuple[str, Formula]] = []
    goal: Formula | None = None
    query_vars: list[str] = []
    seen: set[str] = set()
    seen_names: set[str] = set()

    for section in top.items[1:]:
        if not isinstance(section, SList) or not section.items:
            raise ParseError("expected a (keyword ...) section",
                             section.line, section.col)
        head = _want_sym(section.items[0], "a section keyword")
        kind = head.text

        if kind in ("agents", "times", "signature"):
            if assumptions or goal is not None:
                raise ParseError(f"({kind} ...) must precede assumptions",
                                 head.line, head.col)
            if kind in seen:
                raise ParseError(f"duplicate ({kind} ...) section",
                                 head.line, head.col)
            seen.add(kind)

        if kind == "agents":
            for item in section.items[1:]:
                sym = _want_sym(item, "an agent name")
                name = _check_name(sym, "an agent")
                if name in env.agents or name in env.preds or name in env.funcs:
                    raise ParseError(f"duplicate declaration of {name}",
                                     sym.line, sym.col)
                env.agents[name] = AgentSym(name)
        elif kind == "times":
            for item in section.items[1:]:
                sym = _want_sym(item, "a time name")
                name = _check_name(sym, "a time")
                if name in env.times:
                    raise TimeOrderError(f"time {name} declared twice",
                                         sym.line, sym.col)
                if name in env.agents or name in env.preds or name in env.funcs:
                    raise ParseError(f"duplicate declaration of {name}",
                                     sym.line, sym.col)
                t = TimeSym(len(env.time_order), name)
                env.times[name] = t
                env.time_order.append(t)
        elif kind == "signature":
            _parse_signature(section, env)
        elif kind == "assume":
            if goal is not None:
                raise ParseError("assumptions must precede the goal",
                                 head.line, head.col)
            if len(section.items) != 3:
                raise ParseError("expected (assume NAME FORMULA)",
                                 head.line, head.col)
            name_sym = _want_sym(section.items[1], "an assumption name")
            if name_sym.text in seen_names:
                raise ParseError(f"duplicate assumption name {name_sym.text}",
                                 name_sym.line, name_sym.col)
            seen_names.add(name_sym.text)
            f = _parse_formula(section.items[2], env, set())
            fv = free_vars(f)
            if fv:
                raise ParseError(
                    f"assumption {name_sym.text} must be closed; "
                    f"free {', '.join(sorted(fv))}",
                    section.items[2].line, section.items[2].col)
            assumptions.append((name_sym.text, f))
        elif kind == "goal":
            if goal is not None:
                raise ParseError("duplicate goal", head.line, head.col)
            if len(section.items) != 2:
                raise ParseError("expected (goal FORMULA)", head.line, head.col)
            goal = _parse_formula(section.items[1], env, set())
            goal_node = section.items[1]
        elif kind == "answer":
            if goal is None:
                raise ParseError("(answer ...) must follow the goal",
                                 head.line, head.col)
            for item in section.items[1:]:
                sym = _want_sym(item, "a ?-variable")
                if not sym.text.startswith("?"):
                    raise ParseError("answer variables must start with '?'",
                                     sym.line, sym.col)
                if sym.text in query_vars:
                    raise ParseError(f"duplicate answer variable {sym.text}",
                                     sym.line, sym.col)
                query_vars.append(sym.text)
        else:
            raise ParseError(f"unknown section {kind!r}", head.line, head.col)

    if goal is None:
        raise ParseError("missing (goal ...)", top.line, top.col)
    fv = free_vars(goal)
    if set(query_vars) != fv:
        if query_vars:
            raise ParseError(
                "goal free variables must equal the declared answer "
                f"variables; free: {sorted(fv)}, declared: {query_vars}",
                goal_node.line, goal_node.col)
        raise ParseError(
            f"goal must be closed (or declare (answer ...)); "
            f"free {', '.join(sorted(fv))}", goal_node.line, goal_node.col)

    expect, expect_answers, overrides = _scan_expect(text)
    return Problem(
        agents=list(env.agents.values()),
        times=list(env.time_order),
        predicates=dict(env.preds),
        functions=dict(env.funcs),
        assumptions=assumptions,
        goal=goal,
        query_vars=query_vars,
        expect=expect,
        expect_answers=expect_answers,
        limit_overrides=overrides,
    )


def parse_formula(text: str, problem: Problem | SymbolEnv,
                  lenient: bool = False) -> Formula:
    """Parse one formula against a problem's symbol declarations."""
    env = problem.env(strict=not lenient) if isinstance(problem, Problem) \
        else problem
    nodes = read_nodes(text)
    if len(nodes) != 1:
        raise ParseError("expected exactly one formula", 1, 1)
    return _parse_formula(nodes[0], env, set())


def parse_term(text: str, problem: Problem | SymbolEnv,
               lenient: bool = True) -> Term:
    env = problem.env(strict=not lenient) if isinstance(problem, Problem) \
        else problem
    nodes = read_nodes(text)
    if len(nodes) != 1:
        raise ParseError("expected exactly one term", 1, 1)
    return _parse_term(nodes[0], env, set())
