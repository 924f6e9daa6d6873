"""Resolution-based reasoner for agent- and time-indexed belief,
obligation, and goal modalities.

The public surface: parse a problem, call :func:`prove` or :func:`answer`,
render or re-check the returned proof.
"""

from .checker import CheckResult, check
from .engine import (
    ANSWERED, EXHAUSTED, FAILED, PROVED, AnswerEntry, AnswerResult,
    KnowledgeBase, ModalLimits, ProveResult, answer, apply_IB, apply_IO,
    expand_contexts, promote_belief, prove,
)
from .errors import (
    ArityError, FreeVariableError, ModalNodeError, ParseError, ReasonerError,
    TimeError, TimeOrderError, UndeclaredSymbolError, UsageError,
)
from .parser import Problem, parse_formula, parse_problem, parse_term, render
from .proof import (
    Proof, ProofStats, ProofStep, parse_proof_json, render_json, render_text,
)
from .saturation import FoLimits, prove_answer, prove_fo, resolve
from .shadowing import AtomTable, atomize, shadow, shadow_set, unshadow
from .syntax import (
    AgentSym, And, App, Atom, Believes, Const, Exists, Forall, Formula, Goal,
    Implies, Not, Or, Ought, ShadowAtom, Term, TimeSym, Var, alpha_equal,
    canon, desugar, level,
)
from .unification import Substitution, unify

__version__ = "0.1.0"
