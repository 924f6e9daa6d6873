"""Flag defaults must equal the engine's documented defaults."""

from modalprover.cli import build_parser
from modalprover.engine import ModalLimits
from modalprover.saturation import FoLimits


def test_flag_defaults_match_engine_defaults():
    args = build_parser().parse_args(["prove", "dummy.sxp"])
    modal = ModalLimits()
    fo = FoLimits()
    assert args.max_iterations == modal.max_outer_iterations
    assert args.max_depth == modal.max_nesting_depth
    assert args.max_answers == modal.max_answers
    assert args.max_clauses == fo.max_clauses
    assert args.timeout_ms == fo.timeout_ms


def test_bare_atom_input_accepted_and_rendered_canonically():
    from modalprover.parser import parse_problem, render
    from modalprover.syntax import Atom, Or
    p = parse_problem(
        "(problem (signature (pred P 0) (pred Q 0)) (goal (or P Q)))")
    assert p.goal == Or(Atom("P"), Atom("Q"))
    assert render(p.goal) == "(or (P) (Q))"
