"""Model checking for timed concurrent state machines."""

__version__ = "0.1.0"

from .errors import ModelError, RegionBudgetExceeded, TcsmError
from .formula import (
    FALSE,
    TRUE,
    Atom,
    evaluate,
    is_unsatisfiable,
    output_formula,
    parse_formula,
    reduce_formula,
    to_text,
)
from .csm import CsmAutomaton, check_complete, product_csm, reachability_graph, successors
from .clock import ClockConstraint, Region, parse_constraint, region_of, time_successor
from .tcsm import TcsmAutomaton, TimedTransition, check_timed_complete, product_tcsm
from .rcsm import (
    RcsmAutomaton,
    RState,
    build_rcsm,
    canonical_compare,
    check_zero_time_trap,
    product_rcsm,
)
from .modelio import parse_model, read_model, serialize_automaton, serialize_model
from .verify import attach_signal, check_safety, format_witness
from .dot import export_dot

__all__ = [
    "FALSE", "TRUE", "Atom", "evaluate", "is_unsatisfiable", "output_formula",
    "parse_formula", "reduce_formula", "to_text",
    "CsmAutomaton", "check_complete", "product_csm", "reachability_graph", "successors",
    "ClockConstraint", "Region", "parse_constraint", "region_of", "time_successor",
    "TcsmAutomaton", "TimedTransition", "check_timed_complete", "product_tcsm",
    "RcsmAutomaton", "RState", "build_rcsm", "canonical_compare", "check_zero_time_trap",
    "product_rcsm",
    "parse_model", "read_model", "serialize_automaton", "serialize_model",
    "attach_signal", "check_safety", "format_witness", "export_dot",
    "ModelError", "RegionBudgetExceeded", "TcsmError",
]
