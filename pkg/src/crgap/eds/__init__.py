"""Exterior differential systems: forms, structure rules and closure checks."""

from .builtins import SABOTAGE, rank1_system, su_maurer_cartan
from .dsl import ParseError, parse_system, serialize_system
from .forms import EdsError, ExtForm, SymbolTable, format_form
from .system import EdsSystem, ResidualReport, check_closure, conj_form, d

__all__ = [
    "EdsError",
    "EdsSystem",
    "ExtForm",
    "ResidualReport",
    "SymbolTable",
    "check_closure",
    "conj_form",
    "d",
    "format_form",
    "ParseError",
    "parse_system",
    "serialize_system",
    "su_maurer_cartan",
    "rank1_system",
    "SABOTAGE",
]
