"""LegalRuleML to TPTP normative reasoning toolchain."""

from .errors import ToolchainError, UnsupportedFeature
from .parser import ParseError, parse_formula, parse_problem
from .printer import print_formula, print_problem
from .syntax import AnnotatedFormula, Problem, free_vars

__all__ = [
    "AnnotatedFormula",
    "ParseError",
    "Problem",
    "ToolchainError",
    "UnsupportedFeature",
    "free_vars",
    "parse_formula",
    "parse_problem",
    "print_formula",
    "print_problem",
]

__version__ = "0.1.0"
