"""Inference and verification of non-failure conditions for functional logic programs."""

from .analysis import AnalysisOptions, AnalysisResult, analyze_fixpoint
from .domain import ANY, BOTTOM, DepthK, DomainConfig, Signature, parse_value, render
from .interp import EvalConfig, check_calltype_oracle, check_inout_oracle, eval_all
from .normalize import normalize
from .parser import ParseError, parse_expr, parse_program

__version__ = "0.1.0"

__all__ = [
    "ANY", "BOTTOM", "AnalysisOptions", "AnalysisResult", "DepthK", "DomainConfig",
    "EvalConfig", "ParseError", "Signature", "analyze_fixpoint", "check_calltype_oracle",
    "check_inout_oracle", "eval_all", "normalize", "parse_expr", "parse_program",
    "parse_value", "render",
]
