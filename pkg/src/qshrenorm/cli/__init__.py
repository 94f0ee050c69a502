"""Command-line front end."""
from .parse import parse_expression
from .pipelines import ResultDocument, emit_json, run_ladder, run_linearize, run_mould

__all__ = ["ResultDocument", "emit_json", "parse_expression", "run_ladder", "run_linearize", "run_mould"]
