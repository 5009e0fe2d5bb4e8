"""Front end for the modelling language: lexer, parser, printer and validator."""

from gtnmc.dsl.parser import parse_expr, parse_model, parse_proc, parse_program
from gtnmc.dsl.printer import format_expr, format_model, format_proc
from gtnmc.dsl.validate import Finding, ValidationReport, validate_model

__all__ = [
    "parse_model", "parse_expr", "parse_program", "parse_proc",
    "format_model", "format_expr", "format_proc",
    "validate_model", "ValidationReport", "Finding",
]
