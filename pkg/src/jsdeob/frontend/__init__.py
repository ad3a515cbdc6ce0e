"""Parsing and normal-form preprocessing (hoisting, `with` elimination)."""

from __future__ import annotations

from ..nodes import Script
from .hoist import hoist
from .parser import ParseDiagnostic, ParseError, parse, parse_expression
from .withrewrite import rewrite_with


def preprocess(script: Script) -> Script:
    return rewrite_with(hoist(script))


def load(source, name: str = "<input>") -> Script:
    """Parse and preprocess; raises ParseError on invalid input."""
    return preprocess(parse(source, name))


__all__ = ["parse", "parse_expression", "hoist", "rewrite_with", "preprocess", "load",
           "ParseError", "ParseDiagnostic"]
