"""Probabilistic expression language: AST, parser, renderers and evaluation."""

from .evaluate import MissingTableError, ZeroProbabilityError, evaluate
from .nodes import (
    ONE,
    Expression,
    Fraction,
    One,
    P,
    Probability,
    Product,
    Sum,
    Variable,
    fraction,
    product,
    summation,
)
from .parser import ExpressionSemanticError, ExpressionSyntaxError, parse
from .render import render_latex, render_text
from .simplify import canonicalize, equal_modulo_commutativity, simplify
from .table import JointTable, ValueTable


def free_variables(e: Expression) -> frozenset[str]:
    """Variable names occurring in ``e`` that no enclosing sum binds."""
    return e.free_variables()


__all__ = [
    "ONE",
    "Expression",
    "Fraction",
    "JointTable",
    "MissingTableError",
    "One",
    "P",
    "Probability",
    "Product",
    "Sum",
    "ValueTable",
    "Variable",
    "ZeroProbabilityError",
    "ExpressionSemanticError",
    "ExpressionSyntaxError",
    "canonicalize",
    "equal_modulo_commutativity",
    "evaluate",
    "fraction",
    "free_variables",
    "parse",
    "product",
    "render_latex",
    "render_text",
    "simplify",
    "summation",
]
