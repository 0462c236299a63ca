"""Structural simplification and comparison of expressions."""

from __future__ import annotations

from .nodes import (
    Expression,
    Fraction,
    One,
    Probability,
    Product,
    Sum,
    fraction,
    product,
    summation,
)
from .render import render_text

__all__ = ["simplify", "canonicalize", "equal_modulo_commutativity"]


def _factors(e: Expression) -> list[Expression]:
    if isinstance(e, Product):
        return list(e.factors)
    if isinstance(e, One):
        return []
    return [e]


def _split(e: Expression) -> tuple[list[Expression], list[Expression]]:
    """Numerator and denominator factor lists of a (possibly fractional) product."""
    num: list[Expression] = []
    den: list[Expression] = []
    for f in _factors(e):
        if isinstance(f, Fraction):
            n, d = _split(f.numerator)
            dn, dd = _split(f.denominator)
            num += n + dd
            den += d + dn
        else:
            num.append(f)
    return num, den


def _cancel(num: list[Expression], den: list[Expression]) -> tuple[list, list]:
    num = list(num)
    remaining = []
    for d in den:
        if d in num:
            num.remove(d)
        else:
            remaining.append(d)
    return num, remaining


def simplify(e: Expression) -> Expression:
    """Flatten products, drop ``One`` factors and cancel identical fraction factors.

    The result evaluates identically to ``e`` on strictly positive tables.
    """
    if isinstance(e, (Probability, One)):
        return e
    if isinstance(e, Sum):
        body = simplify(e.body)
        if not set(e.ranges) <= body.free_variables():
            # cancellation removed a bound variable; keep the structural form
            body = _flatten(e.body)
        return summation(e.ranges, body)
    if isinstance(e, Product):
        parts = [simplify(f) for f in e.factors]
        if not any(isinstance(p, Fraction) for p in parts):
            return product(*parts)
        return _from_split(*_split(product(*parts)))
    if isinstance(e, Fraction):
        num, den = _split(Fraction(simplify(e.numerator), simplify(e.denominator)))
        return _from_split(num, den)
    raise TypeError(f"can not simplify {type(e).__name__}")


def _from_split(num: list[Expression], den: list[Expression]) -> Expression:
    num, den = _cancel(num, den)
    return fraction(product(*num), product(*den))


def _flatten(e: Expression) -> Expression:
    if isinstance(e, (Probability, One)):
        return e
    if isinstance(e, Sum):
        return Sum(e.ranges, _flatten(e.body))
    if isinstance(e, Product):
        return product(*(_flatten(f) for f in e.factors))
    if isinstance(e, Fraction):
        return Fraction(_flatten(e.numerator), _flatten(e.denominator))
    raise TypeError(f"can not flatten {type(e).__name__}")


def canonicalize(e: Expression) -> Expression:
    """Sort everything order-insensitive: product factors, sum ranges, term variable lists."""
    key = lambda v: (v.name, v.star, render_text(Probability((v,))))  # noqa: E731
    if isinstance(e, One):
        return e
    if isinstance(e, Probability):
        return Probability(
            tuple(sorted(e.outcomes, key=key)),
            tuple(sorted(e.conditions, key=key)),
            tuple(sorted(e.do, key=key)),
            e.domain,
        )
    if isinstance(e, Sum):
        return Sum(tuple(sorted(e.ranges)), canonicalize(e.body))
    if isinstance(e, Product):
        factors = [canonicalize(f) for f in e.factors]
        return Product(tuple(sorted(factors, key=render_text)))
    if isinstance(e, Fraction):
        return Fraction(canonicalize(e.numerator), canonicalize(e.denominator))
    raise TypeError(f"can not canonicalize {type(e).__name__}")


def equal_modulo_commutativity(a: Expression, b: Expression) -> bool:
    return canonicalize(a) == canonicalize(b)

