"""AST node types for probabilistic expressions."""

from __future__ import annotations

import re
from collections.abc import Iterable
from dataclasses import dataclass
from typing import Union

__all__ = [
    "Variable",
    "Expression",
    "Probability",
    "Sum",
    "Product",
    "Fraction",
    "One",
    "ONE",
    "P",
    "product",
    "summation",
    "fraction",
]

IDENT_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")
DOMAIN_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*\*?\Z")


@dataclass(frozen=True)
class Variable:
    """A reference to a variable, optionally at its reference value ``~X``.

    ``interventions`` holds the counterfactual subscript, so ``Y @ ~X`` is
    ``Variable("Y", interventions=(Variable("X", star=True),))``.
    """

    name: str
    star: bool = False
    interventions: tuple[Variable, ...] = ()

    def __post_init__(self) -> None:
        if not isinstance(self.name, str) or not IDENT_RE.match(self.name):
            raise ValueError(f"invalid variable name: {self.name!r}")
        object.__setattr__(self, "interventions", tuple(self.interventions))
        for intervention in self.interventions:
            if intervention.interventions:
                raise ValueError("counterfactual subscripts can not be nested")

    @classmethod
    def coerce(cls, value: str | Variable) -> Variable:
        if isinstance(value, Variable):
            return value
        return cls(value)

    @property
    def key(self) -> tuple:
        """Identity used for duplicate detection inside a probability term."""
        return self.name, tuple((i.name, i.star) for i in self.interventions)

    @property
    def is_counterfactual(self) -> bool:
        return bool(self.interventions)

    def names(self) -> set[str]:
        return {self.name, *(i.name for i in self.interventions)}


class Expression:
    """Base class for every node of the expression tree."""

    __slots__ = ()

    def free_variables(self) -> frozenset[str]:
        raise NotImplementedError

    def __mul__(self, other: Expression) -> Expression:
        return product(self, other)

    def __truediv__(self, other: Expression) -> Expression:
        return fraction(self, other)

    def __str__(self) -> str:
        from .render import render_text

        return render_text(self)


def _check_unique(items: tuple[Variable, ...], where: str) -> None:
    seen = set()
    for item in items:
        if item.key in seen:
            raise ValueError(f"variable {item.name} repeated in {where}")
        seen.add(item.key)


@dataclass(frozen=True)
class Probability(Expression):
    """A single probability term ``P^domain[do](outcomes | conditions)``."""

    outcomes: tuple[Variable, ...]
    conditions: tuple[Variable, ...] = ()
    do: tuple[Variable, ...] = ()
    domain: str | None = None

    def __post_init__(self) -> None:
        for attr in ("outcomes", "conditions", "do"):
            object.__setattr__(self, attr, tuple(Variable.coerce(v) for v in getattr(self, attr)))
        if not self.outcomes:
            raise ValueError("a probability needs at least one outcome")
        if self.domain is not None and not DOMAIN_RE.match(self.domain):
            raise ValueError(f"invalid domain label: {self.domain!r}")
        if any(v.interventions for v in self.do):
            raise ValueError("intervened variables can not carry counterfactual subscripts")
        _check_unique(self.outcomes, "outcomes")
        _check_unique(self.conditions, "conditions")
        _check_unique(self.do, "interventions")
        overlap = {v.key for v in self.outcomes} & {v.key for v in self.conditions}
        if overlap:
            names = sorted(name for name, _ in overlap)
            raise ValueError(f"variable {names[0]} appears in both outcomes and conditions")

    def free_variables(self) -> frozenset[str]:
        names: set[str] = set()
        for v in (*self.outcomes, *self.conditions, *self.do):
            names |= v.names()
        return frozenset(names)

    @property
    def is_joint(self) -> bool:
        return not self.conditions


@dataclass(frozen=True)
class Sum(Expression):
    """Summation of ``body`` over every assignment of ``ranges``."""

    ranges: tuple[str, ...]
    body: Expression

    def __post_init__(self) -> None:
        object.__setattr__(self, "ranges", tuple(self.ranges))
        if not self.ranges:
            raise ValueError("a sum needs a non-empty range")
        if len(set(self.ranges)) != len(self.ranges):
            raise ValueError("repeated variable in sum range")
        for name in self.ranges:
            if not IDENT_RE.match(name):
                raise ValueError(f"invalid variable name: {name!r}")
        missing = [r for r in self.ranges if r not in self.body.free_variables()]
        if missing:
            raise ValueError(f"sum variable {missing[0]} does not occur free in the body")

    def free_variables(self) -> frozenset[str]:
        return self.body.free_variables() - set(self.ranges)


@dataclass(frozen=True)
class Product(Expression):
    factors: tuple[Expression, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "factors", tuple(self.factors))
        if len(self.factors) < 2:
            raise ValueError("a product needs at least two factors")
        if any(isinstance(f, Product) for f in self.factors):
            raise ValueError("products must be flat")

    def free_variables(self) -> frozenset[str]:
        return frozenset().union(*(f.free_variables() for f in self.factors))


@dataclass(frozen=True)
class Fraction(Expression):
    numerator: Expression
    denominator: Expression

    def free_variables(self) -> frozenset[str]:
        return self.numerator.free_variables() | self.denominator.free_variables()


@dataclass(frozen=True)
class One(Expression):
    def free_variables(self) -> frozenset[str]:
        return frozenset()


ONE = One()

VarLike = Union[str, Variable]


def P(
    *outcomes: VarLike,
    given: Iterable[VarLike] = (),
    do: Iterable[VarLike] = (),
    domain: str | None = None,
) -> Probability:
    """Shorthand constructor: ``P("Y", given=["X"])``."""
    return Probability(tuple(outcomes), tuple(given), tuple(do), domain)


def product(*factors: Expression) -> Expression:
    """Build a flattened product, dropping ``One`` factors."""
    flat: list[Expression] = []
    for factor in factors:
        if isinstance(factor, Product):
            flat.extend(factor.factors)
        elif not isinstance(factor, One):
            flat.append(factor)
    if not flat:
        return ONE
    if len(flat) == 1:
        return flat[0]
    return Product(tuple(flat))


def summation(ranges: Iterable[str], body: Expression) -> Expression:
    """Build a sum, keeping only range variables that occur free in ``body``."""
    free = body.free_variables()
    kept = tuple(dict.fromkeys(r for r in ranges if r in free))
    if not kept:
        return body
    return Sum(kept, body)


def fraction(numerator: Expression, denominator: Expression) -> Expression:
    if isinstance(denominator, One):
        return numerator
    return Fraction(numerator, denominator)
