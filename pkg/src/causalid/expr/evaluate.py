"""Exact numerical evaluation of expressions against discrete tables."""

from __future__ import annotations

from collections.abc import Hashable, Mapping, Sequence

import numpy as np

from .nodes import Expression, Fraction, One, Probability, Product, Sum
from .table import JointTable, ValueTable

__all__ = ["evaluate", "ZeroProbabilityError", "MissingTableError", "TableKey"]

#: A table registry key: a domain label (observational data) or a
#: ``(domain, do-set)`` pair for data collected under an intervention.
TableKey = Hashable


class ZeroProbabilityError(ZeroDivisionError):
    def __init__(self, assignment: Mapping[str, int], where: str):
        self.assignment = dict(assignment)
        super().__init__(f"division by zero in {where} at assignment {self.assignment}")


class MissingTableError(KeyError):
    pass


def _normalize_tables(tables) -> dict[tuple, JointTable]:
    if isinstance(tables, JointTable):
        tables = {None: tables}
    registry: dict[tuple, JointTable] = {}
    for key, table in tables.items():
        if isinstance(key, tuple) and len(key) == 2 and not isinstance(key[1], str):
            domain, do = key
            registry[(domain, frozenset(do))] = table
        else:
            registry[(key, frozenset())] = table
    return registry


class _Evaluator:
    def __init__(self, registry: dict[tuple, JointTable], target_domain):
        self.registry = registry
        self.target_domain = target_domain
        self.cards: dict[str, int] = {}
        for table in registry.values():
            for name, card in table.variables:
                if self.cards.setdefault(name, card) != card:
                    raise ValueError(f"inconsistent cardinality for {name} across tables")

    def table_for(self, term: Probability) -> JointTable:
        domain = self.target_domain if term.domain is None else term.domain
        key = (domain, frozenset(v.name for v in term.do))
        try:
            return self.registry[key]
        except KeyError:
            do = sorted(key[1])
            raise MissingTableError(
                f"no table registered for domain {domain!r} with interventions {do}"
            ) from None

    def __call__(self, e: Expression) -> ValueTable:
        if isinstance(e, One):
            return ValueTable((), np.array(1.0))
        if isinstance(e, Probability):
            return self.probability(e)
        if isinstance(e, Sum):
            body = self(e.body)
            axes = tuple(body.variables.index(r) for r in e.ranges)
            kept = [v for v in body.variables if v not in e.ranges]
            return ValueTable(kept, body.values.sum(axis=axes))
        if isinstance(e, Product):
            parts = [self(f) for f in e.factors]
            variables = _union(p.variables for p in parts)
            out = np.ones(tuple(self.cards[v] for v in variables))
            for p in parts:
                out = out * p.aligned(variables)
            return ValueTable(variables, out)
        if isinstance(e, Fraction):
            num, den = self(e.numerator), self(e.denominator)
            variables = _union([num.variables, den.variables])
            shape = tuple(self.cards[v] for v in variables)
            n = np.broadcast_to(num.aligned(variables), shape)
            d = np.broadcast_to(den.aligned(variables), shape)
            _check_nonzero(d, variables, "fraction denominator")
            return ValueTable(variables, n / d)
        raise TypeError(f"can not evaluate {type(e).__name__}")

    def probability(self, term: Probability) -> ValueTable:
        refs = (*term.outcomes, *term.conditions, *term.do)
        if any(v.star or v.interventions for v in refs):
            raise ValueError("evaluation requires plain variables (no ~ values or @ subscripts)")
        table = self.table_for(term)
        outcomes = [v.name for v in term.outcomes]
        given = [v.name for v in term.conditions] + [v.name for v in term.do]
        missing = set(outcomes + given) - set(table.names)
        if missing:
            raise KeyError(f"variables {sorted(missing)} not in table")
        joint = table.marginal(outcomes + given)
        if not given:
            return joint
        denominator = table.marginal(given)
        _check_nonzero(denominator.values, denominator.variables, f"conditioning of {term}")
        d = np.broadcast_to(denominator.aligned(joint.variables), joint.cards)
        return ValueTable(joint.variables, joint.values / d)


def _union(groups) -> tuple[str, ...]:
    seen: dict[str, None] = {}
    for group in groups:
        for v in group:
            seen.setdefault(v)
    return tuple(seen)


def _check_nonzero(d: np.ndarray, variables: Sequence[str], where: str) -> None:
    zeros = np.argwhere(d == 0)
    if len(zeros):
        raise ZeroProbabilityError(dict(zip(variables, map(int, zeros[0]))), where)


def evaluate(e: Expression, tables, target_domain=None) -> ValueTable:
    """Evaluate ``e`` exactly, returning a table over its free variables.

    ``tables`` is a single :class:`JointTable` or a mapping whose keys are domain
    labels (observational tables) or ``(domain, do_set)`` pairs. An
    interventional table for ``do_set`` holds ``P_x(v) * w(x)`` for some positive
    weight ``w``, so that conditioning on the do-variables recovers ``P_x``.
    Terms without a domain label resolve to ``target_domain``.
    """
    return _Evaluator(_normalize_tables(tables), target_domain)(e)
