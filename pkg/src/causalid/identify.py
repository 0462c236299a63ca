"""Identification of interventional queries from observational data (ID and IDC)."""

from __future__ import annotations

import enum
import json
from collections.abc import Iterable
from dataclasses import dataclass, field

from .expr import (
    Expression,
    Probability,
    Variable,
    fraction,
    product,
    render_latex,
    render_text,
    summation,
)
from .graph import Admg
from .separation import m_separated

__all__ = [
    "Query",
    "Status",
    "HedgeWitness",
    "IdentificationResult",
    "identify",
    "identify_conditional",
    "id_algorithm",
    "idc",
]


def _names(nodes: Iterable[str] | str) -> tuple[str, ...]:
    if isinstance(nodes, str):
        nodes = [nodes]
    return tuple(dict.fromkeys(nodes))


@dataclass(frozen=True)
class Query:
    """``P_treatments(outcomes | conditions)``."""

    treatments: tuple[str, ...]
    outcomes: tuple[str, ...]
    conditions: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        for attr in ("treatments", "outcomes", "conditions"):
            object.__setattr__(self, attr, _names(getattr(self, attr)))
        if not self.outcomes:
            raise ValueError("a query needs at least one outcome")
        x, y, z = map(set, (self.treatments, self.outcomes, self.conditions))
        if x & y or x & z or y & z:
            raise ValueError("treatments, outcomes and conditions must be disjoint")

    def check(self, g: Admg) -> None:
        g._check([*self.treatments, *self.outcomes, *self.conditions])

    def __str__(self) -> str:
        return render_text(
            Probability(
                tuple(map(Variable, self.outcomes)),
                tuple(map(Variable, self.conditions)),
                tuple(map(Variable, self.treatments)),
            )
        )


class Status(str, enum.Enum):
    IDENTIFIABLE = "identifiable"
    NON_IDENTIFIABLE = "non-identifiable"


@dataclass(frozen=True)
class HedgeWitness:
    """A district of ``G \\ X`` trapped inside a strictly larger district of the subproblem graph."""

    district: frozenset[str]
    containing_component: frozenset[str]
    description: str

    def to_json(self) -> dict:
        return {
            "district": sorted(self.district),
            "containing_component": sorted(self.containing_component),
            "description": self.description,
        }


@dataclass(frozen=True)
class IdentificationResult:
    status: Status
    query: Query
    estimand: Expression | None = None
    witness: HedgeWitness | None = None
    reason: str | None = field(default=None, compare=False)

    @property
    def identifiable(self) -> bool:
        return self.status is Status.IDENTIFIABLE

    def to_json(self) -> dict:
        return {
            "status": self.status.value,
            "query": str(self.query),
            "estimand_text": render_text(self.estimand) if self.estimand is not None else None,
            "estimand_latex": render_latex(self.estimand) if self.estimand is not None else None,
            "witness": self.witness.to_json() if self.witness is not None else None,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)


class Unidentifiable(Exception):
    """Raised inside the recursion when a hedge blocks identification."""

    def __init__(self, witness: HedgeWitness):
        self.witness = witness
        super().__init__(witness.description)


class Infeasible(Exception):
    """A derivation branch needs data that no available distribution provides."""


@dataclass(frozen=True)
class Kernel:
    """The distribution a recursion step works from.

    ``expr`` is a distribution over ``variables`` (other free variables act as
    fixed inputs). When it is a joint probability term, marginals and
    conditionals are read off as new terms of the same distribution, otherwise
    they are built with sums and fractions. ``scope`` restricts which
    variables emitted terms may mention.
    """

    expr: Expression | None
    variables: frozenset[str]
    scope: frozenset[str] | None = None
    switchable: bool = True

    @property
    def is_joint(self) -> bool:
        return isinstance(self.expr, Probability) and self.expr.is_joint

    def _require(self) -> Expression:
        if self.expr is None:
            raise Infeasible("no observational distribution available")
        return self.expr

    def term(self, outcomes: tuple[str, ...], given: tuple[str, ...]) -> Probability:
        base = self._require()
        if self.scope is not None and not set(outcomes) | set(given) <= self.scope:
            raise Infeasible(f"variables outside recorded scope of {base}")
        return Probability(tuple(map(Variable, outcomes)), tuple(map(Variable, given)), base.do, base.domain)

    def restrict(self, keep: tuple[str, ...], order: tuple[str, ...]) -> Kernel:
        """The marginal kernel over ``keep``."""
        base = self._require()
        if set(keep) == self.variables:
            return self
        if self.is_joint:
            expr = Probability(tuple(map(Variable, keep)), (), base.do, base.domain)
        else:
            expr = summation([v for v in order if v in self.variables and v not in keep], base)
        return Kernel(expr, frozenset(keep), self.scope, self.switchable)

    def marginal(self, keep: tuple[str, ...], order: tuple[str, ...]) -> Expression:
        base = self._require()
        if set(keep) == self.variables and not self.is_joint:
            return base
        if self.is_joint:
            return self.term(keep, ())
        return summation([v for v in order if v in self.variables and v not in keep], base)

    def conditional(self, v: str, given: tuple[str, ...], order: tuple[str, ...]) -> Expression:
        if self.is_joint:
            return self.term((v,), given)
        numerator = self.marginal((*given, v), order)
        if not given:
            return numerator
        return fraction(numerator, self.marginal(given, order))


def _sorted(order: tuple[str, ...], nodes) -> tuple[str, ...]:
    nodes = set(nodes)
    return tuple(v for v in order if v in nodes)


class IdRecursion:
    """The ID recursion over symbolic kernels.

    ``fixed`` tracks the variables already intervened on by earlier steps, so
    each call computes ``P_{x + fixed}(y)`` of the original model. Subclasses
    hook :meth:`direct` and :meth:`single_district` to bring in other data.
    """

    literal_line_one = True

    def __init__(self, graph: Admg):
        self.graph = graph

    def run(self, y, x, kernel: Kernel, g: Admg, fixed: frozenset[str]) -> Expression:
        y, x = frozenset(y), frozenset(x)
        hit = self.direct(y, x, fixed)
        if hit is not None:
            return hit
        order = g.topological_order()
        v = frozenset(g.nodes)
        if not x:
            if self.literal_line_one and kernel.is_joint:
                return summation(_sorted(order, v - y), kernel.expr)
            return kernel.marginal(_sorted(order, y), order)
        an = g.ancestors(y)
        if an != v:
            keep = _sorted(order, an)
            return self.run(y, x & an, kernel.restrict(keep, order), g.subgraph(an), fixed)
        w = (v - x) - g.mutilate(cut_incoming=x).ancestors(y)
        if w:
            return self.run(y, x | w, kernel, g, fixed)
        components = g.remove_nodes(x).districts()
        if len(components) > 1:
            factors = [self.run(s, v - s, kernel, g, fixed) for s in components]
            return summation(_sorted(order, v - (y | x)), product(*factors))
        return self.single_district(y, x, kernel, g, fixed, components[0])

    def direct(self, y, x, fixed) -> Expression | None:
        return None

    def single_district(self, y, x, kernel, g, fixed, s) -> Expression:
        order = g.topological_order()
        v = frozenset(g.nodes)
        g_components = g.districts()
        if len(g_components) == 1:
            raise Unidentifiable(
                HedgeWitness(
                    frozenset(s),
                    v,
                    f"district {{{', '.join(_sorted(order, s))}}} of the graph without "
                    f"{{{', '.join(_sorted(order, x))}}} lies inside the single district "
                    f"{{{', '.join(order)}}}; the effect of {', '.join(_sorted(order, x))} "
                    f"on {', '.join(_sorted(order, y))} is not identifiable",
                )
            )

        def predecessors(vi: str) -> tuple[str, ...]:
            return order[: order.index(vi)]

        if s in g_components:
            members = _sorted(order, s)
            factors = [kernel.conditional(vi, predecessors(vi), order) for vi in members]
            return summation(_sorted(order, s - y), product(*factors))
        s_prime = next(c for c in g_components if s < c)
        members = _sorted(order, s_prime)
        factors = [kernel.conditional(vi, predecessors(vi), order) for vi in members]
        sub = Kernel(product(*factors), frozenset(s_prime), kernel.scope, kernel.switchable)
        return self.run(y, x & s_prime, sub, g.subgraph(s_prime), fixed | (v - s_prime))


def _joint_kernel(g: Admg) -> Kernel:
    order = g.topological_order()
    return Kernel(Probability(tuple(map(Variable, order))), frozenset(g.nodes))


def average_out(estimand: Expression, keep: frozenset[str], weight) -> Expression:
    """Sum away free variables of ``estimand`` outside ``keep``.

    ID can return ``P_{x,w}(y)`` for ancestors ``w`` that do not matter once
    ``x`` is fixed, leaving ``w`` free although the value is constant in it.
    Weighting by any distribution over ``w`` (``weight(names)``) and summing
    gives the same number with only the query variables free.
    """
    extra = estimand.free_variables() - keep
    if not extra:
        return estimand
    return summation(sorted(extra), product(estimand, weight(sorted(extra))))


def _query(treatments, outcomes, conditions=()) -> Query:
    return Query(_names(treatments), _names(outcomes), _names(conditions))


def identify(g: Admg, q: Query) -> IdentificationResult:
    """Run ID on an unconditional query ``P_x(y)``."""
    if q.conditions:
        raise ValueError("identify handles unconditional queries; use identify_conditional")
    q.check(g)
    kernel = _joint_kernel(g)
    order = g.topological_order()
    try:
        estimand = IdRecursion(g).run(q.outcomes, q.treatments, kernel, g, frozenset())
    except Unidentifiable as exc:
        return IdentificationResult(Status.NON_IDENTIFIABLE, q, witness=exc.witness, reason=str(exc))
    keep = frozenset(q.outcomes) | frozenset(q.treatments)
    estimand = average_out(estimand, keep, lambda names: kernel.marginal(_sorted(order, names), order))
    return IdentificationResult(Status.IDENTIFIABLE, q, estimand=estimand)


def identify_conditional(g: Admg, q: Query) -> IdentificationResult:
    """Run IDC on ``P_x(y | z)``.

    Conditions that rule 2 of the do-calculus allows to act as interventions
    are moved into the treatment set first; what remains is identified as
    ``P_x(y, z) / sum_y P_x(y, z)``.
    """
    q.check(g)
    order = g.topological_order()
    x, y, z = set(q.treatments), set(q.outcomes), list(_sorted(order, q.conditions))
    moved = True
    while moved:
        moved = False
        for zi in z:
            rest = set(z) - {zi}
            mutilated = g.mutilate(cut_incoming=x, cut_outgoing={zi})
            if m_separated(mutilated, y, {zi}, x | rest):
                x.add(zi)
                z.remove(zi)
                moved = True
                break
    treatments = _sorted(order, x)
    if not z:
        result = identify(g, Query(treatments, q.outcomes))
        return IdentificationResult(result.status, q, result.estimand, result.witness, result.reason)
    joint = identify(g, Query(treatments, (*q.outcomes, *z)))
    if not joint.identifiable:
        return IdentificationResult(joint.status, q, witness=joint.witness, reason=joint.reason)
    estimand = joint.estimand
    return IdentificationResult(
        Status.IDENTIFIABLE, q, estimand=fraction(estimand, summation(_sorted(order, y), estimand))
    )


def id_algorithm(g: Admg, treatments, outcomes) -> IdentificationResult:
    """Convenience wrapper: ``id_algorithm(g, ["Smoking"], ["Cancer"])``."""
    return identify(g, _query(treatments, outcomes))


def idc(g: Admg, treatments, outcomes, conditions=()) -> IdentificationResult:
    return identify_conditional(g, _query(treatments, outcomes, conditions))

