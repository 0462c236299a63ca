"""Identification from a mix of observational and experimental distributions.

Every available distribution is assumed to come from the same causal
mechanisms; domain labels only say where the data was collected. A
derivation that would need a variable outside a distribution's recorded
scope is abandoned rather than approximated, so the search may report a
query as non-identifiable when a stronger rule set could still succeed.
"""

from __future__ import annotations

import json
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass

from .expr import Expression, Probability, Variable, render_latex, render_text
from .graph import Admg
from .identify import (
    IdRecursion,
    Infeasible,
    Kernel,
    Query,
    Status,
    Unidentifiable,
    _sorted,
    average_out,
)

__all__ = ["AvailableDistribution", "SurrogateResult", "trso", "load_sources", "parse_sources"]


@dataclass(frozen=True)
class AvailableDistribution:
    """Data from ``domain`` recorded over ``scope`` under ``do(do)``."""

    domain: str
    do: frozenset[str]
    scope: frozenset[str]

    def __post_init__(self) -> None:
        object.__setattr__(self, "do", frozenset(self.do))
        object.__setattr__(self, "scope", frozenset(self.scope))
        if not self.scope:
            raise ValueError("a distribution must record at least one variable")
        # validates the label the same way probability terms do
        Probability((Variable("X"),), domain=self.domain)

    @property
    def observational(self) -> bool:
        return not self.do

    def supports(self, term: Probability) -> bool:
        """Whether ``term`` can be estimated from this distribution."""
        names = {v.name for v in (*term.outcomes, *term.conditions)}
        return (
            term.domain == self.domain
            and {v.name for v in term.do} == set(self.do)
            and names <= self.scope | self.do
        )

    def to_json(self) -> dict:
        return {"domain": self.domain, "do": sorted(self.do), "scope": sorted(self.scope)}


def parse_sources(data: Sequence[Mapping]) -> list[AvailableDistribution]:
    sources = []
    for i, entry in enumerate(data):
        try:
            sources.append(AvailableDistribution(entry["domain"], entry.get("do", []), entry["scope"]))
        except (KeyError, TypeError) as exc:
            raise ValueError(f"source {i}: missing or malformed field {exc}") from None
    return sources


def load_sources(path) -> list[AvailableDistribution]:
    with open(path, encoding="utf-8") as handle:
        return parse_sources(json.load(handle))


@dataclass(frozen=True)
class SurrogateResult:
    status: Status
    query: Query
    estimand: Expression | None = None
    reason: str | None = None

    @property
    def identifiable(self) -> bool:
        return self.status is Status.IDENTIFIABLE

    def to_json(self) -> dict:
        return {
            "status": self.status.value,
            "query": str(self.query),
            "estimand_text": render_text(self.estimand) if self.estimand is not None else None,
            "estimand_latex": render_latex(self.estimand) if self.estimand is not None else None,
            "witness": self.reason,
        }


def _terms(e: Expression) -> Iterable[Probability]:
    if isinstance(e, Probability):
        yield e
    for child in getattr(e, "factors", ()):
        yield from _terms(child)
    for attr in ("body", "numerator", "denominator"):
        if hasattr(e, attr):
            yield from _terms(getattr(e, attr))


class _SurrogateRecursion(IdRecursion):
    literal_line_one = False

    def __init__(self, graph: Admg, sources: list[AvailableDistribution]):
        super().__init__(graph)
        self.sources = sources
        self.order = graph.topological_order()

    def _effective(self, y: frozenset[str], x: frozenset[str]) -> frozenset[str]:
        """The part of ``x`` that can affect ``y`` once ``x`` is intervened on."""
        return x & self.graph.mutilate(cut_incoming=x).ancestors(y)

    def direct(self, y, x, fixed):
        target = x | fixed
        needed = self._effective(y, target)
        for source in self.sources:
            if (
                source.do <= target
                and y <= source.scope
                and self._effective(y, source.do) == needed
            ):
                return Probability(
                    tuple(map(Variable, _sorted(self.order, y))),
                    (),
                    tuple(map(Variable, _sorted(self.order, source.do))),
                    source.domain,
                )
        return None

    def single_district(self, y, x, kernel, g, fixed, s):
        try:
            return super().single_district(y, x, kernel, g, fixed, s)
        except (Unidentifiable, Infeasible) as exc:
            failure = exc
        if not kernel.switchable:
            raise failure
        target = x | fixed
        for source in self.sources:
            if source.observational or not source.do <= target:
                continue
            rest = [v for v in self.graph.nodes if v not in source.do]
            sub_graph = self.graph.subgraph(rest)
            order = sub_graph.topological_order()
            sub_kernel = Kernel(
                Probability(
                    tuple(map(Variable, order)),
                    (),
                    tuple(map(Variable, _sorted(self.order, source.do))),
                    source.domain,
                ),
                frozenset(rest),
                source.scope,
                switchable=False,
            )
            try:
                return self.run(y, target - source.do, sub_kernel, sub_graph, frozenset(source.do))
            except (Unidentifiable, Infeasible):
                continue
        raise failure


def _drop_extras(estimand: Expression, q: Query, ranked, order) -> Expression:
    """Average out free non-query variables using the first source that records them."""
    keep = frozenset(q.outcomes) | frozenset(q.treatments)
    extra = estimand.free_variables() - keep
    source = next((s for s in ranked if extra <= s.scope - s.do), None)
    if not extra or source is None:
        return estimand

    def weight(names):
        do = tuple(map(Variable, _sorted(order, source.do)))
        return Probability(tuple(map(Variable, _sorted(order, names))), (), do, source.domain)

    return average_out(estimand, keep, weight)


def _preference(sources: Sequence[AvailableDistribution], target: str) -> list[AvailableDistribution]:
    ranked = sorted(enumerate(sources), key=lambda p: (p[1].domain != target, not p[1].observational, p[0]))
    return [s for _, s in ranked]


def trso(
    g: Admg,
    q: Query,
    sources: Sequence[AvailableDistribution],
    target_domain: str,
) -> SurrogateResult:
    """Identify ``P_x(y)`` in ``target_domain`` from the available distributions.

    Sources are preferred in the order: target domain first, observational
    before experimental, then declaration order.
    """
    if q.conditions:
        raise ValueError("trso handles unconditional queries")
    if not sources:
        raise ValueError("at least one available distribution is required")
    q.check(g)
    nodes = set(g.nodes)
    for source in sources:
        unknown = (source.do | source.scope) - nodes
        if unknown:
            raise ValueError(f"source {source.domain} mentions unknown node(s) {', '.join(sorted(unknown))}")
    if target_domain not in {s.domain for s in sources}:
        raise ValueError(f"unknown target domain {target_domain!r}")
    ranked = _preference(sources, target_domain)
    recursion = _SurrogateRecursion(g, ranked)
    order = g.topological_order()
    bases = [s for s in ranked if s.observational] or [None]
    reason = "no derivation found"
    for base in bases:
        if base is None:
            kernel = Kernel(None, frozenset(g.nodes))
        else:
            kernel = Kernel(
                Probability(tuple(map(Variable, order)), (), (), base.domain),
                frozenset(g.nodes),
                base.scope,
            )
        try:
            estimand = recursion.run(q.outcomes, q.treatments, kernel, g, frozenset())
        except (Unidentifiable, Infeasible) as exc:
            reason = str(exc)
            continue
        estimand = _drop_extras(estimand, q, ranked, order)
        if all(any(s.supports(t) for s in sources) for t in _terms(estimand)):
            return SurrogateResult(Status.IDENTIFIABLE, q, estimand)
        reason = "derived estimand uses unavailable terms"
    return SurrogateResult(Status.NON_IDENTIFIABLE, q, reason=reason)
