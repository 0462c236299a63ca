"""Exact discrete structural causal models used as ground truth."""

from __future__ import annotations

import itertools
import json
import math
from collections.abc import Iterable, Mapping
from dataclasses import dataclass

import numpy as np

from .expr import JointTable
from .graph import LatentDag

__all__ = [
    "DiscreteScm",
    "random_scm",
    "exact_joint",
    "interventional_joint",
    "interventional_table",
    "sample",
    "STATE_SPACE_LIMIT",
]

STATE_SPACE_LIMIT = 10**7
MIN_WEIGHT = 0.05


@dataclass(frozen=True)
class DiscreteScm:
    """A DAG with a conditional probability table per node.

    ``cpts[v]`` has shape ``(*parent cardinalities, cardinality of v)`` with the
    parents in ``graph.parents(v)`` order.
    """

    graph: LatentDag
    cardinalities: Mapping[str, int]
    cpts: Mapping[str, np.ndarray]
    positive: bool = True

    def __post_init__(self) -> None:
        object.__setattr__(self, "cardinalities", {v: int(self.cardinalities[v]) for v in self.graph.nodes})
        cpts = {}
        for v in self.graph.nodes:
            if self.cardinalities[v] < 2:
                raise ValueError(f"cardinality of {v} must be at least 2")
            table = np.array(self.cpts[v], dtype=float)
            shape = tuple(self.cardinalities[p] for p in self.graph.parents(v)) + (self.cardinalities[v],)
            if table.shape != shape:
                raise ValueError(f"CPT of {v} has shape {table.shape}, expected {shape}")
            if (table < 0).any() or np.abs(table.sum(axis=-1) - 1).max() > 1e-12:
                raise ValueError(f"CPT rows of {v} must be distributions")
            if self.positive and (table <= 0).any():
                raise ValueError(f"CPT of {v} has zero entries in a model flagged positive")
            table.flags.writeable = False
            cpts[v] = table
        object.__setattr__(self, "cpts", cpts)

    @property
    def observed(self) -> tuple[str, ...]:
        return self.graph.observed

    def to_json(self) -> dict:
        return {
            **self.graph.to_json(),
            "cardinalities": dict(self.cardinalities),
            "cpts": {
                v: {"parents": list(self.graph.parents(v)), "values": self.cpts[v].ravel().tolist()}
                for v in self.graph.nodes
            },
        }

    @classmethod
    def from_json(cls, data: Mapping) -> DiscreteScm:
        graph = LatentDag(data["nodes"], [tuple(e) for e in data["directed"]], data.get("latent", []))
        cards = data["cardinalities"]
        cpts = {}
        for v in graph.nodes:
            entry = data["cpts"][v]
            if list(entry["parents"]) != list(graph.parents(v)):
                raise ValueError(f"CPT parents of {v} do not match the graph")
            shape = [cards[p] for p in graph.parents(v)] + [cards[v]]
            cpts[v] = np.array(entry["values"], dtype=float).reshape(shape)
        positive = all(min(entry["values"]) > 0 for entry in data["cpts"].values())
        return cls(graph, cards, cpts, positive)

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)


def random_scm(
    seed: int,
    n_observed: int,
    n_latent: int = 0,
    max_parents: int = 2,
    max_card: int = 2,
) -> DiscreteScm:
    """A seeded random model over observed ``V1..Vn`` and latent ``U1..Uk``.

    Latent nodes are roots with at least two observed children each.
    """
    if n_observed < 1:
        raise ValueError("need at least one observed node")
    if max_card < 2:
        raise ValueError("max_card must be at least 2")
    if max_parents < 0 or n_latent < 0:
        raise ValueError("max_parents and n_latent must be non-negative")
    if n_latent and n_observed < 2:
        raise ValueError("latent confounders need at least two observed children")
    rng = np.random.default_rng(seed)
    observed = [f"V{i + 1}" for i in range(n_observed)]
    latent = [f"U{i + 1}" for i in range(n_latent)]
    edges = []
    for i, v in enumerate(observed):
        k = int(rng.integers(0, min(max_parents, i) + 1))
        for j in sorted(rng.choice(i, size=k, replace=False)) if k else []:
            edges.append((observed[j], v))
    for u in latent:
        k = int(rng.integers(2, min(3, n_observed) + 1))
        for j in sorted(rng.choice(n_observed, size=k, replace=False)):
            edges.append((u, observed[j]))
    graph = LatentDag(observed + latent, edges, latent)
    cards = {v: int(rng.integers(2, max_card + 1)) for v in graph.nodes}
    cpts = {}
    for v in graph.nodes:
        shape = tuple(cards[p] for p in graph.parents(v)) + (cards[v],)
        weights = rng.uniform(MIN_WEIGHT, 1.0, size=shape)
        cpts[v] = weights / weights.sum(axis=-1, keepdims=True)
    return DiscreteScm(graph, cards, cpts)


def _joint_array(m: DiscreteScm, cpts: Mapping[str, np.ndarray], keep: list[str]) -> np.ndarray:
    index = {v: i for i, v in enumerate(m.graph.nodes)}
    operands = []
    for v in m.graph.nodes:
        operands += [cpts[v], [index[p] for p in m.graph.parents(v)] + [index[v]]]
    return np.einsum(*operands, [index[v] for v in keep], optimize=True)


def _guard(m: DiscreteScm, names: Iterable[str]) -> None:
    size = math.prod(m.cardinalities[v] for v in names)
    if size > STATE_SPACE_LIMIT:
        raise ValueError(f"state space of {size} entries exceeds the limit of {STATE_SPACE_LIMIT}")


def exact_joint(m: DiscreteScm, marginalize_latent: bool = True) -> JointTable:
    keep = list(m.observed if marginalize_latent else m.graph.nodes)
    _guard(m, keep)
    array = _joint_array(m, m.cpts, keep)
    return JointTable([(v, m.cardinalities[v]) for v in keep], array)


def _check_assignable(m: DiscreteScm, nodes: Iterable[str]) -> None:
    for v in nodes:
        if v not in m.graph.nodes:
            raise ValueError(f"unknown node {v!r}")
        if v in m.graph.latent:
            raise ValueError(f"can not intervene on latent node {v!r}")


def interventional_joint(m: DiscreteScm, assignments: Mapping[str, int]) -> JointTable:
    """Exact joint of the non-intervened observed nodes under ``do(assignments)``."""
    _check_assignable(m, assignments)
    cpts = dict(m.cpts)
    for v, value in assignments.items():
        if not 0 <= value < m.cardinalities[v]:
            raise ValueError(f"value {value} out of range for {v}")
        point = np.zeros_like(m.cpts[v])
        point[..., value] = 1.0
        cpts[v] = point
    keep = list(m.observed)
    _guard(m, keep)
    array = _joint_array(m, cpts, keep)
    rest = [v for v in keep if v not in assignments]
    array = array[tuple(assignments[v] if v in assignments else slice(None) for v in keep)]
    return JointTable([(v, m.cardinalities[v]) for v in rest], array)


def interventional_table(m: DiscreteScm, do: Iterable[str], scope: Iterable[str] | None = None) -> JointTable:
    """A table from which every ``P_x`` for ``do`` can be read by conditioning on ``do``.

    The intervened nodes are made uniform roots, so entries are ``P_x(v) / |X|``.
    ``scope`` restricts the recorded variables (the do-variables are always kept).
    """
    do = list(dict.fromkeys(do))
    _check_assignable(m, do)
    cpts = dict(m.cpts)
    for v in do:
        shape = m.cpts[v].shape
        cpts[v] = np.full(shape, 1.0 / shape[-1])
    recorded = set(m.observed if scope is None else scope) | set(do)
    keep = [v for v in m.observed if v in recorded]
    _guard(m, keep)
    array = _joint_array(m, cpts, keep)
    return JointTable([(v, m.cardinalities[v]) for v in keep], array)


def sample(m: DiscreteScm, n: int, seed: int):
    """Ancestral sampling of ``n`` rows; latent columns are dropped."""
    from .falsify import Column, Dataset

    if n < 1:
        raise ValueError("n must be at least 1")
    rng = np.random.default_rng(seed)
    values: dict[str, np.ndarray] = {}
    for v in m.graph.topological_order():
        parents = m.graph.parents(v)
        rows = m.cpts[v][tuple(values[p] for p in parents)] if parents else np.broadcast_to(m.cpts[v], (n, m.cardinalities[v]))
        cumulative = np.cumsum(rows, axis=-1)
        u = rng.random(n)[:, None]
        values[v] = np.minimum((u > cumulative).sum(axis=-1), m.cardinalities[v] - 1)
    columns = tuple(Column(v, "categorical") for v in m.observed)
    rows = tuple(zip(*(values[v].tolist() for v in m.observed)))
    return Dataset(columns, rows)


def assignments(cards: Mapping[str, int], names: Iterable[str]):
    """Every joint assignment of ``names`` as dicts."""
    names = list(names)
    for values in itertools.product(*(range(cards[v]) for v in names)):
        yield dict(zip(names, values))
