"""Acyclic directed mixed graphs, latent-variable DAGs and their file formats."""

from __future__ import annotations

import heapq
import json
import re
from collections.abc import Iterable, Mapping

__all__ = [
    "Admg",
    "LatentDag",
    "GraphError",
    "latent_project",
    "parse_graph",
    "load_graph",
]


class GraphError(ValueError):
    """Invalid graph structure or graph file."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def _ordered(nodes: Iterable[str]) -> tuple[str, ...]:
    return tuple(dict.fromkeys(nodes))


def _topological(nodes: tuple[str, ...], parents: Mapping[str, set[str]]) -> tuple[str, ...]:
    """Kahn's algorithm with lexicographic tie-breaks; raises on cycles."""
    indegree = {v: len(parents[v]) for v in nodes}
    children: dict[str, list[str]] = {v: [] for v in nodes}
    for v in nodes:
        for p in parents[v]:
            children[p].append(v)
    heap = [v for v in nodes if indegree[v] == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        v = heapq.heappop(heap)
        order.append(v)
        for c in children[v]:
            indegree[c] -= 1
            if indegree[c] == 0:
                heapq.heappush(heap, c)
    if len(order) != len(nodes):
        stuck = sorted(v for v in nodes if indegree[v] > 0)
        raise GraphError(f"cycle detected among {', '.join(stuck)}")
    return tuple(order)


class _DirectedBase:
    nodes: tuple[str, ...]
    directed: frozenset[tuple[str, str]]

    def _init_directed(self, nodes, directed) -> None:
        self.nodes = _ordered(nodes)
        node_set = set(self.nodes)
        for v in self.nodes:
            if not isinstance(v, str) or not v:
                raise GraphError(f"invalid node name {v!r}")
        edges = set()
        for u, v in directed:
            if u == v:
                raise GraphError(f"self-loop on {u}")
            for w in (u, v):
                if w not in node_set:
                    raise GraphError(f"unknown node {w!r} in edge {u} -> {v}")
            edges.add((u, v))
        self.directed = frozenset(edges)
        self._parents: dict[str, set[str]] = {v: set() for v in self.nodes}
        self._children: dict[str, set[str]] = {v: set() for v in self.nodes}
        for u, v in self.directed:
            self._parents[v].add(u)
            self._children[u].add(v)
        self._index = {v: i for i, v in enumerate(self.nodes)}
        self._topo = _topological(self.nodes, self._parents)

    def _check(self, nodes: Iterable[str]) -> set[str]:
        nodes = set(nodes)
        unknown = nodes - set(self.nodes)
        if unknown:
            raise GraphError(f"unknown node(s): {', '.join(sorted(unknown))}")
        return nodes

    def sort(self, nodes: Iterable[str]) -> tuple[str, ...]:
        """``nodes`` in declaration order."""
        return tuple(sorted(set(nodes), key=self._index.__getitem__))

    def parents(self, v: str) -> tuple[str, ...]:
        self._check([v])
        return self.sort(self._parents[v])

    def children(self, v: str) -> tuple[str, ...]:
        self._check([v])
        return self.sort(self._children[v])

    def ancestors(self, nodes: Iterable[str]) -> frozenset[str]:
        """Reflexive ancestors of ``nodes``."""
        return frozenset(self._closure(self._check(nodes), self._parents))

    def descendants(self, nodes: Iterable[str]) -> frozenset[str]:
        """Reflexive descendants of ``nodes``."""
        return frozenset(self._closure(self._check(nodes), self._children))

    @staticmethod
    def _closure(start: set[str], step: Mapping[str, set[str]]) -> set[str]:
        seen = set(start)
        stack = list(start)
        while stack:
            for w in step[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return seen

    def topological_order(self) -> tuple[str, ...]:
        """Parents before children, ties broken lexicographically."""
        return self._topo

    def directed_edges(self) -> list[tuple[str, str]]:
        return sorted(self.directed, key=lambda e: (self._index[e[0]], self._index[e[1]]))


class Admg(_DirectedBase):
    """An acyclic directed mixed graph.

    Bidirected edges ``u <-> v`` stand for unobserved confounding and are stored
    as lexicographically sorted pairs.
    """

    def __init__(
        self,
        nodes: Iterable[str] = (),
        directed: Iterable[tuple[str, str]] = (),
        bidirected: Iterable[tuple[str, str]] = (),
    ):
        directed = list(directed)
        bidirected = list(bidirected)
        nodes = list(nodes)
        nodes = _ordered([*nodes, *(w for e in [*directed, *bidirected] for w in e)]) if not nodes else nodes
        self._init_directed(nodes, directed)
        node_set = set(self.nodes)
        pairs = set()
        for u, v in bidirected:
            if u == v:
                raise GraphError(f"self-loop on {u}")
            for w in (u, v):
                if w not in node_set:
                    raise GraphError(f"unknown node {w!r} in edge {u} <-> {v}")
            pairs.add((min(u, v), max(u, v)))
        self.bidirected = frozenset(pairs)
        self._spouses: dict[str, set[str]] = {v: set() for v in self.nodes}
        for u, v in self.bidirected:
            self._spouses[u].add(v)
            self._spouses[v].add(u)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Admg):
            return NotImplemented
        return (self.nodes, self.directed, self.bidirected) == (
            other.nodes,
            other.directed,
            other.bidirected,
        )

    def __hash__(self) -> int:
        return hash((self.nodes, self.directed, self.bidirected))

    def __repr__(self) -> str:
        return f"Admg(nodes={list(self.nodes)}, directed={self.directed_edges()}, bidirected={self.bidirected_edges()})"

    def spouses(self, v: str) -> tuple[str, ...]:
        self._check([v])
        return self.sort(self._spouses[v])

    def bidirected_edges(self) -> list[tuple[str, str]]:
        return sorted(self.bidirected)

    def is_adjacent(self, u: str, v: str) -> bool:
        return (u, v) in self.directed or (v, u) in self.directed or (min(u, v), max(u, v)) in self.bidirected

    def districts(self) -> list[frozenset[str]]:
        """Connected components of the bidirected part, ordered by smallest member name."""
        seen: set[str] = set()
        blocks = []
        for v in self.nodes:
            if v not in seen:
                block = self._closure({v}, self._spouses)
                seen |= block
                blocks.append(frozenset(block))
        return sorted(blocks, key=min)

    def district_of(self, v: str) -> frozenset[str]:
        return frozenset(self._closure(self._check([v]), self._spouses))

    def subgraph(self, nodes: Iterable[str]) -> Admg:
        """The subgraph induced by ``nodes``."""
        keep = self._check(nodes)
        return Admg(
            [v for v in self.nodes if v in keep],
            [(u, v) for u, v in self.directed if u in keep and v in keep],
            [(u, v) for u, v in self.bidirected if u in keep and v in keep],
        )

    def remove_nodes(self, nodes: Iterable[str]) -> Admg:
        drop = self._check(nodes)
        return self.subgraph(v for v in self.nodes if v not in drop)

    def mutilate(self, cut_incoming: Iterable[str] = (), cut_outgoing: Iterable[str] = ()) -> Admg:
        """Cut directed edges into ``cut_incoming`` and out of ``cut_outgoing``.

        Bidirected edges touching ``cut_incoming`` go too, since they also point into it.
        """
        inc = self._check(cut_incoming)
        out = self._check(cut_outgoing)
        return Admg(
            self.nodes,
            [(u, v) for u, v in self.directed if v not in inc and u not in out],
            [(u, v) for u, v in self.bidirected if u not in inc and v not in inc],
        )

    def relabel(self, mapping: Mapping[str, str]) -> Admg:
        f = lambda v: mapping.get(v, v)  # noqa: E731
        return Admg(
            [f(v) for v in self.nodes],
            [(f(u), f(v)) for u, v in self.directed],
            [(f(u), f(v)) for u, v in self.bidirected],
        )

    def to_json(self) -> dict:
        return {
            "nodes": list(self.nodes),
            "directed": [list(e) for e in self.directed_edges()],
            "bidirected": [list(e) for e in self.bidirected_edges()],
        }

    def to_edge_list(self) -> str:
        lines = [f"{u} -> {v}" for u, v in self.directed_edges()]
        lines += [f"{u} <-> {v}" for u, v in self.bidirected_edges()]
        connected = {w for e in [*self.directed, *self.bidirected] for w in e}
        lines += [v for v in self.nodes if v not in connected]
        return "\n".join(lines) + "\n"


class LatentDag(_DirectedBase):
    """A DAG in which some nodes are unobserved."""

    def __init__(
        self,
        nodes: Iterable[str] = (),
        directed: Iterable[tuple[str, str]] = (),
        latent: Iterable[str] = (),
    ):
        directed = list(directed)
        nodes = list(nodes) or _ordered(w for e in directed for w in e)
        self._init_directed(nodes, directed)
        self.latent = frozenset(self._check(latent))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LatentDag):
            return NotImplemented
        return (self.nodes, self.directed, self.latent) == (other.nodes, other.directed, other.latent)

    def __hash__(self) -> int:
        return hash((self.nodes, self.directed, self.latent))

    def __repr__(self) -> str:
        return f"LatentDag(nodes={list(self.nodes)}, directed={self.directed_edges()}, latent={sorted(self.latent)})"

    @property
    def observed(self) -> tuple[str, ...]:
        return tuple(v for v in self.nodes if v not in self.latent)

    def relabel(self, mapping: Mapping[str, str]) -> LatentDag:
        f = lambda v: mapping.get(v, v)  # noqa: E731
        return LatentDag(
            [f(v) for v in self.nodes],
            [(f(u), f(v)) for u, v in self.directed],
            [f(v) for v in self.latent],
        )

    def project(self) -> Admg:
        return latent_project(self)

    def to_json(self) -> dict:
        return {
            "nodes": list(self.nodes),
            "directed": [list(e) for e in self.directed_edges()],
            "latent": list(self.sort(self.latent)),
        }

    def to_edge_list(self) -> str:
        lines = [f"{u} -> {v}" for u, v in self.directed_edges()]
        connected = {w for e in self.directed for w in e}
        lines += [v for v in self.nodes if v not in connected]
        lines += [f"latent {v}" for v in self.sort(self.latent)]
        return "\n".join(lines) + "\n"


def _observed_reach(g: LatentDag, start: str) -> set[str]:
    """Observed nodes reachable from ``start`` by directed paths whose interior is latent."""
    found = set()
    stack = list(g._children[start])
    seen = set(stack)
    while stack:
        w = stack.pop()
        if w in g.latent:
            for c in g._children[w]:
                if c not in seen:
                    seen.add(c)
                    stack.append(c)
        else:
            found.add(w)
    return found


def latent_project(g: LatentDag) -> Admg:
    """Project out the latent nodes of ``g``, giving an ADMG over its observed nodes."""
    directed = [(u, v) for u in g.observed for v in _observed_reach(g, u)]
    bidirected = []
    for u in g.sort(g.latent):
        reached = g.sort(_observed_reach(g, u))
        bidirected += [(a, b) for i, a in enumerate(reached) for b in reached[i + 1 :]]
    return Admg(g.observed, directed, bidirected)


_NAME = r"[A-Za-z_][A-Za-z0-9_.]*"
_EDGE_RE = re.compile(rf"({_NAME})\s*(<->|->|<-)\s*({_NAME})\Z")
_LATENT_RE = re.compile(rf"latent\s+({_NAME}(?:\s*,\s*{_NAME})*)\Z")
_NODE_RE = re.compile(rf"({_NAME})\Z")


def _parse_edge_list(text: str) -> Admg | LatentDag:
    nodes: list[str] = []
    directed: list[tuple[str, str]] = []
    bidirected: list[tuple[str, str]] = []
    latent: list[str] = []
    seen_edges: set = set()
    latent_line = bidirected_line = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if m := _LATENT_RE.match(line):
            names = [n.strip() for n in m.group(1).split(",")]
            nodes += names
            latent += names
            latent_line = latent_line or lineno
            continue
        if m := _EDGE_RE.match(line):
            u, arrow, v = m.groups()
            if u == v:
                raise GraphError(f"self-loop on {u}", lineno)
            nodes += [u, v]
            if arrow == "<-":
                u, v, arrow = v, u, "->"
            key = (u, v) if arrow == "->" else ("<->", min(u, v), max(u, v))
            if key in seen_edges:
                raise GraphError(f"duplicate edge {line}", lineno)
            seen_edges.add(key)
            if arrow == "->":
                directed.append((u, v))
            else:
                bidirected.append((u, v))
                bidirected_line = bidirected_line or lineno
            continue
        if m := _NODE_RE.match(line):
            nodes.append(m.group(1))
            continue
        raise GraphError(f"malformed line: {raw.strip()!r}", lineno)
    if latent and bidirected:
        raise GraphError("bidirected edges are not allowed in a graph with latent nodes", bidirected_line)
    try:
        if latent:
            return LatentDag(_ordered(nodes), directed, latent)
        return Admg(_ordered(nodes), directed, bidirected)
    except GraphError as exc:
        raise GraphError(str(exc)) from None


def _parse_json(text: str) -> Admg | LatentDag:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphError(f"invalid JSON: {exc.msg}", exc.lineno) from None
    if not isinstance(data, dict):
        raise GraphError("graph JSON must be an object")
    directed = [tuple(e) for e in data.get("directed", [])]
    bidirected = [tuple(e) for e in data.get("bidirected", [])]
    latent = list(data.get("latent", []))
    for e in [*directed, *bidirected]:
        if len(e) != 2:
            raise GraphError(f"edge {list(e)} must have two endpoints")
    if len(set(directed)) != len(directed):
        raise GraphError("duplicate directed edge")
    if len({tuple(sorted(e)) for e in bidirected}) != len(bidirected):
        raise GraphError("duplicate bidirected edge")
    if "nodes" in data:
        nodes = list(data["nodes"])
        if len(set(nodes)) != len(nodes):
            raise GraphError("duplicate node")
    else:
        nodes = list(_ordered([w for e in [*directed, *bidirected] for w in e] + latent))
    if latent:
        if bidirected:
            raise GraphError("bidirected edges are not allowed in a graph with latent nodes")
        return LatentDag(nodes, directed, latent)
    return Admg(nodes, directed, bidirected)


def parse_graph(text: str, format: str = "edge-list") -> Admg | LatentDag:
    """Parse a graph from edge-list or JSON text.

    A graph that declares ``latent`` nodes parses to a :class:`LatentDag`,
    otherwise to an :class:`Admg`.
    """
    if format == "edge-list":
        return _parse_edge_list(text)
    if format == "json":
        return _parse_json(text)
    raise ValueError(f"unknown graph format {format!r}")


def load_graph(path, format: str | None = None, project: bool = True) -> Admg | LatentDag:
    """Read a graph file; the format defaults to JSON for ``.json`` files.

    Latent DAGs are projected to ADMGs unless ``project`` is false.
    """
    path = str(path)
    with open(path, encoding="utf-8") as handle:
        text = handle.read()
    if format is None:
        format = "json" if path.endswith(".json") else "edge-list"
    g = parse_graph(text, format)
    if project and isinstance(g, LatentDag):
        return latent_project(g)
    return g
