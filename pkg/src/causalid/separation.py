"""m-separation on ADMGs and enumeration of implied conditional independencies."""

from __future__ import annotations

import itertools
from collections.abc import Iterable
from dataclasses import dataclass

from .graph import Admg, GraphError

__all__ = ["CiStatement", "m_separated", "d_separated", "implied_independencies"]


@dataclass(frozen=True)
class CiStatement:
    """``left _||_ right | given``."""

    left: frozenset[str]
    right: frozenset[str]
    given: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        for attr in ("left", "right", "given"):
            object.__setattr__(self, attr, frozenset(getattr(self, attr)))
        if not self.left or not self.right:
            raise ValueError("both sides of an independence statement must be non-empty")
        if self.left & self.right or self.left & self.given or self.right & self.given:
            raise ValueError("independence statement sets must be disjoint")

    def __str__(self) -> str:
        text = f"{', '.join(sorted(self.left))} _||_ {', '.join(sorted(self.right))}"
        if self.given:
            text += " | " + ", ".join(sorted(self.given))
        return text

    @classmethod
    def parse(cls, text: str) -> CiStatement:
        left, sep, rest = text.partition("_||_")
        if not sep:
            raise ValueError(f"not an independence statement: {text!r}")
        right, _, given = rest.partition("|")

        def split(part: str) -> frozenset[str]:
            return frozenset(x.strip() for x in part.split(",") if x.strip())

        return cls(split(left), split(right), split(given))

    def sort_key(self) -> tuple:
        return (sorted(self.left), sorted(self.right), len(self.given), sorted(self.given))


def _validate(g: Admg, a, b, z) -> tuple[set, set, set]:
    a, b, z = set(a), set(b), set(z)
    g._check(a | b | z)
    if not a or not b:
        raise ValueError("separation needs non-empty node sets on both sides")
    if a & b or a & z or b & z:
        raise ValueError("separation node sets must be pairwise disjoint")
    return a, b, z


def m_separated(g: Admg, a: Iterable[str], b: Iterable[str], z: Iterable[str] = ()) -> bool:
    """Whether ``a`` and ``b`` are m-separated by ``z`` in ``g``.

    Walks the graph tracking whether each node is entered through an
    arrowhead; a node entered that way may be passed through another arrowhead
    edge only when it is an ancestor of ``z`` (a collider), and otherwise only
    when it is not in ``z``.
    """
    a, b, z = _validate(g, a, b, z)
    an_z = g.ancestors(z)
    # state: (node, entered through an arrowhead at node)
    stack = [(v, False) for v in a]
    seen = set(stack)
    start = set(a)
    while stack:
        v, into = stack.pop()
        if v in b:
            return False
        moves = []
        tail_ok = v in start or v not in z  # leaving v through its own tail end
        if into:
            head_ok = v in an_z  # v is a collider on the continued path
        else:
            head_ok = tail_ok
        for c in g._children[v]:
            if tail_ok:
                moves.append((c, True))
        for p in g._parents[v]:
            if head_ok:
                moves.append((p, False))
        for s in g._spouses[v]:
            if head_ok:
                moves.append((s, True))
        for state in moves:
            if state not in seen:
                seen.add(state)
                stack.append(state)
    return True


def d_separated(g: Admg, a: Iterable[str], b: Iterable[str], z: Iterable[str] = ()) -> bool:
    """d-separation; ``g`` must have no bidirected edges."""
    if g.bidirected:
        raise GraphError("d-separation is defined for graphs without bidirected edges")
    return m_separated(g, a, b, z)


def implied_independencies(g: Admg, max_given: int = 3) -> list[CiStatement]:
    """One independence per non-adjacent pair, using the smallest separating set found.

    Candidate conditioning sets are tried by size, then lexicographically, up
    to ``max_given`` nodes.
    """
    if max_given < 0:
        raise ValueError("max_given must be non-negative")
    names = sorted(g.nodes)
    statements = []
    for i, u in enumerate(names):
        for v in names[i + 1 :]:
            if g.is_adjacent(u, v):
                continue
            others = [w for w in names if w not in (u, v)]
            for size in range(min(max_given, len(others)) + 1):
                found = next(
                    (zs for zs in itertools.combinations(others, size) if m_separated(g, {u}, {v}, zs)),
                    None,
                )
                if found is not None:
                    statements.append(CiStatement(frozenset({u}), frozenset({v}), frozenset(found)))
                    break
    return statements
