"""Discrete probability tables used to evaluate expressions."""

from __future__ import annotations

import itertools
from collections.abc import Iterable, Mapping, Sequence

import numpy as np

__all__ = ["JointTable", "ValueTable"]

NORMALIZATION_TOL = 1e-9


class ValueTable:
    """A real-valued function over the joint assignments of named discrete variables.

    ``values`` has one axis per entry of ``variables``, in the same order.
    """

    __slots__ = ("variables", "cards", "values")

    def __init__(self, variables: Sequence[str], values: np.ndarray):
        values = np.array(values, dtype=float)
        if values.ndim != len(variables):
            raise ValueError(f"{len(variables)} variables but array has {values.ndim} axes")
        if len(set(variables)) != len(variables):
            raise ValueError("repeated variable")
        self.variables = tuple(variables)
        self.cards = tuple(values.shape)
        self.values = values
        self.values.flags.writeable = False

    def __getitem__(self, assignment: Mapping[str, int]) -> float:
        return float(self.values[tuple(assignment[v] for v in self.variables)])

    def __repr__(self) -> str:
        return f"ValueTable({self.variables!r}, shape={self.cards})"

    def card(self, name: str) -> int:
        return self.cards[self.variables.index(name)]

    def aligned(self, variables: Sequence[str]) -> np.ndarray:
        """Return ``values`` broadcastable against an array whose axes are ``variables``.

        Every variable of this table must appear in ``variables``.
        """
        variables = tuple(variables)
        missing = set(self.variables) - set(variables)
        if missing:
            raise KeyError(f"variables {sorted(missing)} not in target axes")
        present = [v for v in variables if v in self.variables]
        arr = np.transpose(self.values, [self.variables.index(v) for v in present])
        shape = [arr.shape[present.index(v)] if v in self.variables else 1 for v in variables]
        return arr.reshape(shape)

    def expand(self, variables: Sequence[str], cards: Mapping[str, int]) -> ValueTable:
        variables = tuple(variables)
        shape = tuple(cards[v] for v in variables)
        return ValueTable(variables, np.broadcast_to(self.aligned(variables), shape).copy())

    def items(self) -> Iterable[tuple[tuple[int, ...], float]]:
        for index in itertools.product(*(range(c) for c in self.cards)):
            yield index, float(self.values[index])


class JointTable:
    """A normalized joint distribution over discrete variables.

    ``probabilities`` may be a dense array (one axis per variable) or a mapping
    from full assignment tuples to probabilities; missing assignments are zero.
    """

    def __init__(
        self,
        variables: Sequence[tuple[str, int]],
        probabilities: np.ndarray | Mapping[tuple[int, ...], float],
        *,
        tol: float = NORMALIZATION_TOL,
    ):
        variables = tuple((str(name), int(card)) for name, card in variables)
        names = [name for name, _ in variables]
        if len(set(names)) != len(names):
            raise ValueError("repeated variable in joint table")
        if any(card < 1 for _, card in variables):
            raise ValueError("cardinalities must be positive")
        shape = tuple(card for _, card in variables)
        if isinstance(probabilities, Mapping):
            array = np.zeros(shape)
            for assignment, p in probabilities.items():
                assignment = tuple(assignment)
                if len(assignment) != len(shape) or any(
                    not 0 <= a < c for a, c in zip(assignment, shape)
                ):
                    raise ValueError(f"assignment {assignment} does not fit variables {variables}")
                array[assignment] = p
        else:
            array = np.array(probabilities, dtype=float)
            if array.shape != shape:
                raise ValueError(f"array shape {array.shape} does not match cardinalities {shape}")
        if (array < 0).any():
            raise ValueError("probabilities must be non-negative")
        total = array.sum()
        if abs(total - 1.0) > tol:
            raise ValueError(f"probabilities sum to {total}, not 1")
        array.flags.writeable = False
        self.variables = variables
        self.names = tuple(names)
        self.cards = shape
        self.array = array

    def __repr__(self) -> str:
        return f"JointTable({self.variables!r})"

    @property
    def cardinalities(self) -> dict[str, int]:
        return dict(self.variables)

    @property
    def probabilities(self) -> dict[tuple[int, ...], float]:
        return {
            index: float(self.array[index])
            for index in itertools.product(*(range(c) for c in self.cards))
        }

    def marginal(self, keep: Iterable[str]) -> ValueTable:
        """Marginal probabilities over ``keep`` (in the table's variable order)."""
        keep = set(keep)
        unknown = keep - set(self.names)
        if unknown:
            raise KeyError(f"variables {sorted(unknown)} not in table")
        axes = tuple(i for i, name in enumerate(self.names) if name not in keep)
        return ValueTable([n for n in self.names if n in keep], self.array.sum(axis=axes))

    def marginalize(self, keep: Iterable[str]) -> JointTable:
        m = self.marginal(keep)
        return JointTable([(v, c) for v, c in zip(m.variables, m.cards)], m.values)
