"""Weighted logical interaction graph extracted from a circuit."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

from .circuit import Circuit, two_qubit_ops
from .errors import (IndexRangeError, NegativeWeightError, NonFiniteWeightError,
                     ParameterError)


@dataclass(frozen=True)
class InteractionGraph:
    """Undirected weights keyed by canonical pairs ``(i, j)`` with ``i < j``."""

    num_qubits: int
    weights: Mapping[tuple[int, int], float] = field(default_factory=dict)
    gamma: float = 1.0

    def __post_init__(self):
        canon = {}
        for (i, j), w in dict(self.weights).items():
            key = (min(i, j), max(i, j))
            canon[key] = canon.get(key, 0.0) + float(w)
        object.__setattr__(self, "weights", canon)
        object.__setattr__(self, "_nbrs", None)

    def weight(self, i: int, j: int) -> float:
        return self.weights.get((min(i, j), max(i, j)), 0.0)

    @property
    def edges(self) -> list[tuple[int, int, float]]:
        return [(i, j, w) for (i, j), w in sorted(self.weights.items())]

    def neighbors(self) -> list[list[tuple[int, float]]]:
        """Adjacency lists ``[(u, w), ...]`` per qubit, sorted by ``u``."""
        if self._nbrs is None:
            nbrs: list[list[tuple[int, float]]] = [[] for _ in range(self.num_qubits)]
            for (i, j), w in sorted(self.weights.items()):
                if w == 0:
                    continue
                nbrs[i].append((j, w))
                nbrs[j].append((i, w))
            for lst in nbrs:
                lst.sort()
            object.__setattr__(self, "_nbrs", nbrs)
        return self._nbrs

    def validate(self) -> None:
        """Check endpoint ranges and that every weight is finite and nonnegative."""
        for (i, j), w in self.weights.items():
            if i == j or not (0 <= i < self.num_qubits and 0 <= j < self.num_qubits):
                raise IndexRangeError(
                    f"edge ({i}, {j}) has an invalid endpoint for n={self.num_qubits}")
            if not math.isfinite(w):
                raise NonFiniteWeightError(f"non-finite weight {w} on edge ({i}, {j})")
            if w < 0:
                raise NegativeWeightError(f"negative weight {w} on edge ({i}, {j})")


def extract_weights(c: Circuit, gamma: float = 1.0) -> InteractionGraph:
    """Accumulate ``gamma**t`` per pair, ``t`` being the 0-based position of the
    operation among all two-qubit operations of ``c``."""
    gamma = float(gamma)
    if not (0.0 < gamma <= 1.0):
        raise ParameterError(f"gamma must lie in (0, 1], got {gamma}")
    weights: dict[tuple[int, int], float] = {}
    for t, (_, pair) in enumerate(two_qubit_ops(c)):
        weights[pair] = weights.get(pair, 0.0) + (1.0 if gamma == 1.0 else gamma ** t)
    # gamma**t underflows to 0.0 for long circuits; zero-weight pairs are dropped
    weights = {k: w for k, w in weights.items() if w > 0.0}
    return InteractionGraph(c.num_qubits, weights, gamma)


def weighted_degree(g: InteractionGraph, v: int) -> float:
    if not 0 <= v < g.num_qubits:
        raise IndexRangeError(f"qubit {v} out of range [0, {g.num_qubits})")
    return sum(w for _, w in g.neighbors()[v])
