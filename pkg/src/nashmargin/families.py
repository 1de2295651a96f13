"""Standard games used in examples, tests and documents."""

from __future__ import annotations

from fractions import Fraction
from typing import Any

import numpy as np

from .core import FiniteGame, _check_budget, as_table
from .errors import ValidationError
from .network import Graph, PairwiseNetworkGame, coord_anticoord


def prisoner_dilemma(a: Any, b: Any, c: Any, d: Any) -> FiniteGame:
    """Symmetric 2x2 game with actions -1 (defect) and +1 (cooperate).

    Row player payoffs: ``(-1,-1) -> a``, ``(-1,+1) -> c``, ``(+1,-1) -> d``,
    ``(+1,+1) -> b``; the column player's table is the transpose.
    Requires ``c > b > a > d``.
    """
    if not c > b > a > d:
        raise ValidationError(f"prisoner's dilemma needs c > b > a > d, got a={a}, b={b}, c={c}, d={d}")
    row = [[a, c], [d, b]]
    col = [[a, d], [c, b]]
    return FiniteGame(as_table([row, col]))


def public_good(graph: Graph, c: Any, budget: int | None = None) -> FiniteGame:
    """One-shot public good game on an undirected graph; actions 0 and 1.

    Contributing pays ``1 - c``; free-riding pays 1 next to a contributor and
    0 otherwise. Exact when ``c`` is a :class:`Fraction`.
    """
    if not 0 < c < 1:
        raise ValidationError(f"public good cost must satisfy 0 < c < 1, got {c}")
    n = graph.n_nodes
    _check_budget(2**n, budget, "public good game")
    shape = (2,) * n
    grid = np.indices(shape)
    exact = isinstance(c, Fraction)
    table = np.empty((n,) + shape, dtype=object if exact else float)
    one, zero = (Fraction(1), Fraction(0)) if exact else (1.0, 0.0)
    for i, v in enumerate(graph.nodes):
        nbrs = [graph.index(j) for j in graph.neighbors(v)]
        served = np.any(grid[nbrs] == 1, axis=0) if nbrs else np.zeros(shape, dtype=bool)
        t = np.full(shape, zero, dtype=table.dtype)
        t[served] = one
        t[grid[i] == 1] = one - c
        table[i] = t
    return FiniteGame(table, graph.nodes)


def discoordination() -> PairwiseNetworkGame:
    """Two nodes joined by one edge: node 0 coordinates, node 1 anti-coordinates."""
    g = Graph.from_edges([(0, 1)])
    return coord_anticoord(g, [1, -1])
