"""Network games: graphs, pairwise-separable games and the mixed
coordination/anti-coordination construction.

Binary games use action index 0 for -1 and 1 for +1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Hashable, Iterable, Mapping, Sequence

import numpy as np

from .core import (
    FiniteGame,
    Profile,
    _check_budget,
    argmax_profiles,
    as_table,
    check_potential,
    index_to_spin,
    spin_to_index,
    to_exact,
)
from .errors import CapacityError, DomainError, InputError, InvariantViolation
from .subgames import CertificateResult, RestrictedGame

SPINS = np.array([-1, 1])
EXHAUSTIVE_BUDGET = 2**20
THRESHOLDS = ("nominal", "conservative", "exact")


@dataclass(frozen=True, eq=False)
class Graph:
    """Directed weighted graph without self-loops.

    Undirected graphs store both orientations of each edge with equal weight.
    Use :meth:`from_edges` rather than the raw constructor.
    """

    nodes: tuple[Hashable, ...]
    weights: Mapping[tuple[Hashable, Hashable], float]
    undirected: bool = True

    def __post_init__(self) -> None:
        nodes = tuple(self.nodes)
        if len(set(nodes)) != len(nodes):
            raise InputError("duplicate node labels")
        index = {v: k for k, v in enumerate(nodes)}
        weights = {}
        for (i, j), w in self.weights.items():
            if i not in index or j not in index:
                raise InputError(f"edge ({i!r}, {j!r}) has an unknown endpoint")
            if i == j:
                raise InputError(f"self-loop at node {i!r}")
            if not (w >= 0 and math.isfinite(w)):
                raise InputError(f"edge ({i!r}, {j!r}) has invalid weight {w!r}")
            weights[(i, j)] = w
        if self.undirected:
            for (i, j), w in weights.items():
                if weights.get((j, i)) != w:
                    raise InputError(f"undirected graph lacks symmetric edge ({j!r}, {i!r}) of weight {w!r}")
        ordered = dict(sorted(weights.items(), key=lambda e: (index[e[0][0]], index[e[0][1]])))
        nbrs: dict[Hashable, list] = {v: [] for v in nodes}
        for i, j in ordered:
            nbrs[i].append(j)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", ordered)
        object.__setattr__(self, "_index", index)
        object.__setattr__(self, "_nbrs", {v: tuple(n) for v, n in nbrs.items()})

    @classmethod
    def from_edges(
        cls,
        edges: Iterable[Sequence],
        nodes: Sequence[Hashable] | None = None,
        directed: bool = False,
    ) -> "Graph":
        """Build from ``(i, j)`` or ``(i, j, w)`` tuples (default weight 1).

        For undirected graphs each edge may be listed in one or both orientations.
        """
        weights: dict = {}
        seen: list = [] if nodes is None else list(nodes)
        for e in edges:
            if len(e) not in (2, 3):
                raise InputError(f"edge {e!r} must be (i, j) or (i, j, w)")
            i, j = e[0], e[1]
            w = e[2] if len(e) == 3 else 1
            for v in (i, j):
                if nodes is None and v not in seen:
                    seen.append(v)
            pairs = [(i, j)] if directed else [(i, j), (j, i)]
            for p in pairs:
                if p in weights and weights[p] != w:
                    raise InputError(f"conflicting weights for edge {p!r}")
                weights[p] = w
        return cls(tuple(seen), weights, undirected=not directed)

    @property
    def edges(self) -> tuple[tuple[Hashable, Hashable], ...]:
        return tuple(self.weights)

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    def index(self, v: Hashable) -> int:
        try:
            return self._index[v]
        except (KeyError, TypeError):
            raise InputError(f"unknown node {v!r}") from None

    def neighbors(self, v: Hashable) -> tuple[Hashable, ...]:
        """Out-neighbourhood of ``v`` in node order."""
        self.index(v)
        return self._nbrs[v]

    def weight(self, i: Hashable, j: Hashable) -> float:
        return self.weights.get((i, j), 0)

    def degree(self, v: Hashable) -> float:
        """Weighted out-degree."""
        return sum(self.weights[(v, j)] for j in self.neighbors(v))

    def split_degree(self, v: Hashable, subset: Iterable[Hashable]) -> int:
        """Number of out-neighbours of ``v`` inside ``subset``."""
        members = set(subset)
        return sum(1 for j in self.neighbors(v) if j in members)

    def undirected_edges(self) -> list[tuple[Hashable, Hashable]]:
        """Each undirected edge once, as ``(i, j)`` with ``i`` before ``j`` in node order."""
        return [(i, j) for i, j in self.weights if self._index[i] < self._index[j]]


@dataclass(frozen=True)
class SpinAssignment:
    """Per-node +1 (coordinating) or -1 (anti-coordinating), aligned with ``graph.nodes``."""

    nodes: tuple[Hashable, ...]
    values: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.nodes) != len(self.values):
            raise InputError("one spin per node required")
        if any(v not in (-1, 1) for v in self.values):
            raise InputError("spins must be -1 or +1")

    @classmethod
    def of(cls, graph: Graph, xi: Mapping[Hashable, int] | Sequence[int]) -> "SpinAssignment":
        if isinstance(xi, SpinAssignment):
            if xi.nodes != graph.nodes:
                raise InputError("spin assignment is for a different node set")
            return xi
        if isinstance(xi, Mapping):
            missing = [v for v in graph.nodes if v not in xi]
            if missing:
                raise InputError(f"no spin for nodes {missing}")
            return cls(graph.nodes, tuple(int(xi[v]) for v in graph.nodes))
        return cls(graph.nodes, tuple(int(s) for s in xi))

    @classmethod
    def constant(cls, graph: Graph, s: int) -> "SpinAssignment":
        return cls(graph.nodes, (s,) * graph.n_nodes)

    @classmethod
    def from_coordinating(cls, graph: Graph, coordinating: Iterable[Hashable]) -> "SpinAssignment":
        c = set(coordinating)
        return cls(graph.nodes, tuple(1 if v in c else -1 for v in graph.nodes))

    @property
    def coordinating(self) -> tuple[Hashable, ...]:
        return tuple(v for v, s in zip(self.nodes, self.values) if s == 1)

    @property
    def anti_coordinating(self) -> tuple[Hashable, ...]:
        return tuple(v for v, s in zip(self.nodes, self.values) if s == -1)

    def __getitem__(self, v: Hashable) -> int:
        return self.values[self.nodes.index(v)]


@dataclass(frozen=True, eq=False)
class PairwiseNetworkGame:
    """``u_i(x) = sum_{j in N_i} u_ij(x_i, x_j)`` on a graph.

    ``edge_utils[(i, j)]`` is an ``|A_i| x |A_j|`` table. Utilities are evaluated
    locally, so graphs far beyond the dense-table budget are fine as long as
    only local quantities are requested.
    """

    graph: Graph
    action_counts: tuple[int, ...]
    edge_utils: Mapping[tuple[Hashable, Hashable], np.ndarray]
    xi: SpinAssignment | None = None

    @property
    def players(self) -> tuple[Hashable, ...]:
        return self.graph.nodes

    @property
    def n_players(self) -> int:
        return self.graph.n_nodes

    @property
    def n_profiles(self) -> int:
        return math.prod(self.action_counts)

    def validate_profile(self, x: Sequence[int]) -> Profile:
        prof = tuple(int(a) for a in x)
        if len(prof) != self.n_players:
            raise InputError(f"profile has {len(prof)} entries, game has {self.n_players} players")
        for a, k, v in zip(prof, self.action_counts, self.players):
            if not 0 <= a < k:
                raise InputError(f"action {a} of node {v!r} outside 0..{k - 1}")
        return prof

    def local_utilities(self, v: Hashable, x: Sequence[int]) -> np.ndarray:
        """Utilities of node ``v`` over its own actions, others fixed at ``x``."""
        g = self.graph
        pos = g.index(v)
        total = np.zeros(self.action_counts[pos], dtype=object if self.exact else float)
        for j in g.neighbors(v):
            total = total + self.edge_utils[(v, j)][:, x[g.index(j)]]
        return total

    @property
    def exact(self) -> bool:
        return any(t.dtype == object for t in self.edge_utils.values())

    def utility(self, v: Hashable, x: Sequence[int]) -> Any:
        x = self.validate_profile(x)
        return self.local_utilities(v, x)[x[self.graph.index(v)]]

    def deviation_margin(self, v: Hashable, x: Sequence[int]) -> Any:
        x = self.validate_profile(x)
        row = self.local_utilities(v, x)
        a = x[self.graph.index(v)]
        if row.shape[0] == 1:
            return math.inf
        return row[a] - np.delete(row, a).max()

    def is_nash(self, x: Sequence[int]) -> bool:
        return all(self.deviation_margin(v, x) >= 0 for v in self.players)

    def to_finite_game(self, budget: int | None = None) -> FiniteGame:
        """Dense tables of the induced game (capacity error beyond ``budget`` profiles)."""
        _check_budget(self.n_profiles, budget, "dense network game")
        n = self.n_players
        counts = self.action_counts
        table = np.zeros((n,) + counts, dtype=object if self.exact else float)
        g = self.graph
        for (i, j), u in self.edge_utils.items():
            pi, pj = g.index(i), g.index(j)
            shape = [1] * n
            shape[pi], shape[pj] = counts[pi], counts[pj]
            t = u if pi < pj else u.T
            table[pi] = table[pi] + np.reshape(t, shape)
        return FiniteGame(table, self.players)

    def coupling_strength(self, R: Iterable[Hashable]) -> Any:
        """``M``: largest sup-norm of an edge table from ``R`` into its complement."""
        members = set(R)
        vals = [np.abs(u).max() for (i, j), u in self.edge_utils.items() if i in members and j not in members]
        return max(vals) if vals else 0

    def formula_potential(self) -> np.ndarray | None:
        """Closed-form potential ``+-1/2 sum_ij W_ij x_i x_j`` for constant-spin games, else None."""
        if self.xi is None or len(set(self.xi.values)) > 1:
            return None
        _check_budget(self.n_profiles, None, "potential table")
        sign = self.xi.values[0] if self.xi.values else 1
        n = self.n_players
        g = self.graph
        phi = np.zeros(self.action_counts)
        for (i, j), w in g.weights.items():
            pi, pj = g.index(i), g.index(j)
            shape = [1] * n
            shape[pi] = shape[pj] = 2
            phi = phi + np.reshape(w * np.multiply.outer(SPINS, SPINS), shape)
        return sign * phi / 2


def build_pairwise(
    graph: Graph,
    edge_utils: Mapping[tuple[Hashable, Hashable], Any],
    action_counts: Mapping[Hashable, int] | Sequence[int] | None = None,
) -> PairwiseNetworkGame:
    """Pairwise-separable game from one utility table per directed edge.

    Action counts are inferred from the tables when not given; isolated nodes
    default to two actions.
    """
    tables = {}
    for e, t in edge_utils.items():
        if tuple(e) not in graph.weights:
            raise InputError(f"table given for non-edge {e!r}")
        arr = as_table(t)
        if arr.ndim != 2:
            raise InputError(f"table for edge {e!r} must be two-dimensional")
        arr.setflags(write=False)
        tables[tuple(e)] = arr
    missing = [e for e in graph.edges if e not in tables]
    if missing:
        raise InputError(f"missing utility tables for edges {missing}")

    counts: dict[Hashable, int] = {}
    if action_counts is not None:
        seq = [action_counts[v] for v in graph.nodes] if isinstance(action_counts, Mapping) else list(action_counts)
        if len(seq) != graph.n_nodes:
            raise InputError("one action count per node required")
        counts = {v: int(k) for v, k in zip(graph.nodes, seq)}
    for (i, j), t in tables.items():
        for v, k in ((i, t.shape[0]), (j, t.shape[1])):
            if counts.setdefault(v, k) != k:
                raise InputError(f"edge ({i!r}, {j!r}) disagrees on the action count of {v!r}")
    resolved = tuple(counts.get(v, 2) for v in graph.nodes)
    if any(k < 1 for k in resolved):
        raise InputError("every node needs at least one action")
    exact = any(t.dtype == object for t in tables.values())
    if exact:
        tables = {e: to_exact(t) for e, t in tables.items()}
    return PairwiseNetworkGame(graph, resolved, tables)


def coord_anticoord(graph: Graph, xi: SpinAssignment | Mapping | Sequence[int]) -> PairwiseNetworkGame:
    """Network game with ``u_i(x) = xi_i * sum_j W_ij x_i x_j`` over actions -1/+1."""
    if not graph.undirected:
        raise InputError("coordination/anti-coordination games need an undirected graph")
    spins = SpinAssignment.of(graph, xi)
    tables = {}
    for (i, j), w in graph.weights.items():
        t = spins[i] * w * np.multiply.outer(SPINS, SPINS).astype(float)
        tables[(i, j)] = t
    game = build_pairwise(graph, tables, [2] * graph.n_nodes)
    return PairwiseNetworkGame(game.graph, game.action_counts, game.edge_utils, spins)


def spins_to_profile(spins: Sequence[int]) -> Profile:
    return tuple(spin_to_index(s) for s in spins)


def profile_to_spins(x: Sequence[int]) -> tuple[int, ...]:
    return tuple(index_to_spin(a) for a in x)


@dataclass(frozen=True)
class CohesionResult:
    cohesive: bool
    slack: dict[Hashable, int]

    def __bool__(self) -> bool:
        return self.cohesive


def is_cohesive(graph: Graph, R: Iterable[Hashable]) -> CohesionResult:
    """Whether every node of ``R`` has at least as many neighbours inside ``R`` as outside.

    ``slack[i] = |N_i & R| - |N_i \\ R|``. Neighbours are counted, weights ignored.
    """
    members = list(R)
    if not members:
        raise InputError("R must be non-empty")
    for v in members:
        graph.index(v)
    inside = set(members)
    slack = {}
    for v in graph.nodes:
        if v in inside:
            nbrs = graph.neighbors(v)
            w_in = sum(1 for j in nbrs if j in inside)
            slack[v] = w_in - (len(nbrs) - w_in)
    return CohesionResult(all(s >= 0 for s in slack.values()), slack)


def _averaged_row(game: PairwiseNetworkGame, v: Hashable, y: Mapping[Hashable, int], inside: set) -> np.ndarray:
    """Averaged-game utilities of ``v`` over its actions, ``R``-neighbours at ``y``."""
    total = np.zeros(game.action_counts[game.graph.index(v)], dtype=object if game.exact else float)
    for j in game.graph.neighbors(v):
        u = game.edge_utils[(v, j)]
        if j in inside:
            total = total + u[:, y[j]]
        else:
            total = total + u.sum(axis=1) / u.shape[1]
    return total


def averaged_distance(game: PairwiseNetworkGame, v: Hashable, inside: set) -> Any:
    """``max_x |u_v(x) - avg_v(x_R)|`` in closed form.

    Terms from neighbours in ``R`` cancel; the remaining ones depend on distinct
    coordinates ``x_j``, so for each own action the extreme is a sum of
    per-neighbour extremes.
    """
    best = 0
    for a in range(game.action_counts[game.graph.index(v)]):
        hi = lo = 0
        for j in game.graph.neighbors(v):
            if j in inside:
                continue
            row = game.edge_utils[(v, j)][a]
            d = row - row.sum() / row.shape[0]
            hi, lo = hi + d.max(), lo + d.min()
        best = max(best, hi, -lo)
    return best


def coupling_condition(
    game: PairwiseNetworkGame,
    R: Iterable[Hashable],
    y: Sequence[int],
    threshold: str = "exact",
) -> CertificateResult:
    """Coupling test for a profile ``y`` over ``R`` that is Nash in the averaged game.

    Compares ``chi_i(y)`` in the averaged game with, per ``i`` in ``R``:

    * ``nominal``: ``M * w_i^S``
    * ``conservative``: ``4 * M * w_i^S``
    * ``exact``: ``2 * ||u_i - avg_i||_inf``

    Only ``exact`` is a sound uniform-Nash certificate; the other two are screens.

    Raises:
        DomainError: ``y`` is not Nash in the averaged game.
    """
    if threshold not in THRESHOLDS:
        raise InputError(f"unknown threshold {threshold!r}; expected one of {THRESHOLDS}")
    g = game.graph
    members = list(R)
    if not members:
        raise InputError("R must be non-empty")
    members = sorted(members, key=g.index)
    y = tuple(int(a) for a in y)
    if len(y) != len(members):
        raise InputError(f"profile over R needs {len(members)} entries")
    inside = set(members)
    at = dict(zip(members, y))
    for v, a in at.items():
        if not 0 <= a < game.action_counts[g.index(v)]:
            raise InputError(f"action {a} of node {v!r} out of range")
    M = game.coupling_strength(inside)

    slack = {}
    for v in members:
        row = _averaged_row(game, v, at, inside)
        a = at[v]
        chi = math.inf if row.shape[0] == 1 else row[a] - np.delete(row, a).max()
        if chi < 0:
            raise DomainError(f"profile is not Nash in the averaged game (node {v!r} deviates)")
        w_out = len(g.neighbors(v)) - g.split_degree(v, inside)
        if threshold == "nominal":
            bound = M * w_out
        elif threshold == "conservative":
            bound = 4 * M * w_out
        else:
            bound = 2 * averaged_distance(game, v, inside)
        slack[v] = chi - bound
    ok = all(s >= 0 for s in slack.values())
    return CertificateResult(bool(ok), f"coupling-{threshold}", y, slack, nash_of_average=True)


def restricted_game(game: PairwiseNetworkGame, fixed: Mapping[Hashable, int], budget: int | None = None) -> RestrictedGame:
    """Dense game on the nodes not in ``fixed``, with ``fixed`` nodes frozen."""
    g = game.graph
    free = [v for v in g.nodes if v not in fixed]
    if not free:
        raise InputError("no free players left")
    counts = tuple(game.action_counts[g.index(v)] for v in free)
    _check_budget(math.prod(counts), budget, "restricted network game")
    pos = {v: k for k, v in enumerate(free)}
    n = len(free)
    table = np.zeros((n,) + counts, dtype=object if game.exact else float)
    for (i, j), u in game.edge_utils.items():
        if i not in pos:
            continue
        pi = pos[i]
        shape = [1] * n
        shape[pi] = counts[pi]
        if j in pos:
            pj = pos[j]
            shape[pj] = counts[pj]
            t = u if pi < pj else u.T
        else:
            t = u[:, fixed[j]]
        table[pi] = table[pi] + np.reshape(t, shape)
    frozen_at = tuple(fixed[v] for v in g.nodes if v in fixed)
    return RestrictedGame(table, tuple(free), provenance="frozen", frozen_at=frozen_at)


def pair_potential(u_ij: np.ndarray, u_ji: np.ndarray) -> np.ndarray | None:
    """Potential of the two-player game (``u_ij``, ``u_ji``) indexed by ``(x_i, x_j)``, or None."""
    two = FiniteGame(np.stack([u_ij, np.asarray(u_ji).T]))
    cert = check_potential(two)
    return cert.potential if cert.verified else None


@dataclass(frozen=True, eq=False)
class RestrictedPotential:
    """Potential of the game on ``S`` with ``R`` frozen, built from pairwise potentials:
    ``phi(z) = sum_{edges in S} phi_ij(z_i, z_j) + sum_{i in S, j in R} u_ij(z_i, y_j)``.
    """

    nodes: tuple[Hashable, ...]
    counts: tuple[int, ...]
    pair_terms: Mapping[tuple[int, int], np.ndarray]
    unary_terms: Mapping[int, np.ndarray]

    def __call__(self, z: Sequence[int]) -> Any:
        val = 0
        for (a, b), t in self.pair_terms.items():
            val = val + t[z[a], z[b]]
        for a, t in self.unary_terms.items():
            val = val + t[z[a]]
        return val

    def table(self, budget: int | None = None) -> np.ndarray:
        _check_budget(math.prod(self.counts), budget, "potential table")
        n = len(self.counts)
        exact = any(t.dtype == object for t in [*self.pair_terms.values(), *self.unary_terms.values()])
        phi = np.zeros(self.counts, dtype=object if exact else float)
        for (a, b), t in self.pair_terms.items():
            shape = [1] * n
            shape[a], shape[b] = self.counts[a], self.counts[b]
            phi = phi + np.reshape(t, shape)
        for a, t in self.unary_terms.items():
            shape = [1] * n
            shape[a] = self.counts[a]
            phi = phi + np.reshape(t, shape)
        return phi


def restricted_potential(game: PairwiseNetworkGame, fixed: Mapping[Hashable, int]) -> RestrictedPotential:
    """Potential for the game on the free nodes with ``fixed`` frozen.

    Raises:
        DomainError: the graph is directed or some free-free edge game is not
            an exact potential game.
    """
    g = game.graph
    if not g.undirected:
        raise DomainError("restricted potential construction needs an undirected graph")
    free = [v for v in g.nodes if v not in fixed]
    pos = {v: k for k, v in enumerate(free)}
    pairs = {}
    unary: dict[int, Any] = {}
    for i, j in g.undirected_edges():
        if i in pos and j in pos:
            phi = pair_potential(game.edge_utils[(i, j)], game.edge_utils[(j, i)])
            if phi is None:
                raise DomainError(f"edge game ({i!r}, {j!r}) is not a potential game")
            pairs[(pos[i], pos[j])] = phi
    for (i, j), u in game.edge_utils.items():
        if i in pos and j not in pos:
            unary[pos[i]] = unary.get(pos[i], 0) + u[:, fixed[j]]
    counts = tuple(game.action_counts[g.index(v)] for v in free)
    return RestrictedPotential(tuple(free), counts, pairs, unary)


@dataclass
class DescentResult:
    profile: Profile
    sweeps: int
    steps: int
    potential_trace: list = field(default_factory=list)


def best_response_descent(
    action_counts: Sequence[int],
    local: Callable[[int, list[int]], np.ndarray],
    start: Sequence[int],
    potential: Callable[[Sequence[int]], Any] | None = None,
    max_sweeps: int | None = None,
) -> DescentResult:
    """Asynchronous round-robin best response.

    A player moves only on strict improvement, to its lowest-indexed best
    action. Stops after a sweep with no move. ``local(p, x)`` returns player
    ``p``'s utilities over its own actions at ``x``. When ``potential`` is
    given, its value after every move is recorded in ``potential_trace``
    (first entry: the start).

    Raises:
        CapacityError: no fixpoint within ``max_sweeps`` (default ``|X|``).
    """
    x = [int(a) for a in start]
    limit = math.prod(action_counts) if max_sweeps is None else max_sweeps
    trace = [potential(x)] if potential else []
    steps = 0
    for sweep in range(1, limit + 1):
        moved = False
        for p in range(len(x)):
            row = local(p, x)
            best = int(np.argmax(row))
            if row[best] > row[x[p]]:
                x[p] = best
                steps += 1
                moved = True
                if potential:
                    trace.append(potential(x))
        if not moved:
            return DescentResult(tuple(x), sweep, steps, trace)
    raise CapacityError(f"best response did not settle within {limit} sweeps")


def _seeded_start(counts: Sequence[int], seed: int) -> Profile:
    rng = np.random.Generator(np.random.Philox(key=seed))
    return tuple(int(rng.integers(k)) for k in counts)


def maximize_restricted_potential(
    game: FiniteGame,
    method: str = "exhaustive",
    seed: int = 0,
    budget: int | None = EXHAUSTIVE_BUDGET,
) -> Profile:
    """Nash equilibrium of a potential game by potential maximisation.

    ``exhaustive`` returns the lexicographically first global maximiser of the
    potential. ``best-response`` runs :func:`best_response_descent` from a
    seeded random start and returns its fixpoint.

    Raises:
        DomainError: the game is not an exact potential game.
    """
    cert = check_potential(game, budget=None if method == "best-response" else budget)
    if not cert.verified:
        raise DomainError("game is not an exact potential game")
    if method == "exhaustive":
        _check_budget(game.n_profiles, budget, "exhaustive potential maximisation")
        return argmax_profiles(cert.potential)[0]
    if method == "best-response":
        phi = cert.potential
        local = lambda p, x: game.deviation_row(p, tuple(x))  # noqa: E731
        res = best_response_descent(game.action_counts, local, _seeded_start(game.action_counts, seed),
                                    potential=lambda x: phi[tuple(x)])
        return res.profile
    raise InputError(f"unknown method {method!r}")


@dataclass
class ConstructionResult:
    """Outcome of :func:`construct_mixed_nash`.

    ``certified`` is false when the sufficient condition failed at ``stage``
    (``cohesion`` or ``coupling``); the game may still have equilibria.
    """

    certified: bool
    sign: int
    stage: str
    profile: Profile | None = None
    method: str | None = None
    cohesion: CohesionResult | None = None
    coupling: CertificateResult | None = None
    reason: str = ""

    def to_dict(self) -> dict:
        return {
            "certified": self.certified,
            "sign": self.sign,
            "stage": self.stage,
            "profile": None if self.profile is None else list(profile_to_spins(self.profile)),
            "method": self.method,
            "cohesion_slack": None if self.cohesion is None else [
                {"node": v, "slack": s} for v, s in self.cohesion.slack.items()
            ],
            "coupling": None if self.coupling is None else {
                **self.coupling.to_dict(), "profile": list(profile_to_spins(self.coupling.profile))
            },
            "reason": self.reason,
        }


def anticoordinating_equilibrium(
    game: PairwiseNetworkGame,
    fixed: Mapping[Hashable, int],
    exhaustive_budget: int = EXHAUSTIVE_BUDGET,
    seed: int = 0,
) -> tuple[dict[Hashable, int], str]:
    """Nash equilibrium of the game on the free nodes with ``fixed`` frozen.

    Exhaustive potential maximisation within budget, best response beyond it.
    Returns the free nodes' actions and the method used.
    """
    g = game.graph
    free = [v for v in g.nodes if v not in fixed]
    if not free:
        return {}, "none"
    phi = restricted_potential(game, fixed)
    counts = phi.counts
    if math.prod(counts) <= exhaustive_budget:
        sub = restricted_game(game, fixed, budget=exhaustive_budget)
        cert = check_potential(sub)
        table = phi.table()
        gap = cert.potential - table
        if not cert.verified or (gap.max() - gap.min()) > 1e-9:
            raise InvariantViolation("pairwise potential construction disagrees with the restricted game")
        z = argmax_profiles(table)[0]
        return dict(zip(free, z)), "exhaustive"

    def local(p: int, z: list[int]) -> np.ndarray:
        v = free[p]
        total = np.zeros(counts[p], dtype=object if game.exact else float)
        for j in g.neighbors(v):
            col = fixed[j] if j in fixed else z[free_pos[j]]
            total = total + game.edge_utils[(v, j)][:, col]
        return total

    free_pos = {v: k for k, v in enumerate(free)}
    res = best_response_descent(counts, local, _seeded_start(counts, seed))
    return dict(zip(free, res.profile)), "best-response"


def construct_mixed_nash(
    graph: Graph,
    xi: SpinAssignment | Mapping | Sequence[int],
    sign: int = 1,
    exhaustive_budget: int = EXHAUSTIVE_BUDGET,
    seed: int = 0,
) -> ConstructionResult:
    """Pure Nash equilibrium of a mixed coordination/anti-coordination game.

    Steps: cohesiveness of the coordinating set ``V_c``; consensus ``sign`` on
    ``V_c``; exact coupling test; equilibrium of the anti-coordinating block
    with ``V_c`` frozen; final Nash check on the full game. With ``V_c`` empty
    the first three steps are skipped and the result for ``sign = -1`` is the
    negation of the one for ``+1``.

    Raises:
        InvariantViolation: the assembled profile is not Nash.
    """
    if sign not in (-1, 1):
        raise InputError("sign must be +1 or -1")
    game = coord_anticoord(graph, xi)
    spins = game.xi
    coordinating = spins.coordinating
    fixed: dict[Hashable, int] = {}
    cohesion = coupling = None
    if coordinating:
        cohesion = is_cohesive(graph, coordinating)
        if not cohesion:
            bad = [v for v, s in cohesion.slack.items() if s < 0]
            return ConstructionResult(False, sign, "cohesion", cohesion=cohesion,
                                      reason=f"coordinating set is not cohesive at nodes {bad}")
        a = spin_to_index(sign)
        fixed = {v: a for v in coordinating}
        coupling = coupling_condition(game, coordinating, [a] * len(coordinating), "exact")
        if not coupling.certified:
            return ConstructionResult(False, sign, "coupling", cohesion=cohesion, coupling=coupling,
                                      reason="exact coupling threshold fails (non-unit weights)")
    z, method = anticoordinating_equilibrium(game, fixed, exhaustive_budget, seed)
    actions = {**fixed, **z}
    if not coordinating and sign == -1:
        actions = {v: 1 - a for v, a in actions.items()}
    x = tuple(actions[v] for v in graph.nodes)
    if not game.is_nash(x):
        raise InvariantViolation(f"constructed profile {profile_to_spins(x)} is not a Nash equilibrium")
    return ConstructionResult(True, sign, "done", x, method, cohesion, coupling)


def to_dot(
    graph: Graph,
    x: Sequence[int] | None = None,
    chi: Mapping[Hashable, Any] | None = None,
    coordinating: Iterable[Hashable] = (),
    spins: bool = True,
) -> str:
    """Graphviz rendering.

    Coordinating nodes are boxes filled green, others ellipses; the outline
    colour encodes the action (blue for +1 / index 1, red otherwise); labels
    read ``i:chi=v``.
    """
    coord = set(coordinating)
    lines = ["graph G {" if graph.undirected else "digraph G {"]
    for k, v in enumerate(graph.nodes):
        label = str(v) if chi is None else f"{v}:χ={_fmt(chi[v])}"
        attrs = [f'label="{label}"', f'shape={"box" if v in coord else "ellipse"}']
        if v in coord:
            attrs += ["style=filled", "fillcolor=green"]
        if x is not None:
            a = x[k]
            attrs.append(f'color={"blue" if a == 1 else "red"}')
            attrs.append(f'xlabel="{index_to_spin(a):+d}"' if spins else f'xlabel="{a}"')
        lines.append(f'  "{v}" [{", ".join(attrs)}];')
    pairs = graph.undirected_edges() if graph.undirected else graph.edges
    arrow = "--" if graph.undirected else "->"
    for i, j in pairs:
        w = graph.weight(i, j)
        extra = "" if w == 1 else f' [label="{_fmt(w)}"]'
        lines.append(f'  "{i}" {arrow} "{j}"{extra};')
    lines.append("}")
    return "\n".join(lines) + "\n"


def _fmt(v: Any) -> str:
    if v == math.inf:
        return "inf"
    return format(float(v), ".12g")
