"""Finite games in strategic form.

A game with players ``V`` and action sets ``A_i = {0, ..., |A_i| - 1}`` is stored
as one dense array ``utilities`` of shape ``(|V|, |A_1|, ..., |A_n|)``; entry
``utilities[i][x]`` is ``u_i(x)``. Profiles are tuples of action indices and are
ordered lexicographically (row-major), which fixes enumeration order and every
tie-break in the package.

Tables are float64 unless built from :class:`fractions.Fraction` values, in
which case they are kept as object arrays and all arithmetic is exact.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Any, Hashable, Iterator, Sequence

import numpy as np

from .errors import CapacityError, DomainError, InputError

Profile = tuple[int, ...]

DEFAULT_PROFILE_BUDGET = 2**24
POTENTIAL_TOLERANCE = 1e-9


def spin_to_index(s: int) -> int:
    """Map a binary action label -1/+1 to its index 0/1."""
    if s not in (-1, 1):
        raise InputError(f"binary action must be -1 or +1, got {s!r}")
    return (s + 1) // 2


def index_to_spin(a: int) -> int:
    return 2 * int(a) - 1


def as_table(values: Any) -> np.ndarray:
    """Convert nested numbers to a float64 array, or to an exact object array
    when any entry is a non-integer :class:`Fraction`."""
    arr = np.asarray(values, dtype=object)
    flat = arr.ravel()
    if any(isinstance(v, Fraction) for v in flat):
        out = np.empty(arr.shape, dtype=object)
        out.ravel()[:] = [Fraction(v) if isinstance(v, (Rational, Fraction)) else _exact(v) for v in flat]
        return out
    return np.asarray(values, dtype=np.float64)


def _exact(v: Any) -> Fraction:
    if isinstance(v, float):
        return Fraction(v)
    raise InputError(f"non-numeric utility entry {v!r}")


def to_exact(values: Any) -> np.ndarray:
    """Object array of :class:`Fraction` (floats converted by their binary value)."""
    arr = np.asarray(values, dtype=object)
    out = np.empty(arr.shape, dtype=object)
    out.ravel()[:] = [v if isinstance(v, Fraction) else Fraction(v) for v in arr.ravel()]
    return out


def is_exact(table: np.ndarray) -> bool:
    return table.dtype == object


@dataclass(frozen=True, eq=False)
class FiniteGame:
    """Dense strategic-form game.

    Args:
        utilities: array of shape ``(n, |A_1|, ..., |A_n|)``.
        players: optional player labels (default ``0..n-1``). Every operation
            that takes a player accepts its label.
    """

    utilities: np.ndarray
    players: tuple[Hashable, ...] | None = None

    def __post_init__(self) -> None:
        table = self.utilities
        if not isinstance(table, np.ndarray) or (table.dtype != object and table.dtype != np.float64):
            table = as_table(table)
        if table.ndim < 2:
            raise InputError("utilities must have shape (n_players, |A_1|, ..., |A_n|)")
        n = table.shape[0]
        if n < 1 or table.ndim != n + 1:
            raise InputError(
                f"utilities of shape {table.shape} do not describe a game: "
                f"expected {table.shape[0]} action axes, got {table.ndim - 1}"
            )
        if any(k < 1 for k in table.shape[1:]):
            raise InputError("every player needs at least one action")
        if table.dtype == object:
            if not all(isinstance(v, (Fraction, int)) or (isinstance(v, float) and math.isfinite(v)) for v in table.ravel()):
                raise InputError("utilities must be finite numbers")
        elif not np.all(np.isfinite(table)):
            raise InputError("utilities must be finite")
        table = table.copy()
        table.setflags(write=False)
        object.__setattr__(self, "utilities", table)

        players = tuple(range(n)) if self.players is None else tuple(self.players)
        if len(players) != n:
            raise InputError(f"expected {n} player labels, got {len(players)}")
        if len(set(players)) != n:
            raise InputError("player labels must be unique")
        object.__setattr__(self, "players", players)
        object.__setattr__(self, "_index", {p: k for k, p in enumerate(players)})

    @classmethod
    def from_function(cls, action_counts: Sequence[int], utility, players=None) -> "FiniteGame":
        """Tabulate ``utility(i, x)`` (``i`` a position, ``x`` a profile)."""
        counts = tuple(int(k) for k in action_counts)
        rows = [[utility(i, x) for x in itertools.product(*map(range, counts))] for i in range(len(counts))]
        return cls(as_table(rows).reshape((len(counts),) + counts), players)

    @property
    def n_players(self) -> int:
        return self.utilities.shape[0]

    @property
    def action_counts(self) -> tuple[int, ...]:
        return self.utilities.shape[1:]

    @property
    def n_profiles(self) -> int:
        return math.prod(self.action_counts)

    @property
    def exact(self) -> bool:
        return is_exact(self.utilities)

    def index(self, player: Hashable) -> int:
        try:
            return self._index[player]
        except (KeyError, TypeError):
            raise InputError(f"unknown player {player!r}") from None

    def validate_profile(self, x: Sequence[int]) -> Profile:
        try:
            prof = tuple(int(a) for a in x)
        except (TypeError, ValueError):
            raise InputError(f"profile must be a sequence of action indices, got {x!r}") from None
        if len(prof) != self.n_players:
            raise InputError(f"profile has {len(prof)} entries, game has {self.n_players} players")
        for a, k, p in zip(prof, self.action_counts, self.players):
            if not 0 <= a < k:
                raise InputError(f"action {a} of player {p!r} outside 0..{k - 1}")
        return prof

    def utility(self, player: Hashable, x: Sequence[int]) -> Any:
        return self.utilities[(self.index(player),) + self.validate_profile(x)]

    def deviation_row(self, pos: int, x: Profile) -> np.ndarray:
        """Utilities of the player at position ``pos`` over its own actions, others fixed at ``x``."""
        idx = list(x)
        idx[pos] = slice(None)
        return self.utilities[(pos,) + tuple(idx)]

    def profiles(self) -> Iterator[Profile]:
        return itertools.product(*map(range, self.action_counts))

    def encode(self, x: Sequence[int]) -> int:
        return int(np.ravel_multi_index(tuple(x), self.action_counts))

    def decode(self, k: int) -> Profile:
        return tuple(int(a) for a in np.unravel_index(k, self.action_counts))

    def shifted(self, player: Hashable, constant: Any) -> "FiniteGame":
        """Copy with ``constant`` added to every entry of one player's table."""
        table = self.utilities.copy()
        table[self.index(player)] = table[self.index(player)] + constant
        return FiniteGame(table, self.players)

    def same_shape(self, other: "FiniteGame") -> bool:
        return self.players == other.players and self.action_counts == other.action_counts

    def __add__(self, delta: "Perturbation") -> "FiniteGame":
        if not isinstance(delta, Perturbation):
            return NotImplemented
        if delta.deltas.shape != self.utilities.shape:
            raise InputError(f"perturbation shape {delta.deltas.shape} != game shape {self.utilities.shape}")
        return FiniteGame(self.utilities + delta.deltas, self.players)


@dataclass(frozen=True, eq=False)
class Perturbation:
    """An additive change ``delta`` to a game's utility tables."""

    deltas: np.ndarray

    def __post_init__(self) -> None:
        d = self.deltas if isinstance(self.deltas, np.ndarray) and self.deltas.dtype in (object, np.float64) else as_table(self.deltas)
        d = d.copy()
        d.setflags(write=False)
        object.__setattr__(self, "deltas", d)

    @classmethod
    def zeros(cls, game: FiniteGame) -> "Perturbation":
        if game.exact:
            return cls(np.full(game.utilities.shape, Fraction(0), dtype=object))
        return cls(np.zeros(game.utilities.shape))

    @property
    def player_norms(self) -> np.ndarray:
        """``||delta_i||_inf`` for each player position."""
        n = self.deltas.shape[0]
        return np.array([np.abs(self.deltas[i]).max() for i in range(n)], dtype=self.deltas.dtype)

    @property
    def norm(self) -> Any:
        return np.abs(self.deltas).max()


def _check_budget(n_profiles: int, budget: int | None, what: str) -> None:
    limit = DEFAULT_PROFILE_BUDGET if budget is None else budget
    if n_profiles > limit:
        raise CapacityError(f"{what} needs {n_profiles} profiles, budget is {limit}")


def deviation_margin(game: FiniteGame, x: Sequence[int], player: Hashable) -> Any:
    """Smallest utility loss of ``player`` over its unilateral deviations from ``x``.

    Negative when a profitable deviation exists. A player with a single action
    has no deviation and gets ``+inf``.
    """
    prof = game.validate_profile(x)
    pos = game.index(player)
    row = game.deviation_row(pos, prof)
    if row.shape[0] == 1:
        return math.inf
    others = np.delete(row, prof[pos])
    return row[prof[pos]] - others.max()


def deviation_margins(game: FiniteGame, x: Sequence[int]) -> list[Any]:
    """All deviation margins at ``x``, in player order."""
    return [deviation_margin(game, x, p) for p in game.players]


def best_deviation(game: FiniteGame, x: Sequence[int], player: Hashable) -> Profile | None:
    """The deviation attaining the deviation margin; lowest action on ties."""
    prof = game.validate_profile(x)
    pos = game.index(player)
    row = game.deviation_row(pos, prof)
    if row.shape[0] == 1:
        return None
    best_a = None
    for a in range(row.shape[0]):
        if a != prof[pos] and (best_a is None or row[a] > row[best_a]):
            best_a = a
    return prof[:pos] + (best_a,) + prof[pos + 1:]


def is_nash(game: FiniteGame, x: Sequence[int], tol: float = 0.0) -> bool:
    return all(deviation_margin(game, x, p) >= -tol for p in game.players)


def table_is_nash(table: np.ndarray, x: Profile) -> bool:
    """Nash test directly on a utility array (no validation); used in hot loops."""
    for pos in range(table.shape[0]):
        idx = list(x)
        idx[pos] = slice(None)
        row = table[(pos,) + tuple(idx)]
        if row.max() > row[x[pos]]:
            return False
    return True


def nash_mask(game: FiniteGame, tol: float = 0.0) -> np.ndarray:
    """Boolean array over the profile space marking pure Nash equilibria."""
    mask = np.ones(game.action_counts, dtype=bool)
    for i in range(game.n_players):
        u = game.utilities[i]
        best = u.max(axis=i, keepdims=True)
        if tol:
            best = best - tol
        mask &= np.asarray(u >= best, dtype=bool)
    return mask


def enumerate_nash(game: FiniteGame, tol: float = 0.0, budget: int | None = None) -> list[Profile]:
    """All pure Nash equilibria in lexicographic order."""
    _check_budget(game.n_profiles, budget, "Nash enumeration")
    return [tuple(int(a) for a in row) for row in np.argwhere(nash_mask(game, tol))]


def lift(table: np.ndarray, positions: Sequence[int], action_counts: Sequence[int]) -> np.ndarray:
    """View a table over the players at ``positions`` as a broadcastable table over all players."""
    positions = list(positions)
    order = np.argsort(positions)
    t = np.transpose(table, order) if table.ndim else table
    shape = [1] * len(action_counts)
    for p in positions:
        shape[p] = action_counts[p]
    return np.reshape(t, shape)


def restricted_distances(u: FiniteGame, v: FiniteGame) -> dict[Hashable, Any]:
    """Per-player ``max_x |u_i(x) - v_i(x_R)|`` for a game ``v`` on a subset ``R`` of ``u``'s players."""
    try:
        positions = [u.index(p) for p in v.players]
    except InputError:
        raise InputError("restricted game has players outside the full game") from None
    for p, k in zip(positions, v.action_counts):
        if u.action_counts[p] != k:
            raise InputError(f"action count mismatch for player {u.players[p]!r}")
    out = {}
    for r, p in enumerate(positions):
        out[v.players[r]] = np.abs(u.utilities[p] - lift(v.utilities[r], positions, u.action_counts)).max()
    return out


def game_distance(u: FiniteGame, v: FiniteGame) -> Any:
    """Infinity-norm distance between two games.

    ``v`` either has the same players and action counts as ``u``, or is a game
    on a subset of ``u``'s players, compared through the projection ``x -> x_R``.
    """
    if u.players == v.players:
        if u.action_counts != v.action_counts:
            raise InputError("games have different action counts")
        return np.abs(u.utilities - v.utilities).max()
    if not set(v.players) <= set(u.players):
        raise InputError("games have incompatible player sets")
    return max(restricted_distances(u, v).values())


@dataclass(frozen=True, eq=False)
class PotentialCertificate:
    """Result of an exact-potential check.

    ``potential`` is the path-integrated candidate, equal to the first player's
    utility at the all-zeros profile; it is only meaningful when ``verified`` is true.
    ``max_violation`` is the worst mismatch of a unilateral utility difference.
    """

    potential: np.ndarray
    verified: bool
    max_violation: Any


def integrate_potential(game: FiniteGame) -> np.ndarray:
    """Candidate potential obtained by changing coordinates one at a time from profile 0.

    ``phi(x) = u_1(0) + sum_k [u_k(x_1..x_k, 0..0) - u_k(x_1..x_{k-1}, 0, 0..0)]``,
    so a one-player game gets ``phi = u_1``.
    """
    counts = game.action_counts
    n = game.n_players
    phi = np.full(counts, game.utilities[(0,) * (n + 1)], dtype=object if game.exact else float)
    for k in range(n):
        t = game.utilities[k][(slice(None),) * (k + 1) + (0,) * (n - k - 1)]
        step = t - t[..., :1]
        phi = phi + np.reshape(step, counts[: k + 1] + (1,) * (n - k - 1))
    return phi


def check_potential(game: FiniteGame, tol: float = POTENTIAL_TOLERANCE, budget: int | None = None) -> PotentialCertificate:
    """Decide whether ``game`` is an exact potential game and recover a potential."""
    _check_budget(game.n_profiles, budget, "potential check")
    phi = integrate_potential(game)
    worst = 0
    for i in range(game.n_players):
        resid = game.utilities[i] - phi
        spread = (resid.max(axis=i) - resid.min(axis=i)).max()
        worst = max(worst, spread)
    return PotentialCertificate(phi, bool(worst <= tol), worst)


def argmax_profiles(table: np.ndarray) -> list[Profile]:
    best = table.max()
    return [tuple(int(a) for a in row) for row in np.argwhere(np.asarray(table == best, dtype=bool))]


def require_nash(game: FiniteGame, x: Sequence[int], what: str) -> Profile:
    prof = game.validate_profile(x)
    if not is_nash(game, prof):
        raise DomainError(f"{what} requires a Nash equilibrium; {prof} is not one")
    return prof
