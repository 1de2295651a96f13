"""Games restricted to a subset of players.

For a split ``V = R | S`` the frozen game ``u^(z)`` fixes the players in ``S`` at
``z`` and the averaged game averages ``u^(z)`` uniformly over all ``z``. A
profile ``y`` over ``R`` is *uniformly Nash* when it is Nash in every ``u^(z)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Hashable, Sequence

import numpy as np

from .core import (
    FiniteGame,
    Profile,
    _check_budget,
    deviation_margins,
    is_nash,
    restricted_distances,
)
from .errors import InputError

MODES = ("averaged", "brute-force")


@dataclass(frozen=True)
class PartitionContext:
    """Split of a game's players into ``R`` (kept) and ``S = V \\ R`` (frozen or averaged).

    ``R`` and ``S`` hold player positions in ascending order.
    """

    players: tuple[Hashable, ...]
    action_counts: tuple[int, ...]
    R: tuple[int, ...]
    S: tuple[int, ...]

    @classmethod
    def from_game(cls, game: FiniteGame, R: Sequence[Hashable]) -> "PartitionContext":
        members = list(R)
        if not members:
            raise InputError("R must be non-empty")
        if len(set(members)) != len(members):
            raise InputError("R contains duplicate players")
        r = tuple(sorted(game.index(p) for p in members))
        s = tuple(k for k in range(game.n_players) if k not in r)
        return cls(game.players, game.action_counts, r, s)

    @property
    def R_players(self) -> tuple[Hashable, ...]:
        return tuple(self.players[k] for k in self.R)

    @property
    def S_players(self) -> tuple[Hashable, ...]:
        return tuple(self.players[k] for k in self.S)

    @property
    def R_counts(self) -> tuple[int, ...]:
        return tuple(self.action_counts[k] for k in self.R)

    @property
    def S_counts(self) -> tuple[int, ...]:
        return tuple(self.action_counts[k] for k in self.S)

    @property
    def n_complement_profiles(self) -> int:
        return math.prod(self.S_counts)

    def split(self, x: Sequence[int]) -> tuple[Profile, Profile]:
        x = tuple(x)
        return tuple(x[k] for k in self.R), tuple(x[k] for k in self.S)

    def join(self, y: Sequence[int], z: Sequence[int]) -> Profile:
        out = [0] * len(self.players)
        for k, a in zip(self.R, y):
            out[k] = int(a)
        for k, a in zip(self.S, z):
            out[k] = int(a)
        return tuple(out)

    def _validate(self, prof: Sequence[int], side: str) -> Profile:
        positions = self.R if side == "R" else self.S
        try:
            prof = tuple(int(a) for a in prof)
        except (TypeError, ValueError):
            raise InputError(f"profile over {side} must contain action indices") from None
        if len(prof) != len(positions):
            raise InputError(f"profile over {side} needs {len(positions)} entries, got {len(prof)}")
        for a, k in zip(prof, positions):
            if not 0 <= a < self.action_counts[k]:
                raise InputError(f"action {a} of player {self.players[k]!r} out of range")
        return prof

    def validate_R(self, y: Sequence[int]) -> Profile:
        return self._validate(y, "R")

    def validate_S(self, z: Sequence[int]) -> Profile:
        return self._validate(z, "S")


@dataclass(frozen=True, eq=False)
class RestrictedGame(FiniteGame):
    """A game on ``R``; ``provenance`` is ``frozen``, ``averaged`` or ``external``."""

    provenance: str = "external"
    frozen_at: Profile | None = None


def freeze(game: FiniteGame, ctx: PartitionContext, z: Sequence[int]) -> RestrictedGame:
    """The game ``u^(z)`` on ``R`` with ``S`` fixed at ``z``."""
    z = ctx.validate_S(z)
    idx = [slice(None)] * game.n_players
    for k, a in zip(ctx.S, z):
        idx[k] = a
    table = game.utilities[list(ctx.R)][(slice(None),) + tuple(idx)]
    return RestrictedGame(table, ctx.R_players, provenance="frozen", frozen_at=z)


def average_over_complement(game: FiniteGame, ctx: PartitionContext, budget: int | None = None) -> RestrictedGame:
    """Uniform average of ``u^(z)`` over every ``z`` in ``X_S``."""
    _check_budget(ctx.n_complement_profiles, budget, "averaging over the complement")
    table = game.utilities[list(ctx.R)]
    if ctx.S:
        axes = tuple(1 + k for k in ctx.S)
        if game.exact:
            table = table.sum(axis=axes) / ctx.n_complement_profiles
        else:
            table = table.mean(axis=axes)
    return RestrictedGame(table, ctx.R_players, provenance="averaged")


@dataclass
class CertificateResult:
    """Outcome of a uniform-Nash test.

    ``slack`` maps each player in ``R`` to its margin over the threshold (absent
    in brute-force mode). ``counterexample`` is the lowest ``z`` for which ``y``
    fails, when one was found.
    """

    certified: bool
    mode: str
    profile: Profile
    slack: dict[Hashable, Any] = field(default_factory=dict)
    counterexample: Profile | None = None
    nash_of_average: bool | None = None

    def to_dict(self) -> dict:
        return {
            "certified": self.certified,
            "mode": self.mode,
            "profile": list(self.profile),
            "slack": [{"player": p, "slack": v} for p, v in self.slack.items()],
            "counterexample": None if self.counterexample is None else list(self.counterexample),
            "nash_of_average": self.nash_of_average,
        }


def uniform_nash_violations(game: FiniteGame, ctx: PartitionContext, y: Sequence[int]) -> np.ndarray:
    """Boolean array over ``X_S``: true where ``y`` fails to be Nash in ``u^(z)``."""
    y = ctx.validate_R(y)
    bad = np.zeros(ctx.S_counts, dtype=bool)
    for k, pos in enumerate(ctx.R):
        idx: list[Any] = [slice(None)] * game.n_players
        for r, a in zip(ctx.R, y):
            if r != pos:
                idx[r] = a
        # remaining axes: pos and all of S, in position order
        sub = game.utilities[(pos,) + tuple(idx)]
        own_axis = sum(1 for s in ctx.S if s < pos)
        current = np.take(sub, y[k], axis=own_axis)
        bad |= np.asarray(sub.max(axis=own_axis) > current, dtype=bool)
    return bad


def uniform_nash_certificate(
    game: FiniteGame,
    ctx: PartitionContext,
    y: Sequence[int],
    mode: str = "averaged",
    budget: int | None = None,
) -> CertificateResult:
    """Test whether ``y`` is Nash in ``u^(z)`` for every ``z``.

    ``averaged`` certifies when ``y`` is Nash in the averaged game and every
    player ``i`` in ``R`` satisfies ``chi_i(y) >= 2 ||u_i - avg_i||_inf`` (sound,
    not necessary). ``brute-force`` checks every ``z`` directly.
    """
    y = ctx.validate_R(y)
    if mode == "averaged":
        _check_budget(game.n_profiles, budget, "exact distance to the averaged game")
        avg = average_over_complement(game, ctx, budget)
        nash = is_nash(avg, y)
        dist = restricted_distances(game, avg)
        slack = {p: c - 2 * dist[p] for p, c in zip(avg.players, deviation_margins(avg, y))}
        ok = nash and all(v >= 0 for v in slack.values())
        return CertificateResult(bool(ok), mode, y, slack, nash_of_average=nash)
    if mode == "brute-force":
        _check_budget(ctx.n_complement_profiles, budget, "brute-force uniform check")
        bad = uniform_nash_violations(game, ctx, y)
        hits = np.argwhere(bad)
        cex = tuple(int(a) for a in hits[0]) if len(hits) else None
        return CertificateResult(cex is None, mode, y, counterexample=cex)
    raise InputError(f"unknown mode {mode!r}; expected one of {MODES}")
