"""Margin of robustness of pure Nash equilibria.

The margin of an equilibrium ``x`` is the infimum sup-norm of a utility
perturbation that destroys the equilibrium. It equals half the smallest
deviation margin over players. Perturbations of strictly smaller norm never
break ``x``; for every ``eps > 0`` there is one of norm ``margin + eps`` that
does (:func:`construct_breaking_perturbation`). The infimum is not attained.

Note: the classical Prisoner's Dilemma with payoffs (a, b, c, d) has deviation
margins ``a - d`` for both players, hence margin ``(a - d) / 2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Hashable, NamedTuple, Sequence

import numpy as np

from .core import (
    FiniteGame,
    Perturbation,
    Profile,
    best_deviation,
    deviation_margins,
    game_distance,
    is_nash,
    require_nash,
    table_is_nash,
)
from .errors import DomainError, InputError, InvariantViolation

INTERIOR_SCALE = 0.99
OUTSIDE_SCALE = 2.0


@dataclass(frozen=True)
class RobustnessReport:
    profile: Profile
    per_player_chi: dict[Hashable, Any]
    margin: Any
    binding_players: tuple[Hashable, ...]

    def to_dict(self) -> dict:
        return {
            "profile": list(self.profile),
            "per_player_chi": [{"player": p, "chi": c} for p, c in self.per_player_chi.items()],
            "margin": self.margin,
            "binding_players": list(self.binding_players),
        }


def margin_of_robustness(game: FiniteGame, x: Sequence[int]) -> RobustnessReport:
    """Half the minimum deviation margin at a Nash equilibrium ``x``.

    Raises:
        DomainError: ``x`` is not a Nash equilibrium of ``game``.
    """
    prof = require_nash(game, x, "margin of robustness")
    chis = deviation_margins(game, prof)
    lowest = min(chis)
    binding = tuple(p for p, c in zip(game.players, chis) if c == lowest)
    margin = lowest if lowest == math.inf else lowest / 2
    return RobustnessReport(prof, dict(zip(game.players, chis)), margin, binding)


class PersistenceCheck(NamedTuple):
    lemma_applies: bool
    still_nash: bool


def persists_under(game: FiniteGame, x: Sequence[int], delta: Perturbation) -> PersistenceCheck:
    """Check the per-player sufficient condition ``||delta_i|| <= chi_i / 2`` and
    compare with the ground truth on ``game + delta``."""
    prof = require_nash(game, x, "perturbation tolerance")
    if delta.deltas.shape != game.utilities.shape:
        raise InputError(f"perturbation shape {delta.deltas.shape} != game shape {game.utilities.shape}")
    chis = deviation_margins(game, prof)
    norms = delta.player_norms
    applies = all(2 * norms[k] <= c for k, c in enumerate(chis))
    return PersistenceCheck(bool(applies), is_nash(game + delta, prof))


def breaking_witness(game: FiniteGame, x: Sequence[int]) -> tuple[int, Profile]:
    """Binding player position and its best deviation (lowest index on ties)."""
    prof = game.validate_profile(x)
    chis = deviation_margins(game, prof)
    finite = [(c, k) for k, c in enumerate(chis) if c != math.inf]
    if not finite:
        raise DomainError("no player has a deviation; the equilibrium cannot be broken")
    _, pos = min(finite)
    return pos, best_deviation(game, prof, game.players[pos])


def construct_breaking_perturbation(game: FiniteGame, x: Sequence[int], epsilon: Any) -> Perturbation:
    """Perturbation of norm ``margin + epsilon`` under which ``x`` stops being Nash.

    Only the binding player's utilities at ``x`` and at its best deviation ``y``
    change: ``delta(y) = -delta(x) = (u(x) - u(y)) / 2 + epsilon``.
    """
    if not epsilon > 0:
        raise InputError(f"epsilon must be positive, got {epsilon!r}")
    prof = require_nash(game, x, "breaking perturbation")
    pos, y = breaking_witness(game, prof)
    u = game.utilities[pos]
    shift = (u[prof] - u[y]) / 2 + epsilon
    deltas = Perturbation.zeros(game).deltas.copy()
    deltas[(pos,) + y] = shift
    deltas[(pos,) + prof] = -shift
    return Perturbation(deltas)


def _stream(seed: int, regime: int, sample: int) -> np.random.Generator:
    # counter-based: every (seed, regime, sample) triple owns an independent stream
    return np.random.Generator(np.random.Philox(key=seed, counter=[0, 0, regime, sample]))


def scaled_uniform(shape: tuple[int, ...], rng: np.random.Generator, norm: float) -> np.ndarray:
    """Uniform random deltas rescaled to the given sup-norm."""
    d = rng.uniform(-1.0, 1.0, size=shape)
    peak = np.abs(d).max()
    return d * (norm / peak) if peak > 0 and norm > 0 else np.zeros_like(d)


def _count_breaks(game: FiniteGame, prof: Profile, seed: int, regime: int, samples: int, norm: float) -> int:
    u = game.utilities
    return sum(
        not table_is_nash(u + scaled_uniform(u.shape, _stream(seed, regime, k), norm), prof)
        for k in range(samples)
    )


@dataclass
class RegimeCount:
    samples: int
    breaks: int
    norm: float


@dataclass
class FuzzReport:
    profile: Profile
    seed: int
    margin: Any
    epsilon: float
    regimes: dict[str, RegimeCount] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        inside = self.regimes["interior"]
        witness = self.regimes["witness"]
        return inside.breaks == 0 and witness.breaks == witness.samples

    def to_dict(self) -> dict:
        return {
            "profile": list(self.profile),
            "seed": self.seed,
            "margin": self.margin,
            "epsilon": self.epsilon,
            "passed": self.passed,
            "regimes": {
                k: {"samples": r.samples, "breaks": r.breaks, "norm": r.norm} for k, r in self.regimes.items()
            },
        }


def fuzz_margin(
    game: FiniteGame, x: Sequence[int], samples: int, seed: int, epsilon: float = 1e-2
) -> FuzzReport:
    """Seeded statistical check of the margin.

    Three regimes, ``samples`` draws each:

    * ``interior``: uniform perturbations scaled to ``0.99 * margin``; must never break.
    * ``witness``: the constructive perturbation at ``margin + epsilon``; must always break.
    * ``outside``: uniform perturbations scaled to ``2 * margin``; break rate recorded.

    Raises:
        InvariantViolation: an interior perturbation broke the equilibrium.
    """
    if int(samples) < 1:
        raise InputError("samples must be >= 1")
    if int(seed) < 0:
        raise InputError("seed must be a non-negative integer")
    samples, seed = int(samples), int(seed)
    report = margin_of_robustness(game, x)
    prof, mu = report.profile, report.margin
    if mu == math.inf:
        raise DomainError("no player has a deviation; nothing to fuzz")
    mu_f = float(mu)
    out = FuzzReport(prof, seed, mu, epsilon)

    breaks = _count_breaks(game, prof, seed, 0, samples, INTERIOR_SCALE * mu_f)
    out.regimes["interior"] = RegimeCount(samples, breaks, INTERIOR_SCALE * mu_f)
    if breaks:
        raise InvariantViolation(f"{breaks} perturbations below the margin broke {prof}")

    witness = construct_breaking_perturbation(game, prof, epsilon)
    perturbed = game.utilities + witness.deltas
    breaks = sum(not table_is_nash(perturbed, prof) for _ in range(samples))
    out.regimes["witness"] = RegimeCount(samples, breaks, float(witness.norm))

    breaks = _count_breaks(game, prof, seed, 2, samples, OUTSIDE_SCALE * mu_f)
    out.regimes["outside"] = RegimeCount(samples, breaks, OUTSIDE_SCALE * mu_f)
    return out


def projection_check(game: FiniteGame, x: Sequence[int], R: Sequence[Hashable], restricted: FiniteGame) -> bool:
    """Whether ``||u - restricted|| <= margin(x)``; when it holds, ``x_R`` must be
    Nash in ``restricted``.

    Raises:
        InvariantViolation: the hypothesis holds but ``x_R`` is not Nash.
    """
    prof = require_nash(game, x, "projection check")
    if set(R) != set(restricted.players) or len(set(R)) != len(tuple(R)):
        raise InputError("restricted game must be defined on exactly the players in R")
    mu = margin_of_robustness(game, prof).margin
    if not game_distance(game, restricted) <= mu:
        return False
    y = tuple(prof[game.index(p)] for p in restricted.players)
    if not is_nash(restricted, y):
        raise InvariantViolation(f"projection {y} is not Nash although the distance is within the margin")
    return True
