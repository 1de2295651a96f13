import json
import math
from fractions import Fraction

import jsonschema
import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import complete, games, path
from nashmargin import (
    DomainError,
    FiniteGame,
    InvariantViolation,
    Perturbation,
    construct_breaking_perturbation,
    enumerate_nash,
    fuzz_margin,
    is_nash,
    margin_of_robustness,
    persists_under,
    projection_check,
)
from nashmargin.documents import load_schema, plain
from nashmargin.families import public_good
from nashmargin.network import coord_anticoord, spins_to_profile
from nashmargin.robustness import _stream, scaled_uniform
from nashmargin.subgames import PartitionContext, RestrictedGame, average_over_complement, freeze

MM = (0, 0)


class TestMargin:
    def test_prisoner(self, pd):
        r = margin_of_robustness(pd, MM)
        assert r.per_player_chi == {0: 1, 1: 1}
        assert r.margin == 0.5
        assert r.binding_players == (0, 1)

    def test_prisoner_exact(self, pd_exact):
        assert margin_of_robustness(pd_exact, MM).margin == Fraction(1, 2)

    def test_triangle_consensus_is_min_degree(self):
        game = coord_anticoord(complete(3), [1] * 3).to_finite_game()
        assert margin_of_robustness(game, (1, 1, 1)).margin == 2

    def test_public_good(self):
        game = public_good(path(3), Fraction(3, 10))
        assert margin_of_robustness(game, (1, 0, 1)).margin == Fraction(3, 20)

    def test_rejects_non_nash(self, pd):
        with pytest.raises(DomainError):
            margin_of_robustness(pd, (1, 1))

    def test_report_schema(self, pd):
        doc = plain(margin_of_robustness(pd, MM).to_dict())
        jsonschema.validate(doc, load_schema("robustness_report"))

    @given(games())
    def test_report_consistency(self, game):
        for x in enumerate_nash(game):
            r = margin_of_robustness(game, x)
            assert r.margin == min(r.per_player_chi.values()) / 2 or r.margin == math.inf
            assert r.margin >= 0
            assert r.binding_players


class TestPersistence:
    def test_zero(self, pd):
        assert persists_under(pd, MM, Perturbation.zeros(pd)) == (True, True)

    def test_small_perturbations_keep_nash(self, pd):
        for k in range(50):
            d = scaled_uniform(pd.utilities.shape, _stream(7, 0, k), 0.4)
            assert persists_under(pd, MM, Perturbation(d)) == (True, True)

    def test_swing_breaks(self, pd):
        d = np.zeros(pd.utilities.shape)
        d[0, 1, 0] = 0.6
        d[0, 0, 0] = -0.6
        assert persists_under(pd, MM, Perturbation(d)) == (False, False)

    @given(games(), st.data())
    def test_lemma_sound(self, game, data):
        eqs = enumerate_nash(game)
        if not eqs:
            return
        x = data.draw(st.sampled_from(eqs))
        scale = data.draw(st.sampled_from([0.25, 0.5, 1.0, 2.0, 4.0]))
        seed = data.draw(st.integers(0, 2**32))
        d = scaled_uniform(game.utilities.shape, _stream(seed, 0, 0), scale)
        applies, still = persists_under(game, x, Perturbation(d))
        assert still or not applies


class TestBreaking:
    def test_prisoner(self, pd):
        delta = construct_breaking_perturbation(pd, MM, 0.01)
        assert delta.norm == pytest.approx(0.51, abs=1e-15)
        assert not is_nash(pd + delta, MM)

    def test_exact_norm(self, pd_exact):
        delta = construct_breaking_perturbation(pd_exact, MM, Fraction(1, 100))
        assert delta.norm == Fraction(51, 100)

    def test_tied_optimum(self):
        g = FiniteGame(np.array([[4.0, 4.0]]))
        delta = construct_breaking_perturbation(g, (0,), 0.01)
        assert delta.norm == 0.01
        assert not is_nash(g + delta, (0,))

    def test_triangle(self):
        game = coord_anticoord(complete(3), [1] * 3).to_finite_game()
        delta = construct_breaking_perturbation(game, (1, 1, 1), 0.1)
        assert delta.norm == pytest.approx(2.1, abs=1e-12)
        assert not is_nash(game + delta, (1, 1, 1))

    def test_nothing_to_break(self):
        g = FiniteGame(np.array([[[1.0]], [[2.0]]]).reshape(2, 1, 1))
        with pytest.raises(DomainError):
            construct_breaking_perturbation(g, (0, 0), 0.1)

    @given(games(), st.sampled_from([1e-1, 1e-3, 1e-6]))
    def test_norm_is_margin_plus_epsilon(self, game, eps):
        for x in enumerate_nash(game):
            mu = margin_of_robustness(game, x).margin
            if mu == math.inf:
                continue
            delta = construct_breaking_perturbation(game, x, eps)
            assert abs(delta.norm - (mu + eps)) <= 1e-12
            assert not is_nash(game + delta, x)


class TestFuzz:
    def test_prisoner(self, pd):
        r = fuzz_margin(pd, MM, samples=200, seed=3)
        assert r.regimes["interior"].breaks == 0
        assert r.regimes["witness"].breaks == 200
        assert r.passed
        jsonschema.validate(plain(r.to_dict()), load_schema("fuzz_report"))

    def test_reproducible(self, pd):
        a = fuzz_margin(pd, MM, samples=100, seed=11).to_dict()
        b = fuzz_margin(pd, MM, samples=100, seed=11).to_dict()
        assert json.dumps(plain(a)) == json.dumps(plain(b))

    def test_seed_changes_outside_regime(self):
        game = coord_anticoord(complete(4), [1] * 4).to_finite_game()
        counts = {fuzz_margin(game, (1,) * 4, 300, s).regimes["outside"].breaks for s in range(4)}
        assert len(counts) > 1

    def test_zero_margin(self):
        g = FiniteGame(np.array([[4.0, 4.0]]))
        r = fuzz_margin(g, (0,), samples=20, seed=0)
        assert r.regimes["interior"].norm == 0 and r.regimes["interior"].breaks == 0

    def test_streams_independent_of_order(self):
        a = scaled_uniform((2, 2, 2), _stream(5, 0, 9), 1.0)
        _ = scaled_uniform((2, 2, 2), _stream(5, 0, 3), 1.0)
        b = scaled_uniform((2, 2, 2), _stream(5, 0, 9), 1.0)
        np.testing.assert_array_equal(a, b)
        assert np.abs(a).max() == 1.0


class TestProjection:
    def test_freeze_at_equilibrium(self):
        game = coord_anticoord(complete(4), [1] * 4).to_finite_game()
        x = (1, 1, 1, 1)
        ctx = PartitionContext.from_game(game, [0, 1, 2])
        # distance 1 <= margin 3, conclusion must hold
        assert projection_check(game, x, [0, 1, 2], freeze(game, ctx, (1,)))

    def test_averaged_k4(self):
        game = coord_anticoord(complete(4), [1] * 4).to_finite_game()
        ctx = PartitionContext.from_game(game, [0, 1, 2])
        avg = average_over_complement(game, ctx)
        assert projection_check(game, (1, 1, 1, 1), [0, 1, 2], avg)

    def test_far_restriction(self, pd):
        far = RestrictedGame(pd.utilities[[0]][:, :, 0] + 1.5, (0,))
        assert projection_check(pd, MM, [0], far) is False

    def test_violation_raises(self, pd, monkeypatch):
        import nashmargin.robustness as rob

        real = rob.margin_of_robustness
        monkeypatch.setattr(rob, "margin_of_robustness", lambda g, x: real(g, x).__class__(x, {}, 10.0, (0,)))
        flipped = RestrictedGame(np.array([[0.0, 5.0]]), (0,))
        with pytest.raises(InvariantViolation):
            projection_check(pd, MM, [0], flipped)

    @given(games(max_players=3), st.data())
    def test_projection_invariant(self, game, data):
        eqs = enumerate_nash(game)
        if not eqs:
            return
        x = data.draw(st.sampled_from(eqs))
        R = sorted(data.draw(st.sets(st.integers(0, game.n_players - 1), min_size=1)))
        ctx = PartitionContext.from_game(game, R)
        base = freeze(game, ctx, ctx.split(x)[1])
        mu = margin_of_robustness(game, x).margin
        scale = min(mu, 4.0) if mu != math.inf else 4.0
        noise = scaled_uniform(base.utilities.shape, _stream(data.draw(st.integers(0, 999)), 1, 0), scale)
        tilde = RestrictedGame(base.utilities + noise, base.players)
        projection_check(game, x, R, tilde)
