import itertools
import math
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest
from hypothesis import settings, strategies as st

from nashmargin import FiniteGame
from nashmargin.families import prisoner_dilemma
from nashmargin.network import Graph

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

FIXTURES = Path(__file__).parent / "fixtures"


@st.composite
def games(draw, max_players=4, max_actions=3, lo=-8, hi=8):
    """Small games with integer utilities (so float arithmetic is exact)."""
    n = draw(st.integers(1, max_players))
    counts = tuple(draw(st.integers(1, max_actions)) for _ in range(n))
    size = n * math.prod(counts)
    vals = draw(st.lists(st.integers(lo, hi), min_size=size, max_size=size))
    return FiniteGame(np.array(vals, dtype=float).reshape((n,) + counts))


def random_game(rng, max_players=4, max_actions=3, lo=-8, hi=8, min_players=1):
    n = int(rng.integers(min_players, max_players + 1))
    counts = tuple(int(k) for k in rng.integers(1, max_actions + 1, size=n))
    return FiniteGame(rng.integers(lo, hi + 1, size=(n,) + counts).astype(float))


@st.composite
def graphs(draw, max_nodes=7, connected=False):
    n = draw(st.integers(2, max_nodes))
    pairs = list(itertools.combinations(range(n), 2))
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=len(pairs)))
    if connected:
        tree = [(draw(st.integers(0, k - 1)), k) for k in range(1, n)]
        chosen = sorted(set(chosen) | set(tree))
    return Graph.from_edges(chosen, nodes=range(n))


def brute_nash(game):
    """Independent double loop: a profile is Nash iff no single-player switch gains."""
    out = []
    for x in itertools.product(*map(range, game.action_counts)):
        ok = True
        for i in range(game.n_players):
            for a in range(game.action_counts[i]):
                y = x[:i] + (a,) + x[i + 1:]
                if game.utilities[(i,) + y] > game.utilities[(i,) + x]:
                    ok = False
        if ok:
            out.append(x)
    return out


def path(n):
    return Graph.from_edges([(k, k + 1) for k in range(n - 1)], nodes=range(n))


def cycle(n):
    return Graph.from_edges([(k, (k + 1) % n) for k in range(n)], nodes=range(n))


def complete(n):
    return Graph.from_edges(list(itertools.combinations(range(n), 2)), nodes=range(n))


def clique_with_pendants():
    """Coordinating 4-clique {1..4}, each with one anti-coordinating pendant {5..8}."""
    edges = list(itertools.combinations(range(1, 5), 2)) + [(k, k + 4) for k in range(1, 5)]
    return Graph.from_edges(edges, nodes=range(1, 9)), [1] * 4 + [-1] * 4


@pytest.fixture
def pd():
    return prisoner_dilemma(1, 2, 3, 0)


@pytest.fixture
def pd_exact():
    return prisoner_dilemma(*map(Fraction, (1, 2, 3, 0)))


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(module.RESULTS):
        terminalreporter.write_line(module.RESULTS[k])
