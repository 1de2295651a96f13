"""Game documents (JSON) and canonical serialisation.

A document looks like::

    {"format_version": "1.0", "kind": "prisoner", "exact": false,
     "payload": {"a": 1, "b": 2, "c": 3, "d": 0}}

With ``"exact": true`` every decimal literal is read as an exact fraction, so
``0.3`` means 3/10 and all downstream arithmetic is exact.

Canonical form: sorted keys, two-space indent, floats rounded to 12
significant digits, trailing newline.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Any

import jsonschema
import numpy as np

from .core import FiniteGame, as_table, to_exact
from .errors import InputError, ValidationError
from .families import prisoner_dilemma, public_good
from .network import Graph, PairwiseNetworkGame, build_pairwise, coord_anticoord

FORMAT_VERSION = "1.0"
KINDS = ("normal-form", "pairwise-network", "coord-anticoord", "public-good", "prisoner")
SPIN_KINDS = ("coord-anticoord", "prisoner")
GRAPH_KINDS = ("pairwise-network", "coord-anticoord", "public-good")
SIGNIFICANT_DIGITS = 12


@lru_cache(maxsize=None)
def load_schema(name: str) -> dict:
    text = resources.files("nashmargin.schemas").joinpath(f"{name}.schema.json").read_text()
    return json.loads(text)


def validate(instance: Any, schema_name: str) -> None:
    """Raise :class:`ValidationError` naming the offending path."""
    validator = jsonschema.Draft202012Validator(load_schema(schema_name))
    errors = sorted(validator.iter_errors(instance), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        path = "/" + "/".join(str(p) for p in err.absolute_path)
        raise ValidationError(f"{schema_name}: {path}: {err.message}")


def plain(value: Any) -> Any:
    """JSON-ready copy: numpy scalars unwrapped, fractions and floats rounded to
    12 significant digits, infinities mapped to null."""
    if isinstance(value, dict):
        return {str(k): plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return [plain(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, Fraction):
        if value.denominator == 1:
            return int(value)
        value = float(value)
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if not math.isfinite(v):
            return None
        v = float(f"{v:.{SIGNIFICANT_DIGITS}g}")
        return 0.0 if v == 0 else v
    return value


def canonical_json(obj: Any) -> str:
    return json.dumps(plain(obj), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


@dataclass
class GameDocument:
    kind: str
    payload: dict
    exact: bool = False
    format_version: str = FORMAT_VERSION
    _game: Any = field(default=None, repr=False, compare=False)

    @classmethod
    def from_json(cls, text: str) -> "GameDocument":
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"not valid JSON: {exc}") from None
        if isinstance(raw, dict) and raw.get("exact") is True:
            raw = json.loads(text, parse_float=Fraction, parse_int=int)
        validate(raw, "game_document")
        return cls(raw["kind"], raw["payload"], bool(raw.get("exact", False)), raw["format_version"])

    @classmethod
    def load(cls, source: str | Path) -> "GameDocument":
        """Read from a path, or from JSON text when ``source`` starts with ``{``."""
        if isinstance(source, str) and source.lstrip().startswith("{"):
            return cls.from_json(source)
        try:
            text = Path(source).read_text(encoding="utf-8")
        except OSError as exc:
            raise InputError(f"cannot read {source}: {exc.strerror}") from None
        return cls.from_json(text)

    @classmethod
    def from_game(cls, game: FiniteGame) -> "GameDocument":
        """Normal-form document for a dense game."""
        payload = {
            "players": list(game.players),
            "actions": list(game.action_counts),
            "utilities": [game.utilities[i].ravel().tolist() for i in range(game.n_players)],
        }
        return cls("normal-form", payload, game.exact)

    def to_dict(self) -> dict:
        out = {"format_version": self.format_version, "kind": self.kind, "payload": self.payload}
        if self.exact:
            out["exact"] = True
        return out

    def to_json(self) -> str:
        return canonical_json(self.to_dict())

    @property
    def spin_labels(self) -> bool:
        """Whether profiles of this kind are written with -1/+1 tokens."""
        return self.kind in SPIN_KINDS

    def graph(self) -> Graph:
        if self.kind not in GRAPH_KINDS:
            raise InputError(f"documents of kind {self.kind!r} have no graph")
        g = self.payload["graph"]
        edges = [tuple(self._num(v) if k == 2 else v for k, v in enumerate(e)) for e in g["edges"]]
        try:
            return Graph.from_edges(edges, nodes=g["nodes"], directed=g.get("directed", False))
        except InputError as exc:
            raise ValidationError(f"/payload/graph: {exc}") from None

    def _num(self, v: Any) -> Any:
        return Fraction(v) if self.exact else float(v)

    def build(self) -> FiniteGame | PairwiseNetworkGame:
        if self._game is None:
            self._game = self._build()
        return self._game

    def _build(self) -> FiniteGame | PairwiseNetworkGame:
        p = self.payload
        if self.kind == "prisoner":
            return prisoner_dilemma(*(self._num(p[k]) for k in "abcd"))
        if self.kind == "public-good":
            return public_good(self.graph(), self._num(p["c"]))
        if self.kind == "coord-anticoord":
            g = self.graph()
            if len(p["xi"]) != g.n_nodes:
                raise ValidationError(f"/payload/xi: need {g.n_nodes} spins, got {len(p['xi'])}")
            return coord_anticoord(g, p["xi"])
        if self.kind == "pairwise-network":
            g = self.graph()
            tables = {}
            for k, e in enumerate(p["edge_utilities"]):
                key = (e["source"], e["target"])
                if key in tables:
                    raise ValidationError(f"/payload/edge_utilities/{k}: duplicate table for edge {key}")
                tables[key] = self._table(e["table"], f"/payload/edge_utilities/{k}/table")
            return build_pairwise(g, tables, p.get("actions"))
        if self.kind == "normal-form":
            counts = tuple(p["actions"])
            n = len(counts)
            rows = p["utilities"]
            if len(rows) != n:
                raise ValidationError(f"/payload/utilities: need one row per player ({n}), got {len(rows)}")
            size = math.prod(counts)
            for k, row in enumerate(rows):
                if len(row) != size:
                    raise ValidationError(f"/payload/utilities/{k}: need {size} entries, got {len(row)}")
            table = self._table(rows, "/payload/utilities").reshape((n,) + counts)
            return FiniteGame(table, p.get("players"))
        raise ValidationError(f"/kind: unknown kind {self.kind!r}")

    def _table(self, rows: Any, path: str) -> np.ndarray:
        lengths = {len(r) for r in rows}
        if len(lengths) != 1:
            raise ValidationError(f"{path}: ragged table")
        return to_exact(rows) if self.exact else as_table([[float(v) for v in r] for r in rows])


def parse_game_document(source: str | Path) -> FiniteGame | PairwiseNetworkGame:
    """Load a document (path or JSON text) and build its game."""
    return GameDocument.load(source).build()


def dense(game: FiniteGame | PairwiseNetworkGame, budget: int | None = None) -> FiniteGame:
    return game.to_finite_game(budget) if isinstance(game, PairwiseNetworkGame) else game
