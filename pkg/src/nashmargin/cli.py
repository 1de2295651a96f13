"""Command-line interface.

Exit status: 0 success, 1 validation error, 2 capacity error, 3 domain error,
4 invariant violation, 64 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import re
import sys
from pathlib import Path
from typing import Any, Sequence

from . import core, network, robustness, subgames
from .documents import GameDocument, canonical_json, dense
from .errors import InputError, NashMarginError

EX_USAGE = 64


class _Parser(argparse.ArgumentParser):
    def __init__(self, *args, **kwargs) -> None:
        super().__init__(*args, **kwargs)
        # let positional profiles such as "-1,+1,-1" through as values
        self._negative_number_matcher = re.compile(r"^-\d+(\s*,\s*[+-]?\d+)*$")

    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(EX_USAGE, f"{self.prog}: error: {message}\n")


def _label(token: str) -> Any:
    token = token.strip()
    try:
        return int(token)
    except ValueError:
        return token


def parse_labels(text: str) -> list:
    return [_label(t) for t in text.split(",") if t.strip()] if text.strip() else []


def parse_profile(text: str, spins: bool) -> tuple[int, ...]:
    """Comma-separated actions: -1/+1 tokens when ``spins`` is set, indices otherwise."""
    tokens = [t.strip() for t in text.split(",") if t.strip()]
    try:
        values = [int(t) for t in tokens]
    except ValueError:
        raise InputError(f"cannot parse profile {text!r}") from None
    return tuple(core.spin_to_index(v) for v in values) if spins else tuple(values)


def format_profile(x: Sequence[int], spins: bool) -> list[int]:
    return [core.index_to_spin(a) for a in x] if spins else [int(a) for a in x]


def _emit(args: argparse.Namespace, text: str) -> None:
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _csv(rows: list[list]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerows(rows)
    return buf.getvalue()


def _chi_str(v: Any) -> str:
    return "inf" if v == float("inf") else format(float(v), ".12g")


def cmd_nash(doc: GameDocument, args) -> str:
    game = dense(doc.build())
    eqs = core.enumerate_nash(game)
    if args.format == "csv":
        return _csv([list(game.players)] + [format_profile(x, doc.spin_labels) for x in eqs])
    return canonical_json({
        "players": list(game.players),
        "equilibria": [format_profile(x, doc.spin_labels) for x in eqs],
    })


def _robustness(doc: GameDocument, args):
    game = dense(doc.build())
    x = parse_profile(args.profile, doc.spin_labels)
    return game, game.validate_profile(x)


def _report_dict(report: robustness.RobustnessReport, spins: bool) -> dict:
    out = report.to_dict()
    out["profile"] = format_profile(report.profile, spins)
    return out


def cmd_margin(doc: GameDocument, args) -> str:
    game, x = _robustness(doc, args)
    report = robustness.margin_of_robustness(game, x)
    if args.format == "csv":
        rows = [["player", "chi", "binding"]]
        rows += [[p, _chi_str(c), str(p in report.binding_players).lower()] for p, c in report.per_player_chi.items()]
        return _csv(rows)
    return canonical_json(_report_dict(report, doc.spin_labels))


def cmd_break(doc: GameDocument, args) -> str:
    game, x = _robustness(doc, args)
    delta = robustness.construct_breaking_perturbation(game, x, args.epsilon)
    report = robustness.margin_of_robustness(game, x)
    nz = [
        {"player": game.players[idx[0]], "profile": format_profile(idx[1:], doc.spin_labels), "delta": delta.deltas[idx]}
        for idx in zip(*map(lambda a: a.tolist(), delta.deltas.nonzero()))
    ]
    return canonical_json({
        "profile": format_profile(x, doc.spin_labels),
        "margin": report.margin,
        "epsilon": args.epsilon,
        "norm": delta.norm,
        "entries": nz,
        "still_nash": core.is_nash(game + delta, x),
    })


def cmd_fuzz(doc: GameDocument, args) -> str:
    game, x = _robustness(doc, args)
    report = robustness.fuzz_margin(game, x, args.samples, args.seed, args.epsilon)
    out = report.to_dict()
    out["profile"] = format_profile(x, doc.spin_labels)
    return canonical_json(out)


def _context(doc: GameDocument, args):
    game = dense(doc.build())
    return game, subgames.PartitionContext.from_game(game, parse_labels(args.partition))


def _restricted_dict(g: subgames.RestrictedGame, spins: bool) -> dict:
    return {
        "provenance": g.provenance,
        "frozen_at": None if g.frozen_at is None else format_profile(g.frozen_at, spins),
        "game": GameDocument.from_game(g).to_dict(),
    }


def cmd_freeze(doc: GameDocument, args) -> str:
    game, ctx = _context(doc, args)
    z = parse_profile(args.z, doc.spin_labels)
    return canonical_json(_restricted_dict(subgames.freeze(game, ctx, z), doc.spin_labels))


def cmd_average(doc: GameDocument, args) -> str:
    game, ctx = _context(doc, args)
    return canonical_json(_restricted_dict(subgames.average_over_complement(game, ctx), doc.spin_labels))


COUPLING_MODES = tuple(f"coupling-{t}" for t in network.THRESHOLDS)


def cmd_uniform_check(doc: GameDocument, args) -> str:
    y = parse_profile(args.y, doc.spin_labels)
    if args.mode in COUPLING_MODES:
        net = doc.build()
        if not isinstance(net, network.PairwiseNetworkGame):
            raise InputError(f"mode {args.mode} needs a network document")
        res = network.coupling_condition(net, parse_labels(args.partition), y, args.mode.split("-", 1)[1])
    else:
        game, ctx = _context(doc, args)
        res = subgames.uniform_nash_certificate(game, ctx, y, args.mode)
    out = res.to_dict()
    out["profile"] = format_profile(res.profile, doc.spin_labels)
    if res.counterexample is not None:
        out["counterexample"] = format_profile(res.counterexample, doc.spin_labels)
    return canonical_json(out)


def cmd_cohesive(doc: GameDocument, args) -> str:
    res = network.is_cohesive(doc.graph(), parse_labels(args.subset))
    return canonical_json({
        "cohesive": res.cohesive,
        "slack": [{"node": v, "slack": s} for v, s in res.slack.items()],
    })


def cmd_construct(doc: GameDocument, args) -> str:
    if doc.kind != "coord-anticoord":
        raise InputError("construct needs a coord-anticoord document")
    g = doc.graph()
    xi = network.SpinAssignment.of(g, doc.payload["xi"])
    res = network.construct_mixed_nash(g, xi, args.sign, seed=args.seed)
    if args.dot:
        if res.profile is None:
            chi = None
        else:
            game = doc.build()
            chi = {v: game.deviation_margin(v, res.profile) for v in g.nodes}
        Path(args.dot).write_text(network.to_dot(g, res.profile, chi, xi.coordinating), encoding="utf-8")
    return canonical_json(res.to_dict())


def cmd_potential(doc: GameDocument, args) -> str:
    game = dense(doc.build())
    cert = core.check_potential(game)
    out: dict = {"verified": cert.verified, "max_violation": cert.max_violation}
    if cert.verified:
        out["potential"] = [
            {"profile": format_profile(x, doc.spin_labels), "value": cert.potential[x]} for x in game.profiles()
        ]
        out["maximizers"] = [format_profile(x, doc.spin_labels) for x in core.argmax_profiles(cert.potential)]
    return canonical_json(out)


def cmd_export_dot(doc: GameDocument, args) -> str:
    g = doc.graph()
    game = doc.build()
    x = parse_profile(args.profile, doc.spin_labels)
    if isinstance(game, network.PairwiseNetworkGame):
        x = game.validate_profile(x)
        chi = {v: game.deviation_margin(v, x) for v in g.nodes}
    else:
        x = game.validate_profile(x)
        chi = dict(zip(game.players, core.deviation_margins(game, x)))
    coord = doc.build().xi.coordinating if doc.kind == "coord-anticoord" else ()
    return network.to_dot(g, x, chi, coord, spins=doc.spin_labels)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="nashmargin", description="Robustness of pure Nash equilibria in finite and network games.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name: str, func, help: str, profile: bool = False):
        p = sub.add_parser(name, help=help)
        p.add_argument("document", help="game document (JSON file)")
        if profile:
            p.add_argument("profile", help="comma-separated profile; -1/+1 for spin games, indices otherwise")
        p.add_argument("-o", "--output", help="write to this file instead of stdout")
        p.set_defaults(func=func)
        return p

    p = add("nash", cmd_nash, "enumerate pure Nash equilibria")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p = add("margin", cmd_margin, "margin of robustness of an equilibrium", profile=True)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p = add("break", cmd_break, "smallest breaking perturbation (plus epsilon)", profile=True)
    p.add_argument("--epsilon", type=float, default=1e-2)
    p = add("fuzz", cmd_fuzz, "seeded perturbation fuzzing of the margin", profile=True)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--epsilon", type=float, default=1e-2)
    p = add("freeze", cmd_freeze, "restricted game with the complement frozen")
    p.add_argument("--partition", required=True, help="comma-separated players kept (R)")
    p.add_argument("--z", required=True, help="profile of the complement")
    p = add("average", cmd_average, "restricted game averaged over the complement")
    p.add_argument("--partition", required=True)
    p = add("uniform-check", cmd_uniform_check, "is a profile over R Nash for every complement profile?")
    p.add_argument("--partition", required=True)
    p.add_argument("--y", required=True, help="profile of R")
    p.add_argument("--mode", choices=subgames.MODES + COUPLING_MODES, default="averaged")
    p = add("cohesive", cmd_cohesive, "cohesiveness of a node subset")
    p.add_argument("--subset", required=True)
    p = add("construct", cmd_construct, "equilibrium of a mixed coordination/anti-coordination game")
    p.add_argument("--sign", type=int, choices=(-1, 1), default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dot", help="also write a DOT rendering here")
    add("potential", cmd_potential, "exact potential check and recovery")
    add("export-dot", cmd_export_dot, "DOT rendering of a profile on the game's graph", profile=True)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        doc = GameDocument.load(args.document)
        _emit(args, args.func(doc, args))
    except NashMarginError as exc:
        print(f"nashmargin: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
