import json
from fractions import Fraction

import jsonschema
import numpy as np
import pytest

from conftest import FIXTURES
from nashmargin import CapacityError, DomainError, InputError, InvariantViolation, ValidationError
from nashmargin.cli import main
from nashmargin.documents import GameDocument, canonical_json, dense, load_schema, parse_game_document, plain
from nashmargin.errors import NashMarginError

ALL_FIXTURES = sorted(p.name for p in FIXTURES.glob("*.json") if p.name != "prisoner_bad.json")


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def fx(name):
    return FIXTURES / name


class TestDocuments:
    def test_prisoner_layout(self):
        game = parse_game_document(fx("prisoner.json"))
        np.testing.assert_array_equal(game.utilities[0], [[1, 3], [0, 2]])
        np.testing.assert_array_equal(game.utilities[1], [[1, 0], [3, 2]])

    def test_prisoner_ordering(self):
        with pytest.raises(ValidationError, match="c > b > a > d"):
            parse_game_document(fx("prisoner_bad.json"))

    def test_public_good_cost_range(self):
        text = fx("public_good_path3.json").read_text().replace("0.3", "1.5")
        with pytest.raises(ValidationError, match="0 < c < 1"):
            parse_game_document(text)

    def test_discoordination(self):
        game = parse_game_document(fx("discoordination.json"))
        assert game.xi.values == (1, -1)

    def test_exact_decimals(self):
        game = parse_game_document(fx("public_good_path3.json"))
        assert game.exact and game.utilities[0, 1, 0, 0] == Fraction(7, 10)

    def test_schema_path_in_error(self):
        doc = json.loads(fx("prisoner.json").read_text())
        del doc["payload"]["b"]
        with pytest.raises(ValidationError, match="/payload"):
            parse_game_document(json.dumps(doc))
        doc = json.loads(fx("normal_form.json").read_text())
        doc["payload"]["utilities"][1] = [1, 2]
        with pytest.raises(ValidationError, match="/payload/utilities/1"):
            parse_game_document(json.dumps(doc))

    def test_unreadable(self, tmp_path):
        with pytest.raises(InputError):
            parse_game_document(tmp_path / "missing.json")
        (tmp_path / "bad.json").write_text("{not json")
        with pytest.raises(InputError):
            parse_game_document(tmp_path / "bad.json")

    @pytest.mark.parametrize("name", ALL_FIXTURES)
    def test_round_trip_bytes(self, name):
        text = fx(name).read_text()
        assert GameDocument.load(text).to_json() == text

    @pytest.mark.parametrize("name", ALL_FIXTURES)
    def test_round_trip_games(self, name):
        game = dense(parse_game_document(fx(name)))
        again = GameDocument.from_game(game)
        back = parse_game_document(again.to_json())
        assert back.players == game.players
        np.testing.assert_array_equal(back.utilities, game.utilities)

    def test_canonical_floats(self):
        assert canonical_json({"b": 0.1 + 0.2, "a": float("inf"), "c": Fraction(4, 2)}) == (
            '{\n  "a": null,\n  "b": 0.3,\n  "c": 2\n}\n'
        )
        assert plain(np.float64(-0.0)) == 0.0


class TestCommands:
    def test_nash_discoordination(self, capsys):
        code, out, _ = run(capsys, "nash", fx("discoordination.json"))
        assert code == 0 and json.loads(out)["equilibria"] == []

    def test_nash_prisoner_csv(self, capsys):
        code, out, _ = run(capsys, "nash", fx("prisoner.json"), "--format", "csv")
        assert code == 0 and out == "0,1\n-1,-1\n"

    def test_margin_public_good(self, capsys):
        code, out, _ = run(capsys, "margin", fx("public_good_path3.json"), "1,0,1")
        report = json.loads(out)
        assert code == 0 and report["margin"] == 0.15 and report["binding_players"] == [2]
        jsonschema.validate(report, load_schema("robustness_report"))

    def test_margin_csv(self, capsys):
        code, out, _ = run(capsys, "margin", fx("prisoner.json"), "-1,-1", "--format", "csv")
        assert out == "player,chi,binding\n0,1,true\n1,1,true\n"

    def test_break(self, capsys):
        code, out, _ = run(capsys, "break", fx("prisoner.json"), "-1,-1", "--epsilon", "0.01")
        res = json.loads(out)
        assert code == 0 and res["norm"] == 0.51 and res["still_nash"] is False
        assert {(e["player"], tuple(e["profile"])) for e in res["entries"]} == {(0, (-1, -1)), (0, (1, -1))}

    def test_fuzz_deterministic(self, capsys):
        args = ("fuzz", fx("triangle_coordination.json"), "1,1,1", "--samples", "50", "--seed", "9")
        first = run(capsys, *args)[1]
        assert run(capsys, *args)[1] == first
        report = json.loads(first)
        jsonschema.validate(report, load_schema("fuzz_report"))
        assert report["passed"] and report["regimes"]["witness"]["breaks"] == 50

    def test_freeze(self, capsys):
        code, out, _ = run(capsys, "freeze", fx("triangle_coordination.json"), "--partition", "1,2", "--z", "+1")
        res = json.loads(out)
        assert res["provenance"] == "frozen" and res["frozen_at"] == [1]
        # u_2 = y_1 y_2 + y_2 over (y_1, y_2) in lexicographic order
        assert res["game"]["payload"]["utilities"][1] == [0, 0, -2, 2]

    def test_average(self, capsys):
        code, out, _ = run(capsys, "average", fx("clique_pendants.json"), "--partition", "1,2,3,4")
        res = json.loads(out)
        assert res["provenance"] == "averaged"
        game = parse_game_document(json.dumps(res["game"]))
        assert game.utility(1, (1, 1, 1, 1)) == 3

    def test_uniform_check(self, capsys):
        for mode in ("averaged", "brute-force"):
            code, out, _ = run(capsys, "uniform-check", fx("clique_pendants.json"), "--partition", "1,2,3,4",
                               "--y", "1,1,1,1", "--mode", mode)
            res = json.loads(out)
            assert code == 0 and res["certified"]
            jsonschema.validate(res, load_schema("certificate_result"))
        code, out, _ = run(capsys, "uniform-check", fx("discoordination.json"), "--partition", "1", "--y", "1",
                           "--mode", "brute-force")
        assert json.loads(out)["counterexample"] == [-1]

    def test_uniform_check_coupling(self, capsys):
        code, out, _ = run(capsys, "uniform-check", fx("clique_pendants.json"), "--partition", "1,2,3,4",
                           "--y", "-1,-1,-1,-1", "--mode", "coupling-exact")
        res = json.loads(out)
        assert res["certified"] and res["mode"] == "coupling-exact" and res["profile"] == [-1, -1, -1, -1]
        jsonschema.validate(res, load_schema("certificate_result"))
        code, _, err = run(capsys, "uniform-check", fx("normal_form.json"), "--partition", "row", "--y", "0",
                           "--mode", "coupling-nominal")
        assert code == 1

    def test_cohesive(self, capsys):
        code, out, _ = run(capsys, "cohesive", fx("star_mixed.json"), "--subset", "0")
        assert json.loads(out) == {"cohesive": False, "slack": [{"node": 0, "slack": -3}]}

    def test_construct_with_dot(self, capsys, tmp_path):
        dot = tmp_path / "x.dot"
        code, out, _ = run(capsys, "construct", fx("clique_pendants.json"), "--sign", "+1", "--dot", dot)
        res = json.loads(out)
        assert code == 0 and res["certified"] and res["profile"] == [1, 1, 1, 1, -1, -1, -1, -1]
        text = dot.read_text()
        assert text.count("fillcolor=green") == 4
        assert '"5" [label="5:χ=2", shape=ellipse, color=red, xlabel="-1"];' in text

    def test_construct_not_cohesive(self, capsys):
        code, out, _ = run(capsys, "construct", fx("star_mixed.json"))
        assert code == 0 and json.loads(out)["stage"] == "cohesion"

    def test_potential(self, capsys):
        code, out, _ = run(capsys, "potential", fx("triangle_coordination.json"))
        res = json.loads(out)
        assert res["verified"] and res["maximizers"] == [[-1, -1, -1], [1, 1, 1]]
        code, out, _ = run(capsys, "potential", fx("discoordination.json"))
        res = json.loads(out)
        assert res["verified"] is False and res["max_violation"] > 0 and "potential" not in res

    def test_export_dot(self, capsys):
        code, out, _ = run(capsys, "export-dot", fx("pairwise_weighted.json"), "1,0,2")
        assert code == 0 and out.startswith("digraph G {")
        assert '"a" -> "b" [label="1.5"];' in out and 'xlabel="2"' in out

    def test_output_file(self, capsys, tmp_path):
        target = tmp_path / "nash.json"
        code, out, _ = run(capsys, "nash", fx("prisoner.json"), "-o", target)
        assert code == 0 and out == "" and json.loads(target.read_text())["equilibria"] == [[-1, -1]]

    def test_normal_form_indices(self, capsys):
        code, out, _ = run(capsys, "nash", fx("normal_form.json"))
        assert json.loads(out) == {"equilibria": [[1, 1]], "players": ["row", "col"]}


class TestExitCodes:
    def test_classes(self):
        assert [e.exit_code for e in (NashMarginError, InputError, ValidationError, CapacityError, DomainError,
                                      InvariantViolation)] == [1, 1, 1, 2, 3, 4]

    def test_validation(self, capsys):
        code, _, err = run(capsys, "nash", fx("prisoner_bad.json"))
        assert code == 1 and "ValidationError" in err

    def test_capacity(self, capsys, monkeypatch):
        import nashmargin.core as core

        monkeypatch.setattr(core, "DEFAULT_PROFILE_BUDGET", 4)
        code, _, err = run(capsys, "nash", fx("clique_pendants.json"))
        assert code == 2 and "CapacityError" in err

    def test_domain(self, capsys):
        code, _, err = run(capsys, "margin", fx("prisoner.json"), "+1,+1")
        assert code == 3 and "DomainError" in err

    def test_invariant(self, capsys, monkeypatch):
        import nashmargin.network as network

        monkeypatch.setattr(network.PairwiseNetworkGame, "is_nash", lambda self, x: False)
        code, _, err = run(capsys, "construct", fx("clique_pendants.json"))
        assert code == 4 and "InvariantViolation" in err

    def test_usage(self, capsys):
        for argv in (["bogus"], ["nash"], ["nash", "x.json", "--format", "xml"], ["fuzz", "x.json", "0", "--samples", "many"]):
            with pytest.raises(SystemExit) as exc:
                main(argv)
            assert exc.value.code == 64
        capsys.readouterr()

    def test_bad_profile(self, capsys):
        code, _, err = run(capsys, "margin", fx("prisoner.json"), "-1,0")
        assert code == 1
