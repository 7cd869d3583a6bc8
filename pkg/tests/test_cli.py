import io
import json
import subprocess
import sys

import pytest

from unitlayers.cli import COMMANDS, JobRequest, SCHEMAS, json_schemas, main, parse_request, run


def call(capsys, *argv):
    code = main(list(argv))
    return code, json.loads(capsys.readouterr().out)


class TestExamples:
    def test_distinguish(self, capsys):
        code, res = call(capsys, "distinguish", "--params", '{"eps1": "3/5", "eps2": "7/10"}')
        assert code == 0 and res["status"] == "ok"
        p = res["payload"]
        assert (p["kind"], p["N"], p["M"], p["threshold"]) == ("comb", 3, 2, "sqrt(7)/4")

    def test_signature(self, capsys):
        _, res = call(capsys, "signature", "--params", '{"eps": 1.92}')
        assert res["payload"]["integer_part"] == 1 and res["payload"]["fractional_part"] == 0.92
        assert any("float width" in d for d in res["diagnostics"])

    def test_dist(self, capsys):
        _, res = call(capsys, "dist", "--params",
                      '{"eps": 0.5, "p": 2, "n": 1, "m": 1, "a": [0, 0], "b": [20.5, 0]}')
        p = res["payload"]
        assert (p["lower"], p["upper"], p["exact"]) == (21, 21, True)

    def test_stdin_request(self, capsys, monkeypatch):
        monkeypatch.setattr(sys, "stdin", io.StringIO('{"command": "signature", "params": {"eps": "3"}}'))
        code, res = call(capsys)
        assert code == 0 and res["payload"]["integer_part"] == 3


class TestErrors:
    def test_unknown_command(self, capsys):
        code, res = call(capsys, "teleport")
        assert code == 2 and res["code"] == "E_COMMAND"

    def test_bad_json(self, capsys):
        code, res = call(capsys, "dist", "--params", "{nope")
        assert code == 2 and res["code"] == "E_JSON"

    @pytest.mark.parametrize("params", ['{"eps": -1}', '{"eps": "x"}', '{"eps": 0.5, "zzz": 1}', "{}"])
    def test_bad_params(self, capsys, params):
        code, res = call(capsys, "signature", "--params", params)
        assert code == 2 and res["code"] == "E_PARAM"

    def test_point_outside_layer(self, capsys):
        code, res = call(capsys, "dist", "--params", '{"eps": 0.5, "a": [0, 0], "b": [1, 0.9]}')
        assert code == 2 and res["code"] == "E_PARAM"

    def test_internal_errors_map_to_3(self, monkeypatch):
        def boom(*a):
            raise RuntimeError("kaboom")
        monkeypatch.setitem(COMMANDS, "signature", boom)
        res = run(JobRequest("signature", {"eps": 1}))
        assert res.code == "E_INTERNAL" and res.exit_code == 3

    def test_bad_seed(self):
        res = parse_request('{"command": "cycle", "params": {"k": 3}, "seed": "x"}')
        assert res.code == "E_PARAM"


class TestCommands:
    @pytest.mark.parametrize("cmd,params,key", [
        ("comb", {"N": 4, "M": 5, "eps": "23/25"}, "valid"),
        ("modified-comb", {"N": 4, "M": 5, "eps": "48/25"}, "valid"),
        ("sandwich", {"m_s": 1, "eps": 1, "cols": 1}, "fits"),
        ("midpoints", {"eps": 1, "x": [0, 0, 0], "y": [1, 0, 0]}, "kind"),
        ("width-witness", {"eps": "1/2"}, "k"),
        ("verify-gamma-omega", {"eps": "1/2", "x1": [0, 0], "x2": [2, 0.3], "y": [1, 0.1]}, "agree"),
        ("verify-gamma-hat", {"eps": "1/2", "xs": [[0, 0, 0], [4, 0, 0.2], [0, 4, 0.4]], "y": [1, 1, 0.1]},
         "gamma"),
        ("cycle", {"k": 3, "eps": "9/10"}, "found"),
        ("path", {"eps": "1/2", "a": [0, 0], "b": [20.5, 0]}, "edges"),
    ])
    def test_ok(self, cmd, params, key):
        res = run(JobRequest(cmd, params, seed=1))
        assert res.status == "ok", res.diagnostics
        assert res.payload[key] not in (False, None)

    def test_every_command_has_schema(self):
        assert set(COMMANDS) == set(SCHEMAS) == set(json_schemas()["params"])

    def test_schema_flag(self, capsys):
        assert main(["--schema"]) == 0
        out = json.loads(capsys.readouterr().out)
        assert out["params"]["comb"]["required"] == ["M", "N", "eps"]


def test_deterministic_bytes(capsys):
    argv = ["verify-gamma-omega", "--params", '{"eps": 0.9, "count": 30}', "--seed", "7"]
    main(argv)
    first = capsys.readouterr().out
    main(argv)
    assert capsys.readouterr().out == first


def test_payload_round_trips():
    res = run(JobRequest("comb", {"N": 9, "M": 10, "eps": 0.95}))
    text = json.dumps(res.to_json(), sort_keys=True, allow_nan=False)
    assert json.loads(text) == res.to_json()


def test_batch_mode_matches_serial():
    lines = "\n".join([
        '{"command": "signature", "params": {"eps": 1.92}}',
        '{"command": "verify-gamma-omega", "params": {"eps": 0.4, "count": 10}}',
        '{"command": "bogus"}',
    ]) + "\n"
    cmd = [sys.executable, "-m", "unitlayers", "--seed", "3", "--jobs"]
    one = subprocess.run(cmd + ["1"], input=lines, capture_output=True, text=True)
    two = subprocess.run(cmd + ["2"], input=lines, capture_output=True, text=True)
    assert one.returncode == two.returncode == 2
    assert one.stdout == two.stdout
    rows = [json.loads(r) for r in one.stdout.splitlines()]
    assert [r["status"] for r in rows] == ["ok", "ok", "error"]
