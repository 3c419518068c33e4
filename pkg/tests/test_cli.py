"""End-to-end command tests, run in-process through `run`."""

from __future__ import annotations

import hashlib
import io
import json
import subprocess
import sys

import pytest

from qhp.cli import run
from qhp.constructions import enumerate_models, minimal_twisted, moduli_family
from qhp.graphs import Chain, co_inductance, discriminant, inductance
from qhp.jsonio import model_to_json, rational_to_json


def invoke(argv, stdin=""):
    out = io.StringIO()
    code = run(argv, stdin=io.StringIO(stdin), stdout=out)
    return code, out.getvalue()


def invoke_json(argv, payload):
    code, text = invoke(argv, json.dumps(payload))
    return code, json.loads(text)


# ---------------------------------------------------------------------------
# det


def test_det_on_a_chain_payload():
    code, out = invoke_json(["det"], {"chain": [2, 1, 2]})
    assert code == 0
    assert out["d"] == 0 and out["negative_definite"] is False
    # entries below two are inadmissible: no inductance block
    assert "e" not in out


def test_det_reports_inductances_for_admissible_chains():
    code, out = invoke_json(["det"], {"chain": [2, 2]})
    assert code == 0
    chain = Chain([2, 2])
    assert out["d"] == discriminant(chain.to_forest()) == 3
    assert out["negative_definite"] is True
    assert out["e"] == rational_to_json(inductance(chain))
    assert out["e_tilde"] == rational_to_json(co_inductance(chain))


def test_det_accepts_forest_payloads():
    payload = {
        "vertices": [{"id": "a", "weight": -2}, {"id": "b", "weight": -2}],
        "edges": [["a", "b"]],
    }
    code, out = invoke_json(["det"], payload)
    assert code == 0 and out["d"] == 3


def test_det_rejects_garbage_with_exit_two(capsys):
    code, _ = invoke(["det"], "this is not json")
    assert code == 2
    assert "malformed" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# normalize


def test_normalize_emits_the_canonical_chain_and_witness():
    code, out = invoke_json(["normalize"], {"chain": [2, 0, 3, 2]})
    assert code == 0
    assert out["chain"] == [0, 0, 2, 5]
    assert out["reversed_chain"] == [0, 0, 5, 2]
    assert out["moves"]  # nontrivial witness


def test_normalize_strong_flag():
    code, out = invoke_json(["normalize", "--strong"], {"chain": [0, 0, 2, 5]})
    assert code == 0
    assert out["moves"] == []
    assert out["strongly_balanced"] is True


def test_normalize_rigid_input_exits_one_with_diagnosis():
    code, out = invoke_json(["normalize"], {"chain": [2, 1, 2]})
    assert code == 1
    assert out["error"] == "NormalizationError"
    assert "message" in out


# ---------------------------------------------------------------------------
# fiber


def test_fiber_replays_a_program_from_stdin():
    payload = {"steps": [{"sprout": "v0"}]}
    code, out = invoke_json(["fiber", "--program", "-", "--validate"], payload)
    assert code == 0
    assert out["created"] == ["x1"]
    assert out["connected"] is True
    v = out["validation"]
    assert v["ok"] is True and v["unique_c"] is None
    assert sorted(v["minus_one"]) == ["v0", "x1"]


def test_fiber_with_a_seeded_start(tmp_path):
    start = {
        "vertices": [{"id": "v0", "weight": 0}],
        "mult": {"v0": 1},
        "attach": [["v0", "S"]],
    }
    prog = {"steps": [{"subdivide": ["v0", "S"]}, {"subdivide": ["x1", "v0"]}]}
    fiber_file = tmp_path / "start.json"
    prog_file = tmp_path / "prog.json"
    fiber_file.write_text(json.dumps(start))
    prog_file.write_text(json.dumps(prog))
    code, text = invoke(
        ["--in", str(fiber_file), "fiber", "--program", str(prog_file), "--validate"]
    )
    out = json.loads(text)
    assert code == 0
    assert out["section_touches"] == {"S": 1}
    v = out["validation"]
    assert v["unique_c"] == "x2" and v["ok"] is True
    assert v["clause_i"] is True and v["clause_ii"] is True


# ---------------------------------------------------------------------------
# construct / classify


def test_construct_twisted_roundtrip():
    code, out = invoke_json(["construct", "--kind", "twisted"], {})
    assert code == 0
    assert out["report"]["passed"] is True
    assert out["model"] == model_to_json(minimal_twisted().model)


def test_construct_domain_rejection_exits_one():
    params = {"programs": [{"steps": [{"sprout": "v0"}]}]}
    code, out = invoke_json(["construct", "--kind", "affine"], params)
    assert code == 1
    assert out["error"] == "DomainError"
    assert "section crossing" in out["message"]


def test_construct_rejects_non_object_params():
    code, _ = invoke(["construct", "--kind", "affine"], json.dumps([1, 2]))
    assert code == 2


def test_classify_the_moduli_model():
    model = model_to_json(moduli_family(2).model)
    code, out = invoke_json(["classify"], model)
    assert code == 0
    assert out["passed"] is True
    assert out["d_boundary"] == -96 and out["d_exceptional"] == 6
    assert out["h1_order"] == 4 and out["h1_decomposition"] == [2, 2]
    assert out["singularities"] == [[2, 2], [2]]
    assert out["kod_S0"] == "-inf" and out["affine_ruled"] is True


def test_classify_exceptional_flag_zeroes_the_counts():
    model = model_to_json(minimal_twisted().model)
    code, out = invoke_json(["classify", "--exceptional"], model)
    assert code == 0
    assert out["exceptional"] is True


# ---------------------------------------------------------------------------
# enumerate


def test_enumerate_streams_ndjson_deterministically():
    argv = ["enumerate", "--depth", "3", "--kind", "twisted"]
    code1, text1 = invoke(argv)
    code2, text2 = invoke(argv)
    assert code1 == code2 == 0
    assert hashlib.md5(text1.encode()).hexdigest() == hashlib.md5(text2.encode()).hexdigest()
    lines = [json.loads(l) for l in text1.splitlines()]
    assert len(lines) == sum(1 for _ in enumerate_models("twisted", 3))
    assert all(l["report"]["passed"] for l in lines)


def test_enumerate_seeded_sampling():
    argv = ["enumerate", "--depth", "3", "--kind", "affine", "--seed", "5",
            "--count", "4"]
    code, text = invoke(argv)
    assert code == 0
    lines = text.splitlines()
    assert len(lines) == 4
    assert all(json.loads(l)["report"]["passed"] for l in lines)


def test_enumerate_depth_cap(monkeypatch):
    code, text = invoke(["enumerate", "--depth", "8", "--kind", "affine"])
    assert code == 1
    out = json.loads(text)
    assert "QHP_MAX_DEPTH" in out["message"]

    monkeypatch.setenv("QHP_MAX_DEPTH", "2")
    code, _ = invoke(["enumerate", "--depth", "3", "--kind", "affine"])
    assert code == 1

    monkeypatch.setenv("QHP_MAX_DEPTH", "not-a-number")
    code, _ = invoke(["enumerate", "--depth", "1", "--kind", "affine"])
    assert code == 2


def test_output_file_option(tmp_path):
    target = tmp_path / "out.json"
    code, _ = invoke(["--out", str(target), "det"], json.dumps({"chain": [0]}))
    assert code == 0
    assert json.loads(target.read_text())["d"] == 0


def test_console_script_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "qhp.cli", "det"],
        input='{"chain": [2, 2]}',
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["d"] == 3
