"""Command-line front end: formats, exit codes, and reproduction scripts.

The CLI is exercised in-process through main(argv); the reproduction
scripts are run as real subprocesses and compared byte for byte against
their recorded expected outputs, which is the contract that keeps the
published session values stable across refactors.
"""

import json
import pathlib
import subprocess
import sys

import pytest

from artifact.cli import build_parser, config_from_args, main

REPRO = pathlib.Path(__file__).resolve().parent.parent / "scripts" / "reproductions"


def run_cli(capsys, *args):
    rc = main(list(args))
    out = capsys.readouterr()
    return rc, out.out, out.err


def test_index_plain(capsys):
    rc, out, _ = run_cli(capsys, "index", "--gamma0", "39")
    assert rc == 0
    assert out == "56\n"


def test_index_json(capsys):
    rc, out, _ = run_cli(capsys, "index", "--gamma", "6", "--format", "json")
    assert rc == 0
    doc = json.loads(out)
    assert doc["schema"] == "artifact-report/1"
    assert doc["subcommand"] == "index"
    assert doc["result"] == {"group": "Gamma(6)", "index": 144}


def test_generators_shape(capsys):
    rc, out, _ = run_cli(capsys, "generators", "--gamma0", "2",
                         "--format", "json")
    assert rc == 0
    doc = json.loads(out)
    gens = doc["result"]["generators"]
    assert doc["result"]["count"] == len(gens) > 0
    for a, b, c, d in gens:
        assert a * d - b * c == 1
        assert c % 2 == 0


def test_hecke_eigenvalues_line(capsys):
    rc, out, _ = run_cli(capsys, "hecke", "--gamma0", "11", "--weight", "2",
                         "--ops", "2", "--emit", "eigenvalues")
    assert rc == 0
    assert out == "T2 {3, -2, -2}\n"


def test_hecke_matrix_and_charpoly(capsys):
    rc, out, _ = run_cli(capsys, "hecke", "--gamma0", "11", "--weight", "2",
                         "--ops", "2", "--emit", "matrix", "--format", "json")
    assert rc == 0
    doc = json.loads(out)
    (op,) = doc["result"]["operators"]
    assert op["matrix"] == [[3, 0, 0], [0, -2, 0], [1, 0, -2]]
    assert op["orders"] == [0, 0, 0]
    rc, out, _ = run_cli(capsys, "hecke", "--gamma0", "11", "--weight", "2",
                         "--ops", "2", "--emit", "charpoly",
                         "--format", "json")
    assert rc == 0
    doc = json.loads(out)
    # (x - 3)(x + 2)^2 with integer coefficients, leading first
    assert doc["result"]["operators"][0]["charpoly"] == [1, 1, -8, -12]


def test_homology_contract_toggle(capsys):
    rc, plain, _ = run_cli(capsys, "homology", "--gamma0", "11",
                           "--degree", "1")
    assert rc == 0 and plain == "Z/2 + Z^3\n"
    rc, out, _ = run_cli(capsys, "homology", "--gamma0", "11", "--degree", "1",
                         "--contract", "--format", "json")
    assert rc == 0
    doc = json.loads(out)
    assert doc["result"]["invariants"] == "Z/2 + Z^3"
    assert doc["result"]["contracted"] is True
    # collapsing must have actually shrunk the complex
    assert sum(doc["result"]["ranks_contracted"]) < sum(doc["result"]["ranks"])


def test_cohomology_weight_four(capsys):
    rc, out, _ = run_cli(capsys, "cohomology", "--gamma0", "11",
                         "--degree", "1", "--weight", "4")
    assert rc == 0
    assert out == "Z/2 + Z^6\n"


def test_cuspidal_json(capsys):
    rc, out, _ = run_cli(capsys, "cuspidal", "--gamma0", "11",
                         "--degree", "1", "--format", "json")
    assert rc == 0
    doc = json.loads(out)
    assert doc["result"]["cuspidal"] == "Z^2"
    assert doc["result"]["cuspidal_rank"] == 2


def test_dvf_bundled_fixture(capsys):
    rc, out, _ = run_cli(capsys, "dvf", "--format", "json")
    assert rc == 0
    doc = json.loads(out)
    assert doc["result"]["cells"] == [72, 154, 83]
    assert doc["result"]["homology"] == ["Z", "0", "0"]
    assert sum(doc["result"]["critical"]) >= 2


def test_contract_drops_truncation_degree(capsys):
    rc, out, _ = run_cli(capsys, "contract", "--gamma0", "11", "--depth", "3",
                         "--format", "json")
    assert rc == 0
    doc = json.loads(out)
    # depth 3 reports homology only through degree 2
    assert len(doc["result"]["homology"]) == 3
    assert doc["result"]["homology"][:2] == ["Z", "Z/2 + Z^3"]
    assert doc["result"]["collapses"] > 0


def test_quad_report(capsys):
    rc, out, _ = run_cli(capsys, "quad", "--d", "-1", "--ideal", "41+56i",
                         "--report", "index", "--format", "json")
    assert rc == 0
    assert json.loads(out)["result"]["index"] == 4818


def test_determinism(capsys):
    args = ("hecke", "--gamma0", "11", "--weight", "2", "--ops", "2,3",
            "--format", "json")
    rc1, out1, _ = run_cli(capsys, *args)
    rc2, out2, _ = run_cli(capsys, *args)
    assert rc1 == rc2 == 0
    assert out1 == out2


@pytest.mark.parametrize("args", [
    ("index",),                                         # no group
    ("hecke", "--gamma0", "11", "--weight", "2"),       # no ops
    ("hecke", "--gamma0", "11", "--ops", "2"),          # no weight
    ("hecke", "--gamma0", "11", "--weight", "1", "--ops", "2"),
    ("quad", "--d", "-1", "--ideal", "1+i",
     "--report", "torsion-ratio"),                      # orders missing
    ("quad", "--d", "-1", "--ideal", "1+i", "--report", "nonsense"),
    ("cohomology", "--gamma0", "11", "--degree", "2", "--depth", "1"),
])
def test_config_errors_exit_two(capsys, args):
    rc = main(list(args))
    captured = capsys.readouterr()
    assert rc == 2
    assert "ConfigError" in captured.err


def test_config_error_json_is_machine_readable(capsys):
    rc = main(["hecke", "--gamma0", "11", "--weight", "2", "--format", "json"])
    out = capsys.readouterr().out
    assert rc == 2
    doc = json.loads(out)
    assert doc["error"]["type"] == "ConfigError"
    assert "ops" in doc["error"]["message"]


def test_computation_error_exit_three(capsys):
    # operator index 0 has no determinant-positive representative
    rc = main(["hecke", "--gamma0", "11", "--weight", "2", "--ops", "0",
               "--format", "json"])
    out = capsys.readouterr().out
    assert rc == 3
    doc = json.loads(out)
    assert doc["error"]["type"] == "FormatError"


def test_thread_env_var_validated(capsys, monkeypatch):
    monkeypatch.setenv("ARTIFACT_THREADS", "not-a-number")
    assert main(["index", "--gamma0", "11"]) == 2
    capsys.readouterr()
    monkeypatch.setenv("ARTIFACT_THREADS", "0")
    assert main(["index", "--gamma0", "11"]) == 2
    capsys.readouterr()
    monkeypatch.setenv("ARTIFACT_THREADS", "4")
    assert main(["index", "--gamma0", "11"]) == 0
    assert capsys.readouterr().out == "12\n"


def test_runconfig_round_trip():
    ns = build_parser().parse_args(
        ["cuspidal", "--gamma0", "39", "--degree", "1",
         "--module-degree", "2", "--format", "json"])
    cfg = config_from_args(ns)
    assert cfg.subcommand == "cuspidal"
    assert (cfg.kind, cfg.level) == ("gamma0", 39)
    assert cfg.module_degree == 2
    assert cfg.fmt == "json"


@pytest.mark.parametrize("name", [
    "indices",
    "hecke_level11",
    "gaussian_ideal",
    "cuspidal_level11",
    "two_room_house",
])
def test_reproduction_scripts_match_recorded_output(name):
    script = REPRO / ("%s.py" % name)
    expected = (REPRO / ("%s.expected" % name)).read_text()
    proc = subprocess.run([sys.executable, str(script)],
                          capture_output=True, text=True, timeout=600)
    assert proc.returncode == 0, proc.stderr
    assert proc.stdout == expected
