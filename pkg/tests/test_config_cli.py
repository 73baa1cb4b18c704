import csv
import json
import xml.etree.ElementTree as ET
from pathlib import Path

import pytest
from hypothesis import given
from hypothesis import strategies as st

from lpplab.cli import atomic_write, main
from lpplab.config import (
    ConfigError,
    law_from_dict,
    law_to_dict,
    parse_alpha_grid,
    run_from_dict,
    run_to_dict,
)
from lpplab.experiments import cubic_law

CONFIGS = Path(__file__).resolve().parents[1] / "configs"

LAWS = [
    {"kind": "point_mass", "row": {"kind": "bernoulli", "p": 0.5}},
    {"kind": "point_mass", "row": {"kind": "exponential", "rate": 2.0}},
    {"kind": "point_mass", "row": {"kind": "two_point", "lo": 0.0, "hi": 1.0, "p_hi": 0.3}},
    {"kind": "mixture", "rows": [{"kind": "exponential", "rate": 1.0}, {"kind": "exponential", "rate": 3.0}],
     "weights": [0.5, 0.5]},
    {"kind": "point_mass", "row": {"kind": "truncated_upper", "base": {"kind": "exponential", "rate": 1.0}, "tau": 4.0}},
    {"kind": "point_mass", "row": {"kind": "truncated_box", "base": {"kind": "exponential", "rate": 1.0}, "M": 3.0}},
    {"kind": "bernoulli_rate", "rates": {"atoms": [[0.3, 0.5], [0.6, 0.5]]}},
    {"kind": "exponential_rate", "rates": {"atoms": [[1.0, 0.5], [2.0, 0.5]]}},
]


@pytest.mark.parametrize("doc", LAWS, ids=lambda d: d["kind"] + ":" + d.get("row", {}).get("kind", ""))
def test_law_round_trip(doc):
    law = law_from_dict(doc)
    again = law_to_dict(law)
    assert law_from_dict(again) == law
    assert law_to_dict(law_from_dict(again)) == again


def test_cubic_law_round_trip():
    assert law_from_dict(law_to_dict(cubic_law())) == cubic_law()


@pytest.mark.parametrize("name", ["rost.toml", "cubic.toml", "fig3.toml", "two_point_rates.toml"])
def test_shipped_configs_round_trip(name):
    from lpplab.config import load_run
    cfg = load_run(CONFIGS / name)
    assert run_from_dict(run_to_dict(cfg)) == cfg


@pytest.mark.parametrize("doc", [
    {},
    {"law": {"kind": "nope"}},
    {"law": {"kind": "point_mass"}},
    {"law": {"kind": "point_mass", "row": {"kind": "bernoulli", "p": "half"}}},
    {"law": LAWS[0], "run": {"geometry": "diagonal"}},
    {"law": LAWS[0], "run": {"n": 0}},
    {"law": LAWS[0], "sweep": [{"geometry": "strict-x", "side": "sideways", "alphas": [0.5]}]},
])
def test_bad_documents_raise(doc):
    with pytest.raises(ConfigError):
        run_from_dict(doc)


def test_alpha_grid():
    assert parse_alpha_grid("0.1:1:0.1") == tuple(round(0.1 * k, 12) for k in range(1, 11))
    assert parse_alpha_grid("0.2, 0.5") == (0.2, 0.5)
    for bad in ("1:0:0.1", "0:1", "0:1:0"):
        with pytest.raises(ConfigError):
            parse_alpha_grid(bad)


@given(st.floats(0.01, 0.99), st.integers(1, 5000), st.integers(0, 2**31))
def test_run_round_trip(p, n, seed):
    doc = {"law": {"kind": "point_mass", "row": {"kind": "bernoulli", "p": p}},
           "run": {"geometry": "strict-y", "n": n, "seed": seed, "directions": [[0.5, 1.0]]},
           "sweep": [{"geometry": "strict-x", "side": "1alpha", "alphas": "0.1:0.3:0.1"}]}
    cfg = run_from_dict(doc)
    assert run_from_dict(run_to_dict(cfg)) == cfg


# -- command line -------------------------------------------------------------


def _write(tmp_path, text, name="c.toml"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


SMALL = """
title = "small"
[law]
kind = "point_mass"
row = { kind = "bernoulli", p = 0.5 }
[run]
geometry = "strict-x"
n = 60
replicas = 3
seed = 5
directions = [[1.0, 1.0], [1.0, 0.5]]
"""


def test_simulate_writes_outputs_and_manifest(tmp_path):
    cfg = _write(tmp_path, SMALL)
    out = tmp_path / "out"
    assert main(["simulate", "--config", cfg, "--out-dir", str(out), "--emit", "csv", "--emit", "json", "--quiet"]) == 0
    rows = list(csv.DictReader(open(out / "simulate.csv")))
    assert len(rows) == 2 and {"estimate", "se", "theory", "branch"} <= set(rows[0])
    reps = list(csv.DictReader(open(out / "simulate_replicas.csv")))
    assert len(reps) == 6
    man = json.loads((out / "simulate_manifest.json").read_text())
    assert man["seed"] == 5 and man["command"] == "simulate" and "simulate.json" in man["outputs"]
    # the config echo reproduces the run
    from lpplab.config import load_run
    assert run_from_dict(man["config"]) == load_run(cfg)


def test_seed_env_override(tmp_path, monkeypatch):
    cfg = _write(tmp_path, SMALL)
    monkeypatch.setenv("LPP_SEED", "77")
    assert main(["simulate", "--config", cfg, "--out-dir", str(tmp_path / "a"), "--quiet"]) == 0
    assert json.loads((tmp_path / "a" / "simulate_manifest.json").read_text())["seed"] == 77
    assert main(["simulate", "--config", cfg, "--out-dir", str(tmp_path / "b"), "--seed", "3", "--quiet"]) == 0
    assert json.loads((tmp_path / "b" / "simulate_manifest.json").read_text())["seed"] == 3
    monkeypatch.setenv("LPP_SEED", "x")
    assert main(["simulate", "--config", cfg, "--out-dir", str(tmp_path / "c"), "--quiet"]) == 2


def test_same_seed_same_csv(tmp_path):
    cfg = _write(tmp_path, SMALL)
    for d in ("a", "b"):
        assert main(["simulate", "--config", cfg, "--out-dir", str(tmp_path / d), "--threads", "2" if d == "a" else "1",
                     "--quiet"]) == 0
    assert (tmp_path / "a" / "simulate.csv").read_text() == (tmp_path / "b" / "simulate.csv").read_text()


@pytest.mark.parametrize("text", ["[law\nkind=", '[law]\nkind = "martian"\n', "title = 1\n"])
def test_config_errors_exit_2(tmp_path, text):
    assert main(["simulate", "--config", _write(tmp_path, text), "--out-dir", str(tmp_path), "--quiet"]) == 2


def test_missing_config_exit_2(tmp_path):
    assert main(["simulate", "--config", str(tmp_path / "none.toml"), "--quiet"]) == 2


def test_shape_csv(tmp_path, capsys):
    law = _write(tmp_path, '[law]\nkind = "point_mass"\nrow = { kind = "bernoulli", p = 0.5 }\n')
    out = tmp_path / "o"
    assert main(["shape", "--law", law, "--formula", "strict-x", "--alpha-grid", "0.5,1,2", "--out-dir", str(out),
                 "--emit", "svg"]) == 0
    rows = list(csv.DictReader(open(out / "shape.csv")))
    assert list(rows[0]) == ["alpha", "value", "branch", "root", "residual"]
    from lpplab.shapes import psi_strict_x
    half = law_from_dict(LAWS[0])
    for r in rows:
        a = float(r["alpha"])
        assert float(r["value"]) == pytest.approx(psi_strict_x(half, 1.0, a).value, rel=1e-12)
    assert "alpha,value" in capsys.readouterr().out
    ET.parse(out / "shape.svg")


def test_shape_exponential_needs_exponential_law(tmp_path):
    law = _write(tmp_path, '[law]\nkind = "point_mass"\nrow = { kind = "bernoulli", p = 0.5 }\n')
    assert main(["shape", "--law", law, "--formula", "exponential", "--out-dir", str(tmp_path), "--quiet"]) == 2


def test_sweep_svg_and_plot(tmp_path):
    cfg = _write(tmp_path, SMALL + '\n[[sweep]]\ngeometry = "strict-y"\nside = "alpha1"\nalphas = "0.5:1:0.5"\n')
    out = tmp_path / "s"
    assert main(["sweep", "--config", cfg, "--out-dir", str(out), "--emit", "svg", "--quiet"]) == 0
    root = ET.parse(out / "sweep.svg").getroot()
    assert root.tag.endswith("svg")
    assert root.findall(".//{http://www.w3.org/2000/svg}circle")
    assert main(["plot", str(out / "sweep.csv"), "--out", str(tmp_path / "p.svg")]) == 0
    ET.parse(tmp_path / "p.svg")
    assert main(["plot", str(tmp_path / "absent.csv")]) == 2


def test_verify_oracle(tmp_path):
    assert main(["verify", "--suite", "oracle", "--trials", "40", "--out-dir", str(tmp_path)]) == 0
    assert (tmp_path / "verify.txt").read_text().startswith("PASS")


def test_verify_failure_exit_3(tmp_path):
    # criterion 10 fails at its stated window; see the decision ledger
    assert main(["verify", "--suite", "acceptance", "--only", "10", "--out-dir", str(tmp_path)]) == 3
    assert json.loads((tmp_path / "verify_manifest.json").read_text())["passed"] is False


def test_atomic_write_leaves_no_temp_files(tmp_path):
    target = tmp_path / "d" / "f.txt"
    atomic_write(target, "one\n")
    atomic_write(target, "two\n")
    assert target.read_text() == "two\n"
    assert [p.name for p in target.parent.iterdir()] == ["f.txt"]


def test_atomic_write_keeps_old_file_on_error(tmp_path):
    target = tmp_path / "f.txt"
    atomic_write(target, "old\n")
    with pytest.raises(TypeError):
        atomic_write(target, None)
    assert target.read_text() == "old\n"
    assert [p.name for p in tmp_path.iterdir()] == ["f.txt"]
