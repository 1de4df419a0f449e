import json
import math

import pytest
from hypothesis import given, strategies as st

from halasz import multiplicative as mf
from halasz.config import load_config, parse_config
from halasz.constants import NAMES, freeze, load_constants
from halasz.errors import ConfigError


def test_minimal_config(tmp_path):
    p = tmp_path / "run.toml"
    p.write_text('x_values = [100, 1e4]\n[spec]\nkind = "moebius"\n')
    cfg = load_config(p)
    assert cfg.spec == mf.moebius()
    assert cfg.x_values == (100.0, 1e4)
    assert cfg.grid_step is None and cfg.grid_step_for(1e4) == min(0.01, 1 / (4 * math.log(1e4)))
    assert cfg.constants_file == "default" and cfg.threads == 1


def test_full_config(tmp_path):
    doc = {
        "x_values": [1e3],
        "grid_step": 0.005,
        "quadrature_step": "auto",
        "chunk_size": 4096,
        "threads": 2,
        "output": "o",
        "constants_file": "c.json",
        "specs": [{"kind": "random_steinhaus", "seed": 4}, {"kind": "character", "modulus": 4, "index": 1}],
        "meanvalue": {"T_values": [1, 5], "families": ["single", "twisted"], "h_values": [0.5]},
        "smooth": {"theta": 0.5},
    }
    cfg = parse_config(doc, tmp_path)
    assert cfg.grid_step == 0.005 and cfg.chunk_size == 4096 and cfg.threads == 2
    assert cfg.constants_file == str(tmp_path / "c.json")
    assert [s.name for s in cfg.specs] == ["steinhaus(4)", "character(4,1)"]
    assert cfg.meanvalue.T_values == (1.0, 5.0) and cfg.smooth_theta == 0.5
    assert cfg.with_seed(9).specs[0].seed == 9


def test_battery_and_scan():
    cfg = parse_config({"battery": "canonical", "scan": {"start": 1e3, "stop": 1e5, "num": 3}})
    assert len(cfg.specs) == 29 and cfg.x_values == (1e3, 1e4, 1e5)


@pytest.mark.parametrize(
    "doc",
    [
        {"x_values": [100]},
        {"x_values": [100], "spec": {"kind": "one"}, "battery": "canonical"},
        {"x_values": [], "spec": {"kind": "one"}},
        {"x_values": [1000, 100], "spec": {"kind": "one"}},
        {"x_values": [1], "spec": {"kind": "one"}},
        {"x_values": ["a"], "spec": {"kind": "one"}},
        {"x_values": [100], "spec": {"kind": "one"}, "grid_step": -1},
        {"x_values": [100], "spec": {"kind": "one"}, "chunk_size": 0},
        {"x_values": [100], "spec": {"kind": "one"}, "bogus": 1},
        {"x_values": [100], "spec": {"kind": "wat"}},
        {"x_values": [100], "spec": {"kind": "table", "values": {"2": 3}}},
        {"x_values": [100], "spec": {"kind": "one"}, "meanvalue": {"families": ["nope"]}},
        {"x_values": [100], "spec": {"kind": "one"}, "smooth": {"theta": 2}},
        {"x_values": [100], "spec": {"kind": "one"}, "smooth": {"theta": "half"}},
        {"x_values": [100], "spec": {"kind": "one"}, "sieve_limit": 10**9},
        {"x_values": [100], "battery": "other"},
    ],
)
def test_bad_configs(doc):
    with pytest.raises(ConfigError):
        parse_config(doc)


def test_malformed_files(tmp_path):
    p = tmp_path / "bad.toml"
    p.write_text("x_values = [100\n")
    with pytest.raises(ConfigError):
        load_config(p)
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.toml")
    j = tmp_path / "run.json"
    j.write_text(json.dumps({"x_values": [100], "spec": {"kind": "one"}}))
    assert load_config(j).spec == mf.one()


def test_shipped_constants():
    C = load_constants()
    assert set(C.values) == set(NAMES)
    assert all(v > 0 for v in C.values.values())
    prov = C.provenance
    assert len(prov["battery"]) == 29 and prov["x_values"] == [1e4, 1e5, 1e6]
    for n in NAMES:
        # frozen = measured * margin rounded up, margin well below 10
        m = prov["measured"][n]
        assert m * prov["margin"] <= C[n] < 10 * m
    assert len(C.sha256) == 64
    assert C.scaled(0.1)["C_THM"] == pytest.approx(C["C_THM"] / 10)


def test_constants_errors(tmp_path):
    with pytest.raises(ConfigError):
        load_constants(tmp_path / "none.json")
    p = tmp_path / "c.json"
    p.write_text(json.dumps({"constants": {"C_TRIV": 1}}))
    with pytest.raises(ConfigError):
        load_constants(p)


@given(st.floats(1e-6, 1e6), st.floats(1.01, 5))
def test_freeze_rounds_up(measured, margin):
    v = freeze(measured, margin)
    assert measured * margin <= v * (1 + 1e-12)
    assert v <= measured * margin * 1.1 + 1e-12
    assert len(f"{v:.6e}".split("e")[0].rstrip("0").replace(".", "").lstrip("0")) <= 2
