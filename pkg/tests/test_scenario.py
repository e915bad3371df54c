import json
from pathlib import Path

import jsonschema
import numpy as np
import pytest

from offres.cli import main
from offres.errors import ConfigError
from offres.scenario import (
    apply_overrides,
    config_hash,
    emit_csv,
    figure,
    load_presets,
    load_schema,
    preset_names,
    run,
    validate_config,
)

ROOT = Path(__file__).resolve().parents[1]


def resonant(samples=201):
    return {
        "system": "two_level",
        "modulation": "none",
        "parameters": {"coupling": 1.0, "detuning": 0.0},
        "time": {"t_max": 5.0, "samples": samples},
    }


def read_csv(path):
    lines = Path(path).read_text().splitlines()
    header = lines[0].split(",")
    data = np.array([[float(x) for x in ln.split(",")] for ln in lines[1:]])
    return {h: data[:, i] for i, h in enumerate(header)}


def test_schema_is_valid_and_published():
    schema = load_schema()
    jsonschema.Draft202012Validator.check_schema(schema)
    assert json.loads((ROOT / "docs" / "config.schema.json").read_text()) == schema


def test_resonant_run_is_sine_squared():
    res = run(resonant())
    t = res.columns["t"]
    assert np.abs(res.columns["P1"] - np.sin(t) ** 2).max() < 1e-6


@pytest.mark.parametrize("patch, field", [
    ({"modulation": "sawtooth"}, "modulation"),
    ({"colour": "red"}, "colour"),
    ({"parameters": {"coupling": 1.0}}, "parameters.detuning"),
    ({"parameters": {"coupling": 1.0, "detuning": 0.0, "speed": 2}}, "parameters.speed"),
    ({"noise": {"amplitude": 0.1}}, "noise.seed"),
    ({"modulation": "gaussian"}, "parameters.amplitude"),
    ({"time": {"t_max": 5.0}}, "time.samples"),
    ({"initial": {"level": 3}}, "initial.level"),
    ({"overlays": ["envelope"]}, "overlays"),
])
def test_errors_name_the_field(patch, field):
    cfg = {**resonant(), **patch}
    with pytest.raises(ConfigError) as err:
        validate_config(cfg)
    assert err.value.field == field


def test_random_field_needs_seed():
    cfg = {"system": "rabi", "modulation": "none",
           "parameters": {"coupling": 1.0, "omega0": 1.0, "omega_b": 1.0},
           "initial": {"field": "random"}, "time": {"t_max": 1.0, "samples": 3}}
    with pytest.raises(ConfigError) as err:
        validate_config(cfg)
    assert err.value.field == "initial.seed"


def test_overrides_and_hash():
    cfg = {**resonant(), "noise": {"amplitude": 0.1, "seed": 1}}
    new = apply_overrides(cfg, seed=9, samples=11)
    assert new["noise"]["seed"] == 9 and new["time"]["samples"] == 11
    assert cfg["noise"]["seed"] == 1
    assert config_hash(cfg) == config_hash(json.loads(json.dumps(cfg)))
    assert config_hash(cfg) != config_hash(new)


def test_emit_csv_format(tmp_path):
    path = emit_csv({"t": [0, 0.5, 1], "P1": [0, 1 / 3, True]}, tmp_path / "x.csv")
    raw = path.read_bytes()
    assert b"\r" not in raw
    assert raw.decode("ascii").splitlines() == ["t,P1", "0,0", "0.5,0.333333333333", "1,1"]
    with pytest.raises(ValueError):
        emit_csv({"a": [1, 2], "b": [1]}, tmp_path / "y.csv")


def test_cli_run_writes_csv_and_record(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps(resonant()))
    assert main(["--samples", "3", "run", str(cfg), "--out", str(tmp_path / "r")]) == 0
    lines = (tmp_path / "r.csv").read_text().splitlines()
    assert len(lines) == 4
    rec = json.loads((tmp_path / "r.run.json").read_text())
    assert rec["output"] == "r.csv"
    assert rec["config"]["time"]["samples"] == 3
    assert len(rec["config_sha256"]) == 64
    cols = read_csv(tmp_path / "r.csv")
    assert np.abs(cols["P0"] + cols["P1"] - 1).max() < 1e-9


def test_cli_exit_codes(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({**resonant(), "modulation": "sawtooth"}))
    assert main(["run", str(bad), "--out", str(tmp_path / "bad")]) == 2
    assert "modulation" in capsys.readouterr().err

    broken = tmp_path / "broken.json"
    broken.write_text("{not json")
    assert main(["run", str(broken)]) == 2

    tight = tmp_path / "tight.json"
    tight.write_text(json.dumps({"system": "rabi", "modulation": "none",
                                 "parameters": {"coupling": 1.0, "omega0": 1.0, "omega_b": 1.0, "n_max": 10},
                                 "time": {"t_max": 1.0, "samples": 3}}))
    assert main(["run", str(tight), "--out", str(tmp_path / "tight")]) == 2
    assert "n_max" in capsys.readouterr().err

    leak = tmp_path / "leak.json"
    leak.write_text(json.dumps({"system": "rabi", "modulation": "none",
                                "parameters": {"coupling": 5.0, "omega0": 1.0, "omega_b": 1.0, "n_max": 28},
                                "initial": {"mean_photons": 10.0},
                                "time": {"t_max": 10.0, "samples": 41}}))
    assert main(["run", str(leak), "--out", str(tmp_path / "leak")]) == 3

    assert main(["optimize-gaussian", "--delta", "2", "--a-range", "0:0.01:3", "--xi-range", "0.1:0.2:3",
                 "--pulses", "1", "--out", str(tmp_path / "g")]) == 3

    blocker = tmp_path / "file"
    blocker.write_text("")
    good = tmp_path / "good.json"
    good.write_text(json.dumps(resonant(3)))
    assert main(["run", str(good), "--out", str(blocker / "sub" / "r")]) == 4


def test_cli_scan_and_figure(tmp_path):
    spec = tmp_path / "s.json"
    spec.write_text(json.dumps({"kind": "scan", "parameter": "coupling1", "lo": 0.5, "hi": 1.5, "points": 5,
                                "fixed": {"coupling2": 1.0, "detuning": 30.0}}))
    assert main(["scan", str(spec), "--out", str(tmp_path / "s")]) == 0
    assert len((tmp_path / "s.csv").read_text().splitlines()) == 6
    bad = tmp_path / "b.json"
    bad.write_text(json.dumps({"kind": "scan", "lo": 0.5}))
    assert main(["scan", str(bad), "--out", str(tmp_path / "b")]) == 2
    assert main(["figure", "nope"]) == 2


def test_fig1a_envelope_and_fig1c_cap(tmp_path):
    cols = read_csv(figure("fig1a", tmp_path)[0])
    assert cols["P1"].max() >= 0.999
    assert np.all(cols["envelope"] >= 0) and np.all(cols["envelope"] <= 1)
    cols = read_csv(figure("fig1c", tmp_path)[0])
    cap = 4 / (4 + 20.0**2)
    assert abs(cols["P1"].max() - cap) < 1e-5
    assert np.all(cols["P1"] <= cap + 1e-12)


def test_presets_load_and_validate():
    presets = load_presets()
    assert set(preset_names()) == set(presets)
    assert {"fig1a", "fig6", "fig11b", "rydberg", "ra223"} <= set(presets)
    for name, p in presets.items():
        assert p["caption"]
        for job in p["jobs"]:
            if job["kind"] == "run":
                validate_config(job["config"])


def test_rerun_is_byte_identical(tmp_path):
    a = figure("fig4", tmp_path / "a")
    b = figure("fig4", tmp_path / "b")
    for x, y in zip(a, b):
        assert x.read_bytes() == y.read_bytes()
    c = figure("fig4", tmp_path / "c", seed=2)
    assert a[0].read_bytes() != c[0].read_bytes()
