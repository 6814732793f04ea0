import json

import numpy as np
import pytest

from lamtrans import cli


@pytest.fixture()
def tiny_config(tmp_path):
    """Reduced grids so CLI round trips stay fast."""
    cfg = {
        "sweeps": {
            "pump_powers_mW": [0.0, 50.0, 100.0],
            "input_powers_mW": [0.01, 1.0],
            "bandwidth_powers_mW": [0.001, 0.1],
            "spectrum_powers_mW": [0.02],
            "detuning_grid": {"span_MHz": 160.0, "points": 41},
            "populations": {"points": 51},
        },
    }
    path = tmp_path / "tiny.json"
    path.write_text(json.dumps(cfg))
    return str(path)


def read_table(path):
    with open(path) as fh:
        lines = [ln.rstrip("\n") for ln in fh]
    meta = [ln for ln in lines if ln.startswith("#")]
    body = [ln for ln in lines if not ln.startswith("#")]
    header = body[0].split(",")
    rows = [ln.split(",") for ln in body[1:]]
    return meta, header, rows


def test_defaults_config_is_schema_valid():
    cfg = cli.load_config(None)
    assert cfg["atom"]["preset"] == "Ba-138"
    assert cfg["detection"]["solid_angle"] == 0.067


def test_unknown_key_rejected(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"atoms": {"preset": "Ba-138"}}))
    with pytest.raises(cli.ConfigInvalid):
        cli.load_config(str(path))


def test_nested_unknown_key_rejected(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"detection": {"solid_angel": 0.07}}))
    with pytest.raises(cli.ConfigInvalid):
        cli.load_config(str(path))


def test_empty_power_grid_rejected(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"sweeps": {"pump_powers_mW": []}}))
    with pytest.raises(cli.ConfigInvalid):
        cli.load_config(str(path))


def test_both_beam_geometries_rejected(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(
        {"beams": {"pump": {"transit_us": 3.62, "width_along_mm": 2.55}}}))
    with pytest.raises(cli.ConfigInvalid):
        cli.load_config(str(path))


def test_exit_code_config_error(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"nope": 1}))
    code = cli.main(["pump-sweep", "--config", str(path),
                     "--out", str(tmp_path / "x.csv")])
    assert code == 2
    assert "config error" in capsys.readouterr().err


def test_exit_code_numerical_failure(tmp_path, monkeypatch):
    def boom(cfg, out, threads):
        raise cli.cavity.CutoffNotConverged("forced")
    monkeypatch.setitem(cli._DISPATCH, "cavity", boom)
    code = cli.main(["cavity", "--out", str(tmp_path / "x.csv")])
    assert code == 3


def test_seedless_flag(tmp_path, tiny_config):
    out = tmp_path / "p.csv"
    code = cli.main(["populations", "--config", tiny_config,
                     "--out", str(out), "--seedless"])
    assert code == 0
    with pytest.raises(SystemExit) as err:
        cli.main(["populations", "--seedless=yes", "--out", str(out)])
    assert err.value.code == 2


def test_pump_sweep_zero_power_row(tmp_path, tiny_config):
    out = tmp_path / "pump.csv"
    assert cli.main(["pump-sweep", "--config", tiny_config,
                     "--out", str(out)]) == 0
    meta, header, rows = read_table(str(out))
    assert header == ["power_mW", "pumping_efficiency", "stretched"]
    zero = [r for r in rows if float(r[0]) == 0.0]
    assert len(zero) == 2
    assert all(float(r[1]) == 0.0 for r in zero)
    powers = [float(r[0]) for r in rows]
    assert powers == sorted(powers)
    # stretched strictly above unstretched at positive power
    eff = {(float(r[0]), r[2]): float(r[1]) for r in rows}
    for p in (50.0, 100.0):
        assert eff[(p, "1")] > eff[(p, "0")]


def test_populations_deterministic_bytes(tmp_path, tiny_config):
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    assert cli.main(["populations", "--config", tiny_config,
                     "--out", str(out1), "--threads", "1"]) == 0
    assert cli.main(["populations", "--config", tiny_config,
                     "--out", str(out2), "--threads", "4"]) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_spectrum_normalized_and_symmetric(tmp_path, tiny_config):
    out = tmp_path / "spec.csv"
    assert cli.main(["spectrum", "--config", tiny_config,
                     "--out", str(out)]) == 0
    meta, header, rows = read_table(str(out))
    vals = np.array([[float(v) for v in r[:2]] for r in rows])
    assert vals[:, 1].max() == 1.0
    assert np.max(np.abs(vals[:, 1] - vals[::-1, 1])) < 1e-9
    assert any("units=MHz,normalized,mW" in m for m in meta)


def test_metadata_header_contents(tmp_path, tiny_config):
    out = tmp_path / "pump.csv"
    cli.main(["pump-sweep", "--config", tiny_config, "--out", str(out)])
    meta, _, _ = read_table(str(out))
    assert any("config_sha256=" in m for m in meta)
    assert any("gamma_ab=18.9 MHz" in m for m in meta)
    assert any("columns=power_mW,pumping_efficiency,stretched" in m
               for m in meta)
