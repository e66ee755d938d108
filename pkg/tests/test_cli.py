"""Command-line interface: configs in, artifacts out, exit codes."""

import json
import math

import numpy as np
import pytest

from optomech import cli
from optomech import params as pm
from optomech import states

SYSTEM = dict(wavelength=1064e-9, mass=40e-12, omega_m=2 * math.pi * 2e3,
              finesse=5e4, photon_number=1.7e9, cavity_length=750e-6,
              reflectivity=0.5, temperature=25e-3, quality_factor=5e6)


def write_cfg(tmp_path, obj, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(obj))
    return str(path)


def run(tmp_path, command, cfg=None, extra=()):
    argv = [command, "--out", str(tmp_path / "out")]
    if cfg is not None:
        argv += ["--config", write_cfg(tmp_path, cfg)]
    argv += list(extra)
    return cli.main(argv), tmp_path / "out"


def test_params_command(tmp_path):
    code, out = run(tmp_path, "params", {"system": SYSTEM})
    assert code == 0
    doc = json.loads((out / "params.json").read_text())
    expected = pm.derive(pm.SystemParams(**SYSTEM))
    assert doc["chi_x"] == pytest.approx(expected.chi_x)
    assert doc["nbar_over_q"] == pytest.approx(expected.nbar_over_q)
    table = (out / "params.txt").read_text()
    assert table.startswith("Optical wavelength:")


def test_params_command_dispersive_block(tmp_path):
    code, out = run(tmp_path, "params",
                    {"system": {**SYSTEM, "reflectivity": 0.99}})
    assert code == 0
    doc = json.loads((out / "params.json").read_text())
    expected = pm.derive(pm.SystemParams(**{**SYSTEM, "reflectivity": 0.99}))
    assert doc["g_sq"] == pytest.approx(expected.g_sq)
    assert doc["chi_sq"] == pytest.approx(expected.chi_sq)
    assert doc["omega_sq"] == pytest.approx(expected.omega_sq)


def test_params_schema_violation_exit_2(tmp_path, capsys):
    cfg = {"system": {k: v for k, v in SYSTEM.items() if k != "mass"}}
    code, _ = run(tmp_path, "params", cfg)
    assert code == 2
    assert "mass" in capsys.readouterr().err


def test_params_unknown_field_exit_2(tmp_path, capsys):
    code, _ = run(tmp_path, "params", {"system": {**SYSTEM, "finess": 1e4}})
    assert code == 2
    assert "finess" in capsys.readouterr().err


def test_missing_config_file_exit_2(tmp_path):
    assert cli.main(["params", "--config", str(tmp_path / "nope.json"),
                     "--out", str(tmp_path)]) == 2


def test_state_command_round_trip(tmp_path):
    cfg = {"grid": {"x_max": 8.0, "n_points": 512},
           "state": {"kind": "momentum_squeezed", "r": 0.5}}
    code, out = run(tmp_path, "state", cfg)
    assert code == 0
    state = states.state_from_npz(out / "state.npz")
    expected = states.make_squeezed(states.default_grid(), 0.5)
    assert np.max(np.abs(state.rho - expected.rho)) < 1e-14
    doc = json.loads((out / "state.json").read_text())
    assert doc["var_x"] == pytest.approx(np.e / 2, rel=1e-6)


def test_measure_command_shot_noise(tmp_path):
    cfg = {"state": {"kind": "ground"}, "chi": 0.0}
    code, out = run(tmp_path, "measure", cfg)
    assert code == 0
    rows = (out / "pdf.csv").read_text().strip().splitlines()[1:]
    q, p = np.array([list(map(float, r.split(","))) for r in rows]).T
    dq = q[1] - q[0]
    var = np.sum(q**2 * p) * dq / (np.sum(p) * dq)
    assert var == pytest.approx(0.5, abs=1e-4)


def test_measure_command_with_window(tmp_path):
    cfg = {"state": {"kind": "ground"}, "chi": 1.0,
           "window": {"center": 1.5, "width": 0.8}}
    code, out = run(tmp_path, "measure", cfg)
    assert code == 0
    doc = json.loads((out / "measurement.json").read_text())
    assert doc["window_probability"] == pytest.approx(0.148895, abs=1e-4)
    assert (out / "conditioned.npz").exists()


def test_wigner_command_conditioned_panel(tmp_path):
    cfg = {"state": {"kind": "ground"}, "mode": "conditioned", "chi": 1.0,
           "window": {"center": 1.5, "width": 0.8}, "label": "b"}
    code, out = run(tmp_path, "wigner", cfg)
    assert code == 0
    doc = json.loads((out / "wigner_b.json").read_text())
    assert doc["min"] < -1e-3
    assert (out / "wigner_b.csv").exists()


def test_wigner_command_bad_mode_exit_2(tmp_path):
    code, _ = run(tmp_path, "wigner", {"state": {"kind": "ground"},
                                       "mode": "sideways"})
    assert code == 2


def test_pulse_command(tmp_path):
    cfg = {"photon_number": 1.7e9, "g_lin": 1.9e-3,
           "spectrum": "square_optimal"}
    code, out = run(tmp_path, "pulse", cfg)
    assert code == 0
    doc = json.loads((out / "pulse_verify.json").read_text())
    assert doc["chi_numeric"] == pytest.approx(doc["chi_closed_form"],
                                               rel=5e-3)
    assert doc["kick_numeric"] == pytest.approx(doc["kick_closed_form"],
                                                rel=5e-3)


def test_protocol_command_deterministic(tmp_path):
    cfg = {"initial": {"kind": "ground"}, "chi": 1.0,
           "window": {"center": 1.5, "width": 0.8},
           "n_runs": 200, "seed": 5, "system": SYSTEM}
    code, out = run(tmp_path, "protocol", cfg)
    assert code == 0
    first = (out / "summary.json").read_bytes()
    runs_first = (out / "runs.jsonl").read_bytes()
    code, out = run(tmp_path, "protocol", cfg)
    assert code == 0
    assert (out / "summary.json").read_bytes() == first
    assert (out / "runs.jsonl").read_bytes() == runs_first
    doc = json.loads(first)
    assert doc["nbar_over_q"] == pytest.approx(0.0520914, rel=1e-4)
    assert (out / "wigner_mixture.csv").exists()


def test_protocol_seed_flag_overrides_config(tmp_path):
    cfg = {"initial": {"kind": "ground"}, "chi": 1.0,
           "window": {"center": 1.5, "width": 0.8}, "n_runs": 100, "seed": 5}
    _, out = run(tmp_path, "protocol", cfg)
    base = json.loads((out / "summary.json").read_text())
    code, out = run(tmp_path, "protocol", cfg, extra=["--seed", "6"])
    assert code == 0
    override = json.loads((out / "summary.json").read_text())
    assert base["acceptance_rate"] != override["acceptance_rate"]


def test_verify_subset_passes(tmp_path):
    cfg = {"checks": ["physical_separation", "rethermalization"]}
    code, out = run(tmp_path, "verify", cfg)
    assert code == 0
    doc = json.loads((out / "verify.json").read_text())
    assert doc["passed"] and doc["n_checks"] == 2


def test_verify_perturbed_target_fails(tmp_path):
    cfg = {"checks": ["physical_separation"],
           "overrides": {"separation.physical": 42e-15}}
    code, out = run(tmp_path, "verify", cfg)
    assert code == 1
    doc = json.loads((out / "verify.json").read_text())
    assert doc["n_failed"] == 1


def test_verify_unknown_check_skips_with_warning(tmp_path, capsys):
    cfg = {"checks": ["rethermalization", "flux_capacitor"]}
    code, out = run(tmp_path, "verify", cfg)
    assert code == 0
    assert "flux_capacitor" in capsys.readouterr().err
    doc = json.loads((out / "verify.json").read_text())
    assert doc["skipped"] == ["flux_capacitor"]


def test_usage_error_exit_2():
    with pytest.raises(SystemExit) as err:
        cli.main(["frobnicate"])
    assert err.value.code == 2
