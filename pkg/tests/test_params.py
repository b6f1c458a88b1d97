import json

import pytest

from wavedesal.params import ParameterError, ParameterSet, load_params


def test_defaults_match_published_tables(params):
    assert params.general.fcr == 0.108
    assert params.general.gravity == 9.81
    assert params.general.rho_water == 1025.0
    assert params.general.water_depth == 12.0
    assert params.general.distance_to_shore == 500.0
    assert params.pto.l2 == 4.7
    assert params.pto.l3 == 0.0
    assert params.pto.stroke_max == 20.0
    assert params.pto.fos_cylinder == 6.0
    assert params.pto.fos_rod == 1.5
    assert params.pto.labor_factor == 0.7
    assert params.pto.cap_attachment_factor == 0.3
    assert params.pto.joint_efficiency == 0.8
    assert params.solver.dt == 0.1
    assert params.solver.duration == 300.0
    assert params.solver.omega_min == 0.2
    assert params.solver.omega_step == 0.14
    assert params.solver.omega_max == 3.0
    assert params.swro.recovery_ratio == 0.442


def test_default_checksum_stable(params):
    # Any change to a default must be a conscious decision.
    assert params.checksum() == ParameterSet().checksum()


def test_roundtrip_save_load(tmp_path, params):
    path = tmp_path / "params.json"
    params.save(path)
    # A full dump is a valid override file and reproduces the set.
    again = load_params(path)
    assert again == params
    assert again.checksum() == params.checksum()


def test_partial_override(tmp_path):
    path = tmp_path / "override.json"
    path.write_text(json.dumps({"general": {"fcr": 0.09}}))
    p = load_params(path)
    assert p.general.fcr == 0.09
    assert p.general.gravity == 9.81  # untouched


def test_unknown_group_rejected(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"generall": {"fcr": 0.09}}))
    with pytest.raises(ParameterError, match="generall"):
        load_params(path)


def test_unknown_key_rejected(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"general": {"frc": 0.09}}))
    with pytest.raises(ParameterError, match="frc"):
        load_params(path)


def test_range_error_names_key(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"general": {"water_depth": -1.0}}))
    with pytest.raises(ParameterError, match="water_depth"):
        load_params(path)


def test_draft_depth_consistency(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"general": {"water_depth": 5.0}}))
    with pytest.raises(ParameterError, match="draft"):
        load_params(path)


def test_missing_file():
    with pytest.raises(ParameterError, match="not found"):
        load_params("/nonexistent/params.json")


def test_invalid_json(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    with pytest.raises(ParameterError, match="invalid JSON"):
        load_params(path)
