import warnings
from dataclasses import replace

import numpy as np
import pytest

from erfeo3.errors import ConfigError
from erfeo3.model import (ErFeCouplings, FeParams, apply_overrides, build_coupling_vectors,
                          build_j_matrix, config_from_dict, default_config, dump_config,
                          validate_gamma12_symmetry)

try:
    import tomllib
except ModuleNotFoundError:
    import tomli as tomllib


def test_default_config_values():
    cfg = default_config()
    assert cfg.fe.J_Fe == 4.96
    assert cfg.fe.D_Fe_y == -0.107
    assert cfg.fe.A_x == 0.0073
    assert cfg.fe.A_z == 0.0150
    assert cfg.fe.A_xz == 0.0
    assert cfg.fe.g_Fe == (2.0, 2.0, 0.6)
    assert cfg.fe.S == 2.5 and cfg.fe.z == 6
    assert cfg.er.g_Er == (6.0, 3.4, 9.6)
    assert cfg.er.J_Er == 0.037
    assert cfg.xc.J == 0.60
    assert cfg.xc.D_x == 0.034
    assert cfg.xc.D_y == 0.003
    assert cfg.env.x == 1.0 and cfg.env.T == 4.0 and cfg.env.B_ext == (0.0, 0.0, 0.0)
    assert cfg.env.z_Er == 6.0


def test_fixed_spin_magnitude_enforced():
    with pytest.raises(ConfigError):
        FeParams(J_Fe=4.96, D_Fe_y=-0.107, A_x=0.0, A_z=0.0, S=2.0)
    with pytest.raises(ConfigError):
        FeParams(J_Fe=-1.0, D_Fe_y=0.0, A_x=0.0, A_z=0.0)


def test_coupling_vectors_minimal_pattern():
    xc = ErFeCouplings(J=0.0, D_x=1.0, D_y=2.0)
    d = build_coupling_vectors(xc)
    np.testing.assert_allclose(d["AA"], [1.0, 2.0, 0.0])
    np.testing.assert_allclose(d["AB"], [-1.0, -2.0, 0.0])
    np.testing.assert_allclose(d["BA"], [-1.0, 2.0, 0.0])
    np.testing.assert_allclose(d["BB"], [1.0, -2.0, 0.0])


def test_coupling_vectors_zero():
    d = build_coupling_vectors(ErFeCouplings(J=0.0, D_x=0.0, D_y=0.0))
    for v in d.values():
        np.testing.assert_array_equal(v, 0.0)


def test_coupling_vectors_generalized():
    xc = ErFeCouplings(J=0.0, D_x=1.0, D_y=0.0, D_x_prime=0.5)
    d = build_coupling_vectors(xc)
    np.testing.assert_allclose(d["AA"], [1.5, 0.0, 0.0])
    np.testing.assert_allclose(d["AB"], [-0.5, 0.0, 0.0])
    np.testing.assert_allclose(d["BA"], [-0.5, 0.0, 0.0])
    np.testing.assert_allclose(d["BB"], [1.5, 0.0, 0.0])


def test_generalized_warns_when_breaking_second_order():
    with pytest.warns(UserWarning):
        ErFeCouplings(J=0.1, D_x=0.0, D_y=0.0, J_prime=0.05)
    with pytest.warns(UserWarning):
        ErFeCouplings(J=0.1, D_x=0.0, D_y=0.0, D_z=0.01)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        ErFeCouplings(J=0.1, D_x=0.0, D_y=0.0, D_x_prime=0.01, D_z_prime=0.02)


def test_symmetry_satisfied_for_generated_pattern(rng):
    for _ in range(50):
        J, Jp, dx, dy, dz, dxp, dyp, dzp = rng.normal(size=8)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            xc = ErFeCouplings(J=J, D_x=dx, D_y=dy, J_prime=Jp,
                               D_x_prime=dxp, D_y_prime=dyp, D_z=dz, D_z_prime=dzp)
        report = validate_gamma12_symmetry(build_j_matrix(xc), build_coupling_vectors(xc))
        assert report.satisfied, report.violated_relations


def test_symmetry_zero_case():
    xc = ErFeCouplings(J=0.0, D_x=0.0, D_y=0.0)
    report = validate_gamma12_symmetry(build_j_matrix(xc), build_coupling_vectors(xc))
    assert report.satisfied


def test_symmetry_violation_detected():
    j = {"AA": 0.0, "AB": 0.0, "BA": 0.0, "BB": 0.0}
    d = {"AA": np.array([1.0, 0.0, 0.0]), "AB": np.zeros(3),
         "BA": np.zeros(3), "BB": np.array([-1.0, 0.0, 0.0])}
    report = validate_gamma12_symmetry(j, d)
    assert not report.satisfied
    assert any("x" in name for name in report.violated_relations)


def test_toml_round_trip_bit_exact(tmp_path):
    cfg = default_config()
    text = dump_config(cfg)
    data = tomllib.loads(text)
    cfg2 = config_from_dict(data)
    assert cfg2 == cfg
    # and through a file
    p = tmp_path / "cfg.toml"
    p.write_text(text)
    from erfeo3.model import load_config
    assert load_config(p) == cfg


def test_config_rejects_unknown_keys():
    with pytest.raises(ConfigError):
        config_from_dict({"fe": {"J_Fe": 1.0, "bogus": 2.0}})
    with pytest.raises(ConfigError):
        config_from_dict({"nope": {}})


def test_overrides():
    cfg = default_config()
    cfg2 = apply_overrides(cfg, {"environment.T": "10", "exchange.J": "0.5",
                                 "environment.B_ext": "0,0,1.5"})
    assert cfg2.env.T == 10.0
    assert cfg2.xc.J == 0.5
    assert cfg2.env.B_ext == (0.0, 0.0, 1.5)
    with pytest.raises(ConfigError):
        apply_overrides(cfg, {"environment.bogus": "1"})
    with pytest.raises(ConfigError):
        apply_overrides(cfg, {"T": "1"})


def test_environment_validation():
    cfg = default_config()
    with pytest.raises(ConfigError):
        replace(cfg.env, x=1.5)
    with pytest.raises(ConfigError):
        replace(cfg.env, T=-1.0)
