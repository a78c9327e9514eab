import math
from dataclasses import replace

import pytest

from erfeo3.dicke import alignment_energy, coupling_strengths, derive_dicke_params, reduce_for_ltpt
from erfeo3.errors import DomainError
from erfeo3.magnon import magnon_basis
from erfeo3.model import default_config
from erfeo3.units import CONSTS

# values reported for the fitted parameter set (THz unless noted)
LAMBDA_REF = {"x": 0.051, "y": 0.041, "yp": 3.1e-5, "z": 0.116, "zp": -0.040}
E_X_REF_THZ = 0.023


def test_alignment_energy_value(cfg, basis):
    e = alignment_energy(cfg.xc, cfg.fe.S, basis.beta0)
    assert abs(e / CONSTS.h - E_X_REF_THZ) / E_X_REF_THZ < 0.03


def test_alignment_energy_trivial(cfg, basis):
    xc0 = replace(cfg.xc, J=0.0, D_y=0.0)
    assert alignment_energy(xc0, cfg.fe.S, basis.beta0) == 0.0


def test_alignment_energy_no_canting(cfg):
    assert alignment_energy(cfg.xc, cfg.fe.S, 0.0) == pytest.approx(4 * cfg.fe.S * cfg.xc.D_y)


def test_coupling_strengths_reported_values(cfg, basis):
    lx, ly, lyp, lz, lzp = coupling_strengths(cfg, basis)
    assert abs(lz - LAMBDA_REF["z"]) / LAMBDA_REF["z"] < 0.02
    assert abs(lx - LAMBDA_REF["x"]) / LAMBDA_REF["x"] < 0.02
    assert abs(ly - LAMBDA_REF["y"]) / LAMBDA_REF["y"] < 0.02
    assert abs(lyp - LAMBDA_REF["yp"]) / LAMBDA_REF["yp"] < 0.02
    assert abs(lzp - LAMBDA_REF["zp"]) / abs(LAMBDA_REF["zp"]) < 0.02


def test_coupling_signs(cfg, basis):
    lx, ly, lyp, lz, lzp = coupling_strengths(cfg, basis)
    assert lx > 0 and ly > 0 and lyp > 0 and lz > 0 and lzp < 0
    assert abs(lyp) < 0.01 * min(lx, lz)


def test_couplings_vanish_at_zero_dilution(cfg, basis):
    cfg0 = cfg.with_env(x=0.0)
    assert coupling_strengths(cfg0, basis) == (0.0, 0.0, 0.0, 0.0, 0.0)


def test_sqrt_x_scaling(cfg, basis):
    for x1, x2 in ((0.3, 0.9), (0.05, 1.0), (0.77, 0.13)):
        l1 = coupling_strengths(cfg.with_env(x=x1), basis)
        l2 = coupling_strengths(cfg.with_env(x=x2), basis)
        for a, b in zip(l1, l2):
            assert a / b == pytest.approx(math.sqrt(x1 / x2), rel=1e-12)


def test_reduce_zero_field(cfg, dicke_params):
    red = reduce_for_ltpt(dicke_params, 0.0)
    assert red.omegaEr == pytest.approx(dicke_params.E_x / CONSTS.h, rel=1e-15)
    assert red.lambda_x == dicke_params.lambda_x
    assert red.lambda_z == dicke_params.lambda_z
    assert red.omegapi == dicke_params.omegapi


def test_reduce_level_crossing(dicke_params):
    b_cross = -dicke_params.E_x / (dicke_params.g_Er[0] * CONSTS.mu_B)
    red = reduce_for_ltpt(dicke_params, b_cross)
    assert red.omegaEr == pytest.approx(0.0, abs=1e-15)


def test_reduce_one_tesla(dicke_params):
    # independent arithmetic straight from the definition
    expected = (dicke_params.E_x + 6.0 * 5.7883818060e-2 * 1.0) / 4.135667696
    red = reduce_for_ltpt(dicke_params, 1.0)
    assert red.omegaEr == pytest.approx(expected, rel=1e-9)
    assert red.omegaEr == pytest.approx(0.10687292027159809, rel=1e-12)


def test_reduce_rejects_transverse_field(dicke_params):
    with pytest.raises(DomainError):
        reduce_for_ltpt(dicke_params, 0.0, B_ext=(0.0, 1.0, 0.0))
    with pytest.raises(DomainError):
        reduce_for_ltpt(dicke_params, 0.0, B_ext=(0.0, 0.0, 0.5))


def test_derive_dicke_params_consistency(cfg, dicke_params, basis):
    assert dicke_params.omega0 == pytest.approx(basis.nu0)
    assert dicke_params.omegapi == pytest.approx(basis.nupi)
    assert dicke_params.zEr_JEr == pytest.approx(6.0 * cfg.er.J_Er)
    assert dicke_params.x == 1.0
