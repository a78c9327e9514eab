import math
from dataclasses import replace

import numpy as np
import pytest

from erfeo3.errors import DegenerateParameterError, InstabilityError
from erfeo3.magnon import (abcd, canting_angle, evolution_matrix, fluctuation_map,
                           magnon_basis, magnon_frequencies, quadrature_scale,
                           quadratures_from_amplitudes)
from erfeo3.model import default_config
from erfeo3.units import CONSTS

FE = default_config().fe

# frozen regression values for the fitted parameter set (direct evaluation
# of the closed-form coefficient expressions, double checked against an
# mpmath evaluation at 50 digits)
ABCD_REF = (-643.4639939313183, 642.6666596429419, 642.5507987123084, -642.218313308323)
NU0_REF = 0.578855770205837
NUPI_REF = 0.8959304427331863


def test_canting_angle_zero_without_dm():
    fe = replace(FE, D_Fe_y=0.0, A_xz=0.0)
    assert canting_angle(fe) == 0.0


def test_canting_angle_value():
    import mpmath
    mpmath.mp.dps = 50
    num = mpmath.mpf("0") + 6 * mpmath.mpf("-0.107")
    den = 6 * mpmath.mpf("4.96") - mpmath.mpf("0.0073") + mpmath.mpf("0.0150")
    ref = -mpmath.atan(num / den) / 2
    b0 = canting_angle(FE)
    assert abs(b0 - float(ref)) < 1e-15
    assert b0 == pytest.approx(0.010782, abs=1e-6)


def test_canting_angle_sign():
    assert FE.D_Fe_y < 0 and canting_angle(FE) > 0


def test_canting_angle_degenerate():
    fe = replace(FE, J_Fe=1.0, A_x=6.0, A_z=0.0)  # z J - A_x + A_z = 0
    with pytest.raises(DegenerateParameterError):
        canting_angle(fe)


def test_abcd_b_is_exchange_only():
    b0 = canting_angle(FE)
    _, b, _, _ = abcd(FE, b0)
    assert b == pytest.approx(FE.S * FE.z * FE.J_Fe / (CONSTS.g_f * CONSTS.mu_B), rel=1e-15)


def test_abcd_symmetric_limit():
    fe = replace(FE, D_Fe_y=0.0, A_x=0.0, A_z=0.0, A_xz=0.0)
    a, b, c, d = abcd(fe, 0.0)
    assert a == pytest.approx(-b, rel=1e-15)
    assert c == pytest.approx(b, rel=1e-15)
    assert d == pytest.approx(-b, rel=1e-15)


def test_abcd_regression():
    vals = abcd(FE, canting_angle(FE))
    np.testing.assert_allclose(vals, ABCD_REF, rtol=1e-12)


def test_qafm_frequency_against_reported():
    basis = magnon_basis(FE)
    assert abs(basis.nupi - 0.896) / 0.896 < 0.01
    assert basis.nupi == pytest.approx(NUPI_REF, rel=1e-12)


def test_qfm_frequency_regression():
    basis = magnon_basis(FE)
    assert basis.nu0 == pytest.approx(NU0_REF, rel=1e-12)
    assert basis.omega0 < basis.omegapi


def test_zero_frequency_at_degenerate_radicand():
    # a = b: the K=0 radicand vanishes (synthetic coefficients keeping the
    # K=pi product positive)
    w0, wpi = magnon_frequencies(1.0, 1.0, 1.0, 2.0)
    assert w0 == 0.0 and wpi > 0.0


def test_instability_error():
    fe = replace(FE, A_x=0.5, A_z=0.0)  # easy axis along a: canted-c state unstable
    b0 = canting_angle(fe)
    with pytest.raises(InstabilityError):
        magnon_frequencies(*abcd(fe, b0))


@pytest.mark.parametrize("K", [0.0, math.pi, 0.731, 2.1])
def test_frequencies_match_evolution_matrix(K):
    a, b, c, d = abcd(FE, canting_angle(FE))
    M = evolution_matrix(a, b, c, d, K)
    eig = np.linalg.eigvals(M)
    w_matrix = float(np.max(eig.imag))
    w_closed = CONSTS.gamma * math.sqrt((b * math.cos(K) - a) * (d * math.cos(K) + c))
    assert w_matrix == pytest.approx(w_closed, rel=1e-10)


def test_quadrature_scales_reciprocal():
    basis = magnon_basis(FE)
    a, b, c, d = basis.a, basis.b, basis.c, basis.d
    for K in (0.0, math.pi):
        t = quadrature_scale(a, b, c, d, K)
        y = 1.0 / t
        assert t * y == pytest.approx(1.0, rel=1e-15)
    assert basis.t_scale_0 * basis.y_scale_0 == pytest.approx(1.0)
    assert basis.t_scale_pi * basis.y_scale_pi == pytest.approx(1.0)


def test_fluctuation_map_zero():
    basis = magnon_basis(FE)
    dp, dm = fluctuation_map(basis, 1.0, (0.0, 0.0, 0.0, 0.0))
    np.testing.assert_array_equal(dp, 0.0)
    np.testing.assert_array_equal(dm, 0.0)


def test_fluctuation_map_unit_t0():
    basis = magnon_basis(FE)
    root = math.sqrt(2 * FE.S)
    dp, dm = fluctuation_map(basis, 1.0, (1.0, 0.0, 0.0, 0.0))
    np.testing.assert_allclose(dp, [0.0, 0.0, -math.sin(basis.beta0) * root], atol=1e-15)
    np.testing.assert_allclose(dm, [-math.cos(basis.beta0) * root, 0.0, 0.0], atol=1e-15)


def test_fluctuation_map_unit_ypi():
    basis = magnon_basis(FE)
    dp, dm = fluctuation_map(basis, 1.0, (0.0, 0.0, 0.0, 1.0))
    assert dm[1] == pytest.approx(-math.sqrt(2 * FE.S), rel=1e-15)
    assert dp[1] == 0.0 and dm[0] == 0.0 and dm[2] == 0.0


def test_fluctuation_map_amplitude_path():
    # alpha-based call must agree with explicit per-site quadratures
    basis = magnon_basis(FE)
    x = 0.4
    alpha = 0.02 + 0.03j
    quads = quadratures_from_amplitudes(basis, x, alpha0=0j, alphapi=alpha)
    ref = fluctuation_map(basis, x, quads)
    out = fluctuation_map(basis, x, alphapi=alpha)
    np.testing.assert_allclose(out[0], ref[0], rtol=1e-14)
    np.testing.assert_allclose(out[1], ref[1], rtol=1e-14)
