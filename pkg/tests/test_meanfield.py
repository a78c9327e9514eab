import math
from dataclasses import replace

import numpy as np
import pytest

from erfeo3.magnon import canting_angle
from erfeo3.meanfield import (SpinState, brillouin, compute_mean_fields, free_energy,
                              order_parameter, rotation_angle_deg, solve_equilibrium,
                              stationarity_residual, thermal_update)
from erfeo3.model import build_coupling_vectors, default_config
from erfeo3.units import CONSTS


def _state(sa, sb, SA, SB):
    return SpinState(np.asarray(sa, float), np.asarray(sb, float),
                     np.asarray(SA, float), np.asarray(SB, float))


# ---------------------------------------------------------------------------
# Mean fields
# ---------------------------------------------------------------------------

def test_zeeman_only_fields(cfg):
    cfg_b = cfg.with_env(B_ext=(0.0, 0.0, 1.0))
    f = compute_mean_fields(SpinState.zero(), cfg_b)
    np.testing.assert_allclose(f.h_Er_A, [0.0, 0.0, cfg.er.g_Er[2] * CONSTS.mu_B])
    np.testing.assert_allclose(f.h_Er_B, f.h_Er_A)
    np.testing.assert_allclose(f.h_Fe_A, [0.0, 0.0, cfg.fe.g_Fe[2] * CONSTS.mu_B])


def test_er_er_exchange_field(cfg):
    st = _state([0, 0, 0], [1, 0, 0], [0, 0, 0], [0, 0, 0])
    f = compute_mean_fields(st, cfg)
    np.testing.assert_allclose(f.h_Er_A, [2 * 6 * cfg.er.J_Er, 0.0, 0.0])
    np.testing.assert_allclose(f.h_Er_B, 0.0)


def test_er_y_component_suppressed(cfg):
    # state with nonzero Fe y components: the Er-Fe exchange would push the
    # Er y field were it not pinned
    st = _state([-0.1, 0, 0.5], [-0.1, 0, -0.5],
                [0.02, 1.8, -1.7], [0.02, -1.8, 1.7])
    f = compute_mean_fields(st, cfg.with_env(B_ext=(0.0, 0.0, 0.0)))
    # the naive (unsuppressed) y contribution is nonzero
    d = build_coupling_vectors(cfg.xc)
    naive_y = 2 * (cfg.xc.J * (st.S_A[1] + st.S_B[1])
                   - np.cross(d["AA"], st.S_A)[1] - np.cross(d["AB"], st.S_B)[1])
    assert abs(naive_y) > 0.01
    assert f.h_Er_A[1] == 0.0 and f.h_Er_B[1] == 0.0


def test_fe_field_term_by_term(cfg):
    # independent evaluation of the Fe-Fe bracket for a generic state
    rng = np.random.default_rng(5)
    st = _state(*rng.normal(size=(4, 3)))
    f = compute_mean_fields(st, cfg)
    zJ = cfg.fe.z * cfg.fe.J_Fe
    zD = cfg.fe.z * cfg.fe.D_Fe_y
    d = build_coupling_vectors(cfg.xc)
    expect_x = (zJ * st.S_B[0] + zD * st.S_B[2]
                - 2 * cfg.fe.A_x * st.S_A[0] - cfg.fe.A_xz * st.S_A[2]
                + cfg.env.x * (cfg.xc.J * (st.sigma_A[0] + st.sigma_B[0])
                               + np.cross(d["AA"], st.sigma_A)[0]
                               + np.cross(d["BA"], st.sigma_B)[0]))
    assert f.h_Fe_A[0] == pytest.approx(expect_x, rel=1e-12)
    expect_y = zJ * st.S_B[1] + cfg.env.x * (cfg.xc.J * (st.sigma_A[1] + st.sigma_B[1])
                                             + np.cross(d["AA"], st.sigma_A)[1]
                                             + np.cross(d["BA"], st.sigma_B)[1])
    assert f.h_Fe_A[1] == pytest.approx(expect_y, rel=1e-12)


# ---------------------------------------------------------------------------
# Brillouin function and thermal update
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("z", [0.1, 1.0, 3.0])
def test_brillouin_half_is_tanh(z):
    assert brillouin(0.5, z) == pytest.approx(math.tanh(z), rel=1e-12)


def test_brillouin_saturates():
    assert brillouin(2.5, 1e3) == pytest.approx(1.0, abs=1e-12)
    assert brillouin(2.5, -1e3) == pytest.approx(-1.0, abs=1e-12)


def test_brillouin_small_argument():
    assert brillouin(2.5, 0.01) == pytest.approx(0.004667, abs=1e-6)
    # odd function, bounded
    z = np.linspace(-5, 5, 101)
    vals = brillouin(2.5, z)
    np.testing.assert_allclose(vals, -brillouin(2.5, -z), atol=1e-14)
    assert np.all(np.abs(vals) < 1.0)


def test_thermal_update_linear_response(cfg):
    eps = 1e-4
    T = 300.0
    st = thermal_update(compute_mean_fields(SpinState.zero(), cfg), T, cfg)
    f = compute_mean_fields(SpinState.zero(), cfg.with_env(B_ext=(0.0, 0.0, eps / (cfg.er.g_Er[2] * CONSTS.mu_B))))
    out = thermal_update(f, T, cfg)
    assert out.sigma_A[2] == pytest.approx(-eps / (2 * CONSTS.k_B * T), rel=1e-6)
    assert st.sigma_A[2] == 0.0


def test_thermal_update_zero_fields(cfg):
    out = thermal_update(compute_mean_fields(SpinState.zero(), cfg), 5.0, cfg)
    np.testing.assert_array_equal(out.as_array(), 0.0)


def test_thermal_update_fe_magnitude(cfg):
    import mpmath
    T = 7.0
    S = cfg.fe.S
    mag = CONSTS.k_B * T * 10.0 / S
    from erfeo3.meanfield import MeanFields
    f = MeanFields(np.zeros(3), np.zeros(3), np.array([0.0, 0.0, mag]), np.zeros(3))
    out = thermal_update(f, T, cfg)
    # independent Brillouin evaluation at 30 digits
    mpmath.mp.dps = 30
    J = mpmath.mpf(5) / 2
    z = mpmath.mpf(10)
    a = (2 * J + 1) / (2 * J)
    b = 1 / (2 * J)
    ref = float(a * mpmath.coth(a * z) - b * mpmath.coth(b * z))
    assert np.linalg.norm(out.S_A) == pytest.approx(S * ref, rel=1e-12)
    assert out.S_A[2] < 0  # anti-parallel to the field


def test_thermal_update_saturation_at_zero_T(cfg):
    from erfeo3.meanfield import MeanFields
    f = MeanFields(np.array([0.0, 0.0, 1.0]), np.zeros(3), np.array([1.0, 0.0, 0.0]), np.zeros(3))
    out = thermal_update(f, 0.0, cfg)
    np.testing.assert_allclose(out.sigma_A, [0, 0, -1.0])
    np.testing.assert_allclose(out.S_A, [-cfg.fe.S, 0, 0])


# ---------------------------------------------------------------------------
# Equilibrium solving
# ---------------------------------------------------------------------------

def test_gamma2_phase(cfg):
    res = solve_equilibrium(cfg, T=10.0)
    st = res.state
    assert res.converged
    assert abs(st.sigma_A[2]) < 1e-8 and abs(st.sigma_B[2]) < 1e-8
    assert abs(st.S_A[1]) < 1e-8 and abs(st.S_B[1]) < 1e-8
    assert st.S_A[2] == pytest.approx(-st.S_B[2], rel=1e-9)
    assert st.S_A[0] > 0 and st.S_B[0] > 0          # canting toward +a
    assert st.sigma_A[0] < 0                        # Er polarized along -a
    assert order_parameter(st) < 1e-8


def test_gamma12_phase(cfg):
    res = solve_equilibrium(cfg, T=2.0)
    st = res.state
    assert res.converged
    assert st.sigma_A[2] > 0.5
    assert st.sigma_A[2] == pytest.approx(-st.sigma_B[2], rel=1e-9)
    assert abs(st.S_A[1]) > 0.5
    assert order_parameter(st) > 0.1


def test_zero_temperature_rotation_angle(cfg):
    res = solve_equilibrium(cfg, T=0.0)   # clamped to 0.01 K internally
    assert res.converged
    phi = rotation_angle_deg(res.state)
    assert abs(phi - 46.0) <= 1.0


def test_order_parameter_arithmetic():
    st = _state([0, 0, 0.3], [0, 0, -0.3], [0, 0, 0], [0, 0, 0])
    assert order_parameter(st) == pytest.approx(0.6)
    st2 = _state([0.1, 0, 0], [0.1, 0, 0], [0, 0, 0], [0, 0, 0])
    assert order_parameter(st2) == 0.0


def test_stationarity_and_magnitudes(cfg):
    for T, B in ((10.0, (0, 0, 0)), (2.0, (0, 0, 0)), (5.0, (1.0, 0, 0)), (15.0, (0, 0, 3.0))):
        res = solve_equilibrium(cfg, T=T, B_ext=B, tol=1e-12)
        assert res.converged
        r = stationarity_residual(res.state, cfg.with_env(T=max(T, 0.01), B_ext=B))
        assert r["max_cross"] < 1e-8
        assert r["max_dot"] <= 0.0 + 1e-12
        assert r["max_magnitude_error"] < 1e-9


def test_free_energy_branch_ordering(cfg):
    # converged solution beats artificial high-symmetry states
    T = 10.0
    res = solve_equilibrium(cfg, T=T)
    S = cfg.fe.S
    ferro = _state([-1, 0, 0], [-1, 0, 0], [0, 0, -S], [0, 0, -S])
    cfg_T = cfg.with_env(T=T)
    assert res.free_energy < free_energy(ferro, cfg_T, T)
    assert res.free_energy < free_energy(SpinState.zero(), cfg_T, T)


def test_mirror_degeneracy(cfg):
    T = 2.0
    res = solve_equilibrium(cfg, T=T)
    st = res.state
    mirror = _state(st.sigma_A * [1, -1, -1], st.sigma_B * [1, -1, -1],
                    st.S_A * [1, -1, 1], st.S_B * [1, -1, 1])
    cfg_T = cfg.with_env(T=T)
    f1 = free_energy(st, cfg_T, T)
    f2 = free_energy(mirror, cfg_T, T)
    assert abs(f1 - f2) < 1e-10


def test_reported_branch_sign_convention(cfg):
    # the sigma_z(A) >= sigma_z(B) member of the mirror pair is returned
    for T in (0.5, 2.0, 3.5):
        res = solve_equilibrium(cfg, T=T)
        assert res.state.sigma_A[2] >= res.state.sigma_B[2]
        assert res.state.S_A[1] >= 0.0


def test_free_energy_monotone_along_damped_tail(cfg):
    # plain damped iteration (no acceleration), logging F
    T = 6.0
    cfg_T = cfg.with_env(T=T)
    st = _state([-0.3, 0, 0.9], [-0.3, 0, -0.9],
                [0.03, 1.7, -1.7], [0.03, -1.7, 1.7])
    eta = 0.3
    Fs = []
    for _ in range(400):
        upd = thermal_update(compute_mean_fields(st, cfg_T), T, cfg_T)
        arr = st.as_array() + eta * (upd.as_array() - st.as_array())
        st = SpinState.from_array(arr)
        Fs.append(free_energy(st, cfg_T, T))
    tail = np.diff(Fs[50:])
    assert np.all(tail <= 1e-10)


def test_gamma2_symmetry_pattern(cfg):
    # B = 0, T > Tc: converged state has R_y = R_z = S_y = 0
    res = solve_equilibrium(cfg, T=8.0)
    st = res.state
    assert abs(st.sigma_A[1]) < 1e-8 and abs(st.sigma_A[2]) < 1e-8
    assert abs(st.S_A[1]) < 1e-8
    np.testing.assert_allclose(st.sigma_A, st.sigma_B, atol=1e-8)


def test_canting_angle_matches_closed_form(cfg):
    from dataclasses import replace as _r
    cfg_dec = replace(cfg, xc=_r(cfg.xc, J=0.0, D_x=0.0, D_y=0.0), er=_r(cfg.er, J_Er=0.0))
    res = solve_equilibrium(cfg_dec, T=0.01, tol=1e-13)
    st = res.state
    beta = math.atan2(st.S_A[0], -st.S_A[2])
    assert beta == pytest.approx(canting_angle(cfg.fe), abs=1e-10)


def test_nonconvergence_flagged(cfg):
    res = solve_equilibrium(cfg, T=3.0, max_iter=3)
    assert not res.converged


def test_explicit_seed_list(cfg):
    S = cfg.fe.S
    seed = np.stack([np.array([-0.5, 0, 0]), np.array([-0.5, 0, 0]),
                     S * np.array([0.01, 0, -0.999]), S * np.array([0.01, 0, 0.999])])
    res = solve_equilibrium(cfg, seeds=[("custom", seed)], T=10.0)
    assert res.converged and res.branch_tag == "custom"
    assert order_parameter(res.state) < 1e-8


def test_random_seeds_reproducible(cfg):
    r1 = solve_equilibrium(cfg, T=2.0, n_random=4)
    r2 = solve_equilibrium(cfg, T=2.0, n_random=4)
    assert r1.free_energy == r2.free_energy
    np.testing.assert_array_equal(r1.state.as_array(), r2.state.as_array())
