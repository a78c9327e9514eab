"""Self-consistent thermal equilibrium of the four sublattice spins.

Each Er3+ spin (Pauli vector sigma^s) and Fe3+ spin (length S = 5/2) sees a
mean field built from the thermal averages of every spin it couples to plus
the external field.  Writing h = g_f mu_B B^MF for the fields in energy
units (meV), the self-consistency conditions are

    sigma^s = -tanh(|h_Er^s| / (2 k_B T)) * h_Er^s/|h_Er^s|
    S^s     = -S B_S(S |h_Fe^s| / (k_B T)) * h_Fe^s/|h_Fe^s|

with B_S the Brillouin function.  The Er-Fe contribution to the b-axis
component of the Er field is pinned to zero (the Er y components are held
by a stronger local potential and do not respond to the Er-Fe exchange).

The solver is a damped fixed-point iteration run from several seed
configurations at once; among converged candidates the one with the lowest
variational free energy wins.  Everything is vectorized over an arbitrary
leading batch shape so that sweeps and phase diagrams iterate whole grids
simultaneously.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .magnon import canting_angle
from .model import ModelConfig, build_coupling_vectors, build_j_matrix
from .units import CONSTS

T_MIN = 0.01          # K; requests below are clamped (saturation regime)
DEFAULT_ETA = 0.3     # damping of the fixed-point update
DEFAULT_TOL = 1e-10   # max spin-component change declaring convergence
DEFAULT_MAX_ITER = 50_000
_F_TIE = 1e-10        # meV window inside which branches count as degenerate
_RNG_STREAM = 20_210_614  # fixed stream for optional random seeds


# ---------------------------------------------------------------------------
# Data types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SpinState:
    """Thermal-average sublattice spins: Er Pauli vectors (dimensionless,
    |sigma| <= 1) and Fe spin vectors (|S| <= 5/2)."""

    sigma_A: np.ndarray
    sigma_B: np.ndarray
    S_A: np.ndarray
    S_B: np.ndarray

    def as_array(self) -> np.ndarray:
        return np.stack([self.sigma_A, self.sigma_B, self.S_A, self.S_B])

    @classmethod
    def from_array(cls, arr: np.ndarray) -> "SpinState":
        arr = np.asarray(arr, dtype=float)
        return cls(arr[0].copy(), arr[1].copy(), arr[2].copy(), arr[3].copy())

    @classmethod
    def zero(cls) -> "SpinState":
        return cls.from_array(np.zeros((4, 3)))


@dataclass(frozen=True)
class MeanFields:
    """Mean fields in energy units, h = g_f mu_B B^MF (meV)."""

    h_Er_A: np.ndarray
    h_Er_B: np.ndarray
    h_Fe_A: np.ndarray
    h_Fe_B: np.ndarray

    def as_array(self) -> np.ndarray:
        return np.stack([self.h_Er_A, self.h_Er_B, self.h_Fe_A, self.h_Fe_B])


@dataclass(frozen=True)
class EquilibriumResult:
    state: SpinState
    free_energy: float
    iterations: int
    converged: bool
    branch_tag: str


# ---------------------------------------------------------------------------
# Precomputed coupling context
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class _MFContext:
    S: float
    x: float
    zErJEr: float                      # 6x * J_Er (meV)
    g_Er: np.ndarray
    g_Fe: np.ndarray
    J: dict                            # J matrix per sublattice pair
    D: dict                            # D vectors per sublattice pair
    zJ: float                          # z * J_Fe
    zD: float                          # z * D_Fe_y
    A_x: float
    A_z: float
    A_xz: float


def _context(cfg: ModelConfig) -> _MFContext:
    return _MFContext(
        S=cfg.fe.S,
        x=cfg.env.x,
        zErJEr=cfg.env.z_Er * cfg.er.J_Er,
        g_Er=np.asarray(cfg.er.g_Er, dtype=float),
        g_Fe=np.asarray(cfg.fe.g_Fe, dtype=float),
        J=build_j_matrix(cfg.xc),
        D=build_coupling_vectors(cfg.xc),
        zJ=cfg.fe.z * cfg.fe.J_Fe,
        zD=cfg.fe.z * cfg.fe.D_Fe_y,
        A_x=cfg.fe.A_x,
        A_z=cfg.fe.A_z,
        A_xz=cfg.fe.A_xz,
    )


# ---------------------------------------------------------------------------
# Mean fields, Brillouin function, thermal update (array kernels)
# ---------------------------------------------------------------------------

def _mean_fields_array(state: np.ndarray, ctx: _MFContext, B: np.ndarray) -> np.ndarray:
    """Fields (..., 4, 3) in meV for states (..., 4, 3) and DC field B (..., 3)."""
    sA, sB = state[..., 0, :], state[..., 1, :]
    SA, SB = state[..., 2, :], state[..., 3, :]
    J, D = ctx.J, ctx.D
    mu = CONSTS.mu_B

    zee_er = mu * ctx.g_Er * B
    zee_fe = mu * ctx.g_Fe * B

    erfe_A = (J["AA"] * SA + J["AB"] * SB
              - np.cross(D["AA"], SA) - np.cross(D["AB"], SB))
    erfe_B = (J["BA"] * SA + J["BB"] * SB
              - np.cross(D["BA"], SA) - np.cross(D["BB"], SB))
    # Er y components do not feel the Er-Fe exchange
    erfe_A[..., 1] = 0.0
    erfe_B[..., 1] = 0.0
    h_er_A = zee_er + 2.0 * ctx.zErJEr * sB + 2.0 * erfe_A
    h_er_B = zee_er + 2.0 * ctx.zErJEr * sA + 2.0 * erfe_B

    fe_er_A = ctx.x * (J["AA"] * sA + J["BA"] * sB
                       + np.cross(D["AA"], sA) + np.cross(D["BA"], sB))
    fe_er_B = ctx.x * (J["AB"] * sA + J["BB"] * sB
                       + np.cross(D["AB"], sA) + np.cross(D["BB"], sB))
    zJ, zD = ctx.zJ, ctx.zD
    fefe_A = np.stack(
        [
            zJ * SB[..., 0] + zD * SB[..., 2] - 2 * ctx.A_x * SA[..., 0] - ctx.A_xz * SA[..., 2],
            zJ * SB[..., 1],
            zJ * SB[..., 2] - zD * SB[..., 0] - 2 * ctx.A_z * SA[..., 2] - ctx.A_xz * SA[..., 0],
        ],
        axis=-1,
    )
    fefe_B = np.stack(
        [
            zJ * SA[..., 0] - zD * SA[..., 2] - 2 * ctx.A_x * SB[..., 0] + ctx.A_xz * SB[..., 2],
            zJ * SA[..., 1],
            zJ * SA[..., 2] + zD * SA[..., 0] - 2 * ctx.A_z * SB[..., 2] + ctx.A_xz * SB[..., 0],
        ],
        axis=-1,
    )
    h_fe_A = zee_fe + fe_er_A + fefe_A
    h_fe_B = zee_fe + fe_er_B + fefe_B
    return np.stack([h_er_A, h_er_B, h_fe_A, h_fe_B], axis=-2)


def brillouin(Jq: float, z) -> np.ndarray | float:
    """Brillouin function B_J(z); odd in z, |B_J| < 1, slope (J+1)/(3J) at 0.

    A short series is used below |z| = 1e-3 where the two coth terms cancel
    catastrophically.
    """
    if Jq <= 0:
        raise ValueError("Brillouin index must be positive")
    z = np.asarray(z, dtype=float)
    a = (2 * Jq + 1) / (2 * Jq)
    b = 1.0 / (2 * Jq)
    small = np.abs(z) < 1e-3
    zs = np.where(small, 1.0, z)
    direct = a / np.tanh(a * zs) - b / np.tanh(b * zs)
    series = (a * a - b * b) / 3.0 * z - (a**4 - b**4) / 45.0 * z**3
    out = np.where(small, series, direct)
    return out if out.shape else float(out)


def _thermal_update_array(fields: np.ndarray, T, ctx: _MFContext) -> np.ndarray:
    """Map mean fields (..., 4, 3) to updated spins; T broadcasts over (...)."""
    T = np.asarray(T, dtype=float)
    mag = np.linalg.norm(fields, axis=-1)                      # (..., 4)
    safe_mag = np.where(mag > 0.0, mag, 1.0)
    unit = fields / safe_mag[..., None]

    pos = T > 0.0
    safe_T = np.where(pos, T, 1.0)
    y = mag[..., 0:2] / (2.0 * CONSTS.k_B * safe_T[..., None])
    chi = mag[..., 2:4] / (CONSTS.k_B * safe_T[..., None])
    amp_er = np.where(pos[..., None], np.tanh(y), 1.0)
    amp_fe = ctx.S * np.where(pos[..., None], brillouin(ctx.S, ctx.S * chi), 1.0)

    amp = np.concatenate([amp_er, amp_fe], axis=-1)
    amp = np.where(mag > 0.0, amp, 0.0)
    return -amp[..., None] * unit


# ---------------------------------------------------------------------------
# Variational free energy
# ---------------------------------------------------------------------------

def _log_2cosh(y: np.ndarray) -> np.ndarray:
    ay = np.abs(y)
    return ay + np.log1p(np.exp(-2.0 * ay))


def _log_z_fe(chi: np.ndarray, S: float) -> np.ndarray:
    """log of sinh((S+1/2)chi)/sinh(chi/2), stable for all chi >= 0."""
    c = np.maximum(chi, 1e-12)
    val = S * c + np.log1p(-np.exp(-(2 * S + 1) * c)) - np.log1p(-np.exp(-c))
    return np.where(chi > 1e-12, val, math.log(2 * S + 1))


def _free_energy_array(state: np.ndarray, ctx: _MFContext, T, B: np.ndarray) -> np.ndarray:
    """Variational free energy per unit cell (meV): interaction energy at the
    mean values (each pair counted once) minus T times the single-site
    entropies of the converged local partition functions."""
    sA, sB = state[..., 0, :], state[..., 1, :]
    SA, SB = state[..., 2, :], state[..., 3, :]
    J, D = ctx.J, ctx.D
    mu = CONSTS.mu_B
    x = ctx.x

    def dot(u, v):
        return np.sum(u * v, axis=-1)

    e_zee = 0.5 * x * mu * (dot(sA, ctx.g_Er * B) + dot(sB, ctx.g_Er * B))
    e_zee = e_zee + mu * (dot(SA, ctx.g_Fe * B) + dot(SB, ctx.g_Fe * B))
    e_fefe = ctx.zJ * dot(SA, SB) - ctx.zD * (SA[..., 2] * SB[..., 0] - SB[..., 2] * SA[..., 0])
    e_aniso = -(ctx.A_x * (SA[..., 0] ** 2 + SB[..., 0] ** 2)
                + ctx.A_z * (SA[..., 2] ** 2 + SB[..., 2] ** 2)
                + ctx.A_xz * (SA[..., 0] * SA[..., 2] - SB[..., 0] * SB[..., 2]))
    e_erer = x * ctx.zErJEr * dot(sA, sB)
    e_erfe = x * (
        J["AA"] * dot(sA, SA) + J["AB"] * dot(sA, SB)
        + J["BA"] * dot(sB, SA) + J["BB"] * dot(sB, SB)
        + dot(np.cross(sA, SA), D["AA"])
        + dot(np.cross(sA, SB), D["AB"])
        + dot(np.cross(sB, SA), D["BA"])
        + dot(np.cross(sB, SB), D["BB"])
    )
    energy = e_zee + e_fefe + e_aniso + e_erer + e_erfe

    T = np.asarray(T, dtype=float)
    if np.all(T <= 0.0):
        return energy

    fields = _mean_fields_array(state, ctx, B)
    mag = np.linalg.norm(fields, axis=-1)
    safe_T = np.where(T > 0.0, T, 1.0)
    y = mag[..., 0:2] / (2.0 * CONSTS.k_B * safe_T[..., None])
    chi = mag[..., 2:4] / (CONSTS.k_B * safe_T[..., None])
    s_er = CONSTS.k_B * (_log_2cosh(y) - y * np.tanh(y))
    bval = brillouin(ctx.S, ctx.S * chi)
    s_fe = CONSTS.k_B * (_log_z_fe(chi, ctx.S) - chi * ctx.S * bval)
    entropy = x * np.sum(s_er, axis=-1) + np.sum(s_fe, axis=-1)
    return energy - np.where(T > 0.0, T, 0.0) * entropy


# ---------------------------------------------------------------------------
# Batched damped fixed-point iteration
# ---------------------------------------------------------------------------

_ANDERSON_DEPTH = 5


def _iterate_batch(
    ctx: _MFContext,
    T: np.ndarray,
    B: np.ndarray,
    states: np.ndarray,
    eta: float = DEFAULT_ETA,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    accelerate: bool = True,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Damped iteration of M independent problems, Anderson-accelerated.

    states: (M, 4, 3); T: (M,); B: (M, 3).  Returns (final states,
    converged mask, iteration counts).  Converged rows stop updating.

    The plain damped map new = old + eta (g(old) - old) contracts the
    collective Fe-rotation mode only at a rate 1 - O(anisotropy/exchange)
    ~ 1 - 3e-4 and would need ~1e5 steps; a short-memory Anderson update
    built on the same residual g(x) - x removes the slow modes without
    changing the fixed points.  Convergence is declared when the damped
    step eta |g(x) - x| falls below ``tol`` componentwise.
    """
    M = states.shape[0]
    n = 12
    m = _ANDERSON_DEPTH if accelerate else 0
    st = np.array(states, dtype=float).reshape(M, n)
    conv = np.zeros(M, dtype=bool)
    iters = np.full(M, max_iter, dtype=np.int64)
    active = np.arange(M)
    prev_x = np.zeros((M, n))
    prev_r = np.zeros((M, n))
    dX = np.zeros((m, M, n)) if m else None
    dR = np.zeros((m, M, n)) if m else None
    limit = np.repeat([1.0, 1.0, ctx.S, ctx.S], 3) * 1.5  # loose physical clamp
    hist = 0

    for k in range(max_iter):
        x = st[active]
        g = _thermal_update_array(
            _mean_fields_array(x.reshape(-1, 4, 3), ctx, B[active]), T[active], ctx
        ).reshape(-1, n)
        r = g - x
        delta = eta * np.max(np.abs(r), axis=1)

        if m and k > 0:
            slot = (k - 1) % m
            dX[slot, active] = x - prev_x[active]
            dR[slot, active] = r - prev_r[active]
            hist = min(k, m)
        prev_x[active] = x
        prev_r[active] = r

        if hist:
            F = dR[:hist, active]                      # (h, a, n)
            A = np.einsum("hai,gai->ahg", F, F)        # (a, h, h)
            b = np.einsum("hai,ai->ah", F, r)
            trace = np.trace(A, axis1=1, axis2=2)
            A = A + (1e-12 * trace[:, None, None] + 1e-30) * np.eye(hist)
            try:
                gamma = np.linalg.solve(A, b[..., None])[..., 0]   # (a, h)
            except np.linalg.LinAlgError:
                gamma = np.zeros_like(b)
            gamma = np.clip(gamma, -1e6, 1e6)
            corr = np.einsum("ah,hai->ai", gamma, dX[:hist, active] + eta * dR[:hist, active])
            new = x + eta * r - corr
            bad = ~np.all(np.isfinite(new), axis=1)
            if np.any(bad):
                new[bad] = x[bad] + eta * r[bad]
            np.clip(new, -limit, limit, out=new)
        else:
            new = x + eta * r
        st[active] = new

        done = delta < tol
        if np.any(done):
            hit = active[done]
            conv[hit] = True
            iters[hit] = k + 1
            active = active[~done]
            if active.size == 0:
                break
    return st.reshape(M, 4, 3), conv, iters


def canonical_seeds(cfg: ModelConfig) -> list[tuple[str, np.ndarray]]:
    """Seed states covering the competing phases.

    gamma2: canted Fe antiferromagnet along c, paramagnetic Er along -a.
    gamma12 (+/-): Er ordered along +-c with the Fe vector rotated in the
    bc plane (the two mirror branches).
    field_aligned: all spins against the DC field (generic tilted state at
    zero field).
    gamma4 (+/-): Fe antiferromagnet along +-a with c canting, reached at a
    strong c-axis field.
    """
    S = cfg.fe.S
    beta0 = canting_angle(cfg.fe)
    sb, cb = math.sin(beta0), math.cos(beta0)
    B = np.asarray(cfg.env.B_ext, dtype=float)

    def unit(v):
        v = np.asarray(v, dtype=float)
        return v / np.linalg.norm(v)

    seeds: list[tuple[str, np.ndarray]] = []
    fe_g2 = [S * np.array([sb, 0.0, -cb]), S * np.array([sb, 0.0, cb])]
    seeds.append(("gamma2", np.stack([
        np.array([-0.5, 0.0, 0.0]), np.array([-0.5, 0.0, 0.0]), fe_g2[0], fe_g2[1]
    ])))
    for sign, tag in ((1.0, "gamma12+"), (-1.0, "gamma12-")):
        seeds.append((tag, np.stack([
            np.array([-0.3, 0.0, 0.9 * sign]),
            np.array([-0.3, 0.0, -0.9 * sign]),
            S * unit([sb, 0.7 * sign, -0.7]),
            S * unit([sb, -0.7 * sign, 0.7]),
        ])))
    if np.linalg.norm(B) > 0.0:
        u = unit(B)
        seeds.append(("field_aligned", np.stack([-u, -u, -S * u, -S * u])))
    else:
        seeds.append(("field_aligned", np.stack([
            np.array([-0.4, 0.2, 0.6]),
            np.array([-0.4, -0.2, -0.6]),
            S * unit([0.3, 0.5, -0.8]),
            S * unit([0.3, -0.5, 0.8]),
        ])))
    cant = -0.1 if B[2] >= 0.0 else 0.1
    for sign, tag in ((1.0, "gamma4+"), (-1.0, "gamma4-")):
        seeds.append((tag, np.stack([
            np.array([0.0, 0.0, cant]),
            np.array([0.0, 0.0, cant]),
            S * unit([-sign, 0.0, cant]),
            S * unit([sign, 0.0, cant]),
        ])))
    return seeds


def random_seeds(cfg: ModelConfig, n: int, stream: int = _RNG_STREAM) -> list[tuple[str, np.ndarray]]:
    """Unit-magnitude random seeds from a fixed RNG stream."""
    rng = np.random.default_rng(stream)
    S = cfg.fe.S
    out = []
    for i in range(n):
        v = rng.normal(size=(4, 3))
        v /= np.linalg.norm(v, axis=1, keepdims=True)
        v[2:] *= S
        out.append((f"random{i}", v))
    return out


_DOMAIN_TOL = 1e-3


def _select_branch(
    states: np.ndarray, conv: np.ndarray, F: np.ndarray
) -> int:
    """Winner among candidate branches: converged, in the +a Fe domain,
    lowest F; ties broken toward sigma_z(A) - sigma_z(B) > 0, then S_y(A) > 0.

    The model has an exact degeneracy that exchanges the two weak-moment
    Fe domains while flipping B_x; the physical field sweep stays in the
    domain selected at zero field, so branches whose Fe canting has flipped
    to -a are rejected whenever an unflipped converged branch exists.
    """
    weak_x = states[:, 2, 0] + states[:, 3, 0]
    eligible = conv & (weak_x > -_DOMAIN_TOL)
    if not np.any(eligible):
        eligible = conv
    if not np.any(eligible):
        return int(np.argmin(F))
    order = np.where(eligible, F, np.inf)
    best = float(np.min(order))
    cand = np.flatnonzero(eligible & (F <= best + _F_TIE))
    dz = states[cand, 0, 2] - states[cand, 1, 2]
    sy = states[cand, 2, 1]
    # max (dz, then sy); lexsort orders ascending by its last key first
    return int(cand[np.lexsort((-sy, -dz))[0]])


def _mirror_state(state: np.ndarray) -> np.ndarray:
    """Degeneracy partner at B_y = B_z = 0: negate sigma_y, sigma_z and S_y."""
    out = state.copy()
    out[0:2, 1:3] *= -1.0
    out[2:4, 1] *= -1.0
    return out


def _canonicalize(state: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Fix the reported branch of the B_y = B_z = 0 mirror pair to
    sigma_z(A) >= sigma_z(B)."""
    if B[1] == 0.0 and B[2] == 0.0 and state[0, 2] - state[1, 2] < 0.0:
        return _mirror_state(state)
    return state


# ---------------------------------------------------------------------------
# Public single-point API
# ---------------------------------------------------------------------------

def compute_mean_fields(state: SpinState, cfg: ModelConfig) -> MeanFields:
    """Mean fields h = g_f mu_B B^MF (meV) for one spin state."""
    ctx = _context(cfg)
    arr = _mean_fields_array(state.as_array(), ctx, np.asarray(cfg.env.B_ext, dtype=float))
    return MeanFields(h_Er_A=arr[0], h_Er_B=arr[1], h_Fe_A=arr[2], h_Fe_B=arr[3])


def thermal_update(fields: MeanFields, T: float, cfg: ModelConfig) -> SpinState:
    """Spins aligned against their mean fields with thermal magnitudes;
    T = 0 is the saturation limit."""
    ctx = _context(cfg)
    arr = _thermal_update_array(fields.as_array(), float(T), ctx)
    return SpinState.from_array(arr)


def free_energy(state: SpinState, cfg: ModelConfig, T: float | None = None) -> float:
    """Variational mean-field free energy per unit cell (meV)."""
    if T is None:
        T = cfg.env.T
    ctx = _context(cfg)
    return float(_free_energy_array(state.as_array(), ctx, float(T),
                                    np.asarray(cfg.env.B_ext, dtype=float)))


def order_parameter(state: SpinState) -> float:
    """|sigma_z(A) - sigma_z(B)|, the Er antiferromagnetic moment along c."""
    return float(abs(state.sigma_A[2] - state.sigma_B[2]))


def rotation_angle_deg(state: SpinState) -> float:
    """Rotation angle of the Fe AFM vector from the c axis in the bc plane,
    phi = arctan(S_y / S_z) in degrees (0 in the high-temperature phase)."""
    s_y = 0.5 * (state.S_A[1] - state.S_B[1])
    s_z = 0.5 * (state.S_B[2] - state.S_A[2])
    return math.degrees(math.atan2(s_y, s_z))


def solve_equilibrium(
    cfg: ModelConfig,
    seeds: list[tuple[str, np.ndarray]] | None = None,
    *,
    T: float | None = None,
    B_ext=None,
    n_random: int = 0,
    eta: float = DEFAULT_ETA,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> EquilibriumResult:
    """Damped self-consistent solve from several seeds; the converged branch
    with minimal variational free energy wins.  Non-convergence of every
    seed is reported through ``converged=False``, not an exception."""
    if T is None:
        T = cfg.env.T
    if B_ext is None:
        B_ext = cfg.env.B_ext
    T = max(float(T), T_MIN)
    cfg_pt = cfg.with_env(T=T, B_ext=tuple(np.asarray(B_ext, dtype=float)))
    ctx = _context(cfg_pt)
    if seeds is None:
        seeds = canonical_seeds(cfg_pt)
        if n_random:
            seeds = seeds + random_seeds(cfg_pt, n_random)
    tags = [t for t, _ in seeds]
    st0 = np.stack([s for _, s in seeds])
    M = st0.shape[0]
    Tv = np.full(M, T)
    Bv = np.broadcast_to(np.asarray(cfg_pt.env.B_ext, dtype=float), (M, 3)).copy()

    st, conv, iters = _iterate_batch(ctx, Tv, Bv, st0, eta=eta, tol=tol, max_iter=max_iter)
    F = _free_energy_array(st, ctx, Tv, Bv)
    win = _select_branch(st, conv, F)
    return EquilibriumResult(
        state=SpinState.from_array(_canonicalize(st[win], Bv[win])),
        free_energy=float(F[win]),
        iterations=int(iters[win]),
        converged=bool(conv[win]),
        branch_tag=tags[win],
    )


def solve_points(
    cfg: ModelConfig,
    T: np.ndarray,
    B: np.ndarray,
    warm: np.ndarray | None = None,
    *,
    n_random: int = 0,
    eta: float = DEFAULT_ETA,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> dict:
    """Solve P independent (T, B) points in one batch.

    T: (P,); B: (P, 3); warm: optional (P, 4, 3) extra seed per point
    (usually the neighboring solution of a sweep).  Returns a dict of
    arrays: states (P, 4, 3), free_energy, order_param, converged, tag.
    """
    T = np.maximum(np.asarray(T, dtype=float), T_MIN)
    B = np.asarray(B, dtype=float)
    P = T.shape[0]
    ctx = _context(cfg)
    seed_list = canonical_seeds(cfg) + (random_seeds(cfg, n_random) if n_random else [])
    tags = [t for t, _ in seed_list]
    seed_arr = np.stack([s for _, s in seed_list])           # (S, 4, 3)
    if warm is not None:
        tags = ["warm"] + tags
        seed_arr = np.concatenate([np.zeros((1, 4, 3)), seed_arr])
    Sn = seed_arr.shape[0]

    states = np.broadcast_to(seed_arr, (P, Sn, 4, 3)).copy()
    if warm is not None:
        states[:, 0] = warm
    Tv = np.repeat(T, Sn)
    Bv = np.repeat(B, Sn, axis=0)
    flat = states.reshape(P * Sn, 4, 3)

    st, conv, iters = _iterate_batch(ctx, Tv, Bv, flat, eta=eta, tol=tol, max_iter=max_iter)
    F = _free_energy_array(st, ctx, Tv, Bv)
    st = st.reshape(P, Sn, 4, 3)
    conv = conv.reshape(P, Sn)
    iters = iters.reshape(P, Sn)
    F = F.reshape(P, Sn)

    out_states = np.empty((P, 4, 3))
    out_F = np.empty(P)
    out_conv = np.empty(P, dtype=bool)
    out_iters = np.empty(P, dtype=np.int64)
    out_tag = []
    for p in range(P):
        win = _select_branch(st[p], conv[p], F[p])
        out_states[p] = _canonicalize(st[p, win], B[p])
        out_F[p] = F[p, win]
        out_conv[p] = conv[p, win]
        out_iters[p] = iters[p, win]
        out_tag.append(tags[win])
    op = np.abs(out_states[:, 0, 2] - out_states[:, 1, 2])
    return {
        "states": out_states,
        "free_energy": out_F,
        "order_param": op,
        "converged": out_conv,
        "iterations": out_iters,
        "tag": out_tag,
    }


def stationarity_residual(state: SpinState, cfg: ModelConfig, T: float | None = None) -> dict:
    """Diagnostics of the self-consistency conditions at a state.

    Returns max |spin x field| (meV), max dot(spin, field) sign violation,
    and the worst magnitude mismatch |spin| vs tanh / S B_S.
    """
    if T is None:
        T = cfg.env.T
    T = max(float(T), T_MIN)
    ctx = _context(cfg)
    arr = state.as_array()
    fields = _mean_fields_array(arr, ctx, np.asarray(cfg.env.B_ext, dtype=float))
    cross = np.linalg.norm(np.cross(arr, fields), axis=-1)
    dots = np.sum(arr * fields, axis=-1)
    mag = np.linalg.norm(fields, axis=-1)
    y = mag[0:2] / (2.0 * CONSTS.k_B * T)
    chi = mag[2:4] / (CONSTS.k_B * T)
    target = np.concatenate([np.tanh(y), ctx.S * np.asarray(brillouin(ctx.S, ctx.S * chi))])
    spin_mag = np.linalg.norm(arr, axis=-1)
    return {
        "max_cross": float(np.max(cross)),
        "max_dot": float(np.max(dots)),
        "max_magnitude_error": float(np.max(np.abs(spin_mag - target))),
    }
