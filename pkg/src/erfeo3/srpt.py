"""Superradiant-phase-transition analysis of the reduced two-coupling model.

The qAFM magnon plays the photon role and the Er3+ spins the two-level
ensemble.  In the thermodynamic limit the magnon trace becomes an integral
over c-number amplitudes alpha = alpha_r + i alpha_i, leaving a per-spin
two-level problem whose field must be found self-consistently together
with the amplitudes:

    h_x = c_x/2 + zEr J_Er <sigma_x> + 2 (h lambda_x) alpha_r     (meV)
    h_z =         - zEr J_Er <sigma_z> + 2 (h lambda_z) alpha_i
    <sigma_xi> = -(h_xi/|h|) tanh(|h|/(k_B T))
    (h omega_pi) alpha_r + (h lambda_x) <sigma_x> = 0
    (h omega_pi) alpha_i + (h lambda_z) <sigma_z> = 0

(c_x is the signed Er alignment coefficient; the Er-Er exchange enters as
a mean field, which reproduces the renormalized couplings
2 lambda_x - zEr J_Er omega_pi / (hbar lambda_x) etc. when lambda != 0
but stays well defined at lambda = 0.)

At zero temperature the same model maps onto bosons through the lowest
Holstein-Primakoff order; a condensate amplitude beta exists iff the three
dimensionless coupling depths

    D_lz = 4 lambda_z^2/(omega_pi omega_Er)
    D_lx = -4 lambda_x^2/(omega_pi omega_Er)
    D_J  = 4 zEr J_Er/(hbar omega_Er)

sum above unity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dicke import ReducedDicke
from .errors import DomainError, ModelValidityError
from .magnon import MagnonBasis
from .model import ModelConfig
from .units import CONSTS

_SOLVE_ETA = 0.3
_SOLVE_TOL = 1e-12
_SOLVE_MAX_ITER = 50_000


@dataclass(frozen=True)
class BaselineDicke:
    """Photon frequency, two-level frequency and coupling of the plain Dicke
    model, all as ordinary frequencies (THz)."""

    omega_ph: float
    omega_ex: float
    lam: float

    def __post_init__(self):
        if min(self.omega_ph, self.omega_ex, self.lam) < 0:
            raise ValueError("baseline Dicke frequencies must be non-negative")


@dataclass(frozen=True)
class SemiclassicalState:
    """Normalized qAFM amplitudes, Er Pauli expectation values, and the
    action value per Er spin (meV)."""

    alpha_r: float
    alpha_i: float
    sigma_x: float
    sigma_z: float
    action: float
    converged: bool = True


@dataclass(frozen=True)
class CouplingDepths:
    D_lambda_z: float
    D_lambda_x: float
    D_J_Er: float

    @property
    def total(self) -> float:
        return self.D_lambda_z + self.D_lambda_x + self.D_J_Er

    @property
    def superradiant(self) -> bool:
        return self.total > 1.0


# ---------------------------------------------------------------------------
# Baseline Dicke model
# ---------------------------------------------------------------------------

def baseline_dicke_equilibrium(m: BaselineDicke, T: float) -> complex:
    """Normalized photon amplitude <a>/sqrt(N) minimizing the thermodynamic
    action; zero in the normal phase, i*|alpha| in the superradiant phase
    (which requires 4 lam^2 > omega_ph omega_ex and low enough T)."""
    if T <= 0:
        raise ValueError("temperature must be positive")
    h = CONSTS.h
    wph, wex, lam = m.omega_ph * h, m.omega_ex * h, m.lam * h  # meV
    if lam == 0.0 or wph == 0.0:
        return 0j
    # Ordered solution: |field| E solves E = (2 lam^2/wph) tanh(E/(kB T)),
    # E > wex/2; the right side is concave so a single bisection suffices.
    kT = CONSTS.k_B * T

    def excess(E):
        return (2.0 * lam * lam / wph) * math.tanh(E / kT) - E

    E_lo = wex / 2.0
    if excess(E_lo) <= 0.0:
        return 0j
    E_hi = 2.0 * lam * lam / wph
    for _ in range(200):
        E_mid = 0.5 * (E_lo + E_hi)
        if excess(E_mid) > 0.0:
            E_lo = E_mid
        else:
            E_hi = E_mid
    E = 0.5 * (E_lo + E_hi)
    alpha_i = math.sqrt(max(E * E - (wex / 2.0) ** 2, 0.0)) / (2.0 * lam)
    return 1j * alpha_i


# ---------------------------------------------------------------------------
# Semiclassical thermal equilibrium of the reduced model
# ---------------------------------------------------------------------------

def _sigma_of_field(hx: float, hz: float, kT: float) -> tuple[float, float]:
    """<sigma_x>, <sigma_z> of the two-level Hamiltonian (hx sigma_x + hz
    sigma_z), fields in meV; closed form of the thermal trace."""
    h = math.hypot(hx, hz)
    if h == 0.0:
        return 0.0, 0.0
    t = math.tanh(h / kT)
    return -t * hx / h, -t * hz / h


def _action(r: ReducedDicke, sx: float, sz: float, ar: float, ai: float, kT: float) -> float:
    """Action per Er spin (meV): magnon energy, Er-Er mean-field correction,
    and -kT ln(2 cosh(E_h/kT)) of the two-level trace."""
    h = CONSTS.h
    Wpi, Lx, Lz, K = r.omegapi * h, r.lambda_x * h, r.lambda_z * h, r.zEr_JEr
    hx = 0.5 * r.c_x + K * sx + 2.0 * Lx * ar
    hz = -K * sz + 2.0 * Lz * ai
    Eh = math.hypot(hx, hz)
    return (Wpi * (ar * ar + ai * ai)
            - 0.5 * K * (sx * sx - sz * sz)
            - Eh - kT * math.log1p(math.exp(-2.0 * Eh / kT)))


def semiclassical_equilibrium(
    r: ReducedDicke,
    T: float,
    *,
    eta: float = _SOLVE_ETA,
    tol: float = _SOLVE_TOL,
    max_iter: int = _SOLVE_MAX_ITER,
) -> SemiclassicalState:
    """Thermal equilibrium (sigma_x, sigma_z, alpha_r, alpha_i) of the
    reduced model by damped iteration from ordered and normal seeds; the
    branch with the lowest action wins, with sigma_z >= 0 reported for the
    degenerate pair."""
    if T <= 0:
        raise ValueError("temperature must be positive")
    h = CONSTS.h
    kT = CONSTS.k_B * T
    Wpi, Lx, Lz, K = r.omegapi * h, r.lambda_x * h, r.lambda_z * h, r.zEr_JEr

    def iterate(sx0, sz0):
        sx, sz = sx0, sz0
        for k in range(max_iter):
            ar = -(Lx / Wpi) * sx
            ai = -(Lz / Wpi) * sz
            hx = 0.5 * r.c_x + K * sx + 2.0 * Lx * ar
            hz = -K * sz + 2.0 * Lz * ai
            nx, nz = _sigma_of_field(hx, hz, kT)
            dx, dz = nx - sx, nz - sz
            sx, sz = sx + eta * dx, sz + eta * dz
            if max(abs(dx), abs(dz)) * eta < tol:
                return sx, sz, True
        return sx, sz, False

    candidates = []
    for sz0 in (0.7, 0.0, -0.7):
        sx, sz, ok = iterate(-0.3, sz0)
        if not ok:
            # bisection fallback on the z component at self-consistent sigma_x
            sx, sz, ok = _bisect_sigma_z(r, kT, eta, tol, max_iter)
        ar = -(Lx / Wpi) * sx
        ai = -(Lz / Wpi) * sz
        candidates.append((_action(r, sx, sz, ar, ai, kT), sx, sz, ar, ai, ok))
    candidates.sort(key=lambda c: (not c[5], c[0], -c[2]))
    act, sx, sz, ar, ai, ok = candidates[0]
    if sz < 0.0:
        sz, ai = -sz, -ai
        act = _action(r, sx, sz, ar, ai, kT)
    return SemiclassicalState(alpha_r=ar, alpha_i=ai, sigma_x=sx, sigma_z=sz,
                              action=act, converged=ok)


def _bisect_sigma_z(r: ReducedDicke, kT: float, eta: float, tol: float, max_iter: int):
    """Root of sz - F(sz) on sz >= 0, where F solves the sigma_x equation at
    fixed sigma_z (inner loop is a strong contraction)."""
    h = CONSTS.h
    Wpi, Lx, Lz, K = r.omegapi * h, r.lambda_x * h, r.lambda_z * h, r.zEr_JEr

    def F(sz):
        sx = -0.3
        for _ in range(2000):
            hx = 0.5 * r.c_x + (K - 2.0 * Lx * Lx / Wpi) * sx
            hz = -(K + 2.0 * Lz * Lz / Wpi) * sz
            nx, _ = _sigma_of_field(hx, hz, kT)
            if abs(nx - sx) < 1e-14:
                sx = nx
                break
            sx = sx + 0.5 * (nx - sx)
        hx = 0.5 * r.c_x + (K - 2.0 * Lx * Lx / Wpi) * sx
        hz = -(K + 2.0 * Lz * Lz / Wpi) * sz
        return sx, _sigma_of_field(hx, hz, kT)[1]

    lo, hi = 0.0, 1.0
    sx_lo, f_lo = F(1e-9)
    if f_lo <= 1e-9:  # normal phase
        sx, _ = F(0.0)
        return sx, 0.0, True
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        sx_m, f_m = F(mid)
        if f_m > mid:
            lo = mid
        else:
            hi = mid
    sz = 0.5 * (lo + hi)
    sx, _ = F(sz)
    return sx, sz, True


# ---------------------------------------------------------------------------
# Fe spin reconstruction from magnon amplitudes
# ---------------------------------------------------------------------------

def fe_spins_from_magnons(
    alpha_r: float, alpha_i: float, cfg: ModelConfig, basis: MagnonBasis
) -> tuple[float, float, float]:
    """Thermal Fe spin components (Sx, Sy, Sz) from the qAFM condensate:
    Sx = <S_x^A> = <S_x^B>, Sy = <S_y^A> = -<S_y^B>, Sz = -<S_z^A> = <S_z^B>.

    Bosonization does not conserve the spin length, so Sz keeps its
    equilibrium value S cos(beta0) up to the small alpha_r correction.
    """
    S = cfg.fe.S
    x = cfg.env.x
    root = math.sqrt(2.0 * x * S)
    cb, sb = math.cos(basis.beta0), math.sin(basis.beta0)
    tpi, ypi = basis.t_scale_pi, basis.y_scale_pi
    s_x = S * sb + root * cb * tpi * alpha_r
    s_y = -root * ypi * alpha_i
    s_z = S * cb - root * sb * tpi * alpha_r
    return s_x, s_y, s_z


# ---------------------------------------------------------------------------
# Zero-temperature Holstein-Primakoff condensate and coupling depths
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HPGroundState:
    beta: float
    alpha_r: float
    alpha_i: float
    energy: float   # classical energy per Er spin (meV), constant offset dropped


def hp_ground_state(r: ReducedDicke) -> HPGroundState:
    """T = 0 condensate amplitudes of the bosonized reduced model.

    beta = 0 is always stationary; the symmetry-broken root
    beta^2 = (A - hbar omega_Er)/(2A) with A = 4(L_z^2 - L_x^2)/(hbar
    omega_pi) + 4 zEr J_Er exists iff the coupling depths sum above one.
    The sigma_z >= 0 member of the degenerate pair is reported, i.e.
    beta <= 0 (sigma_z = -2 beta sqrt(1 - beta^2)).
    """
    h = CONSTS.h
    Wpi, Lx, Lz, K = r.omegapi * h, r.lambda_x * h, r.lambda_z * h, r.zEr_JEr
    W = abs(r.c_x)

    def energy(beta):
        ar = -(Lx / Wpi) * (2.0 * beta * beta - 1.0)
        ai = (2.0 * Lz / Wpi) * beta * math.sqrt(max(1.0 - beta * beta, 0.0))
        b2 = beta * beta
        return (Wpi * (ar * ar + ai * ai) + W * b2 + 4.0 * K * b2 * (b2 - 1.0)
                + 2.0 * Lx * ar * (2.0 * b2 - 1.0)
                - 4.0 * Lz * ai * beta * math.sqrt(max(1.0 - b2, 0.0))), ar, ai

    roots = [0.0]
    A = 4.0 * (Lz * Lz - Lx * Lx) / Wpi + 4.0 * K
    if A > 0.0 and A > W:
        b2 = (A - W) / (2.0 * A)
        if not 0.0 <= b2 < 1.0:
            raise ModelValidityError(
                f"condensate amplitude beta^2 = {b2:.6g} outside the bosonization domain"
            )
        roots.append(-math.sqrt(b2))  # beta <= 0 branch carries sigma_z >= 0
    best = min(roots, key=lambda b: energy(b)[0])
    e, ar, ai = energy(best)
    return HPGroundState(beta=best, alpha_r=ar, alpha_i=ai, energy=e)


def coupling_depths(r: ReducedDicke) -> CouplingDepths:
    """Dimensionless contributions to the T = 0 ordering criterion; the
    transition exists iff they sum above unity."""
    h = CONSTS.h
    Wpi, Lx, Lz, K = r.omegapi * h, r.lambda_x * h, r.lambda_z * h, r.zEr_JEr
    W = r.omegaEr * h
    if W == 0.0:
        raise DomainError("omega_Er = 0: coupling depths diverge at the level crossing")
    return CouplingDepths(
        D_lambda_z=4.0 * Lz * Lz / (Wpi * W),
        D_lambda_x=-4.0 * Lx * Lx / (Wpi * W),
        D_J_Er=4.0 * K / W,
    )
