"""Quantization of the Fe3+ subsystem about its canted ground state.

The canted antiferromagnetic ground state of the Fe spins is

    S_A0 = S (sin beta0, 0, -cos beta0),   S_B0 = S (sin beta0, 0, +cos beta0),

and small fluctuations about it form two homogeneous magnon modes: the
quasi-ferromagnetic (qFM) mode at internal wavenumber K = 0 and the
quasi-antiferromagnetic (qAFM) mode at K = pi, with frequencies

    omega_K = gamma * sqrt((b cos K - a)(d cos K + c)),

where a, b, c, d are effective fields (tesla) built from the Fe exchange
and anisotropy constants and gamma is the free-electron gyromagnetic
ratio.  The quadrature operators of mode K carry the scale factors
((b cos K - a)/(d cos K + c))^(1/4) that enter every Er-magnon coupling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateParameterError, InstabilityError
from .model import FE_SPIN, FeParams
from .units import CONSTS, PhysConsts

_TWO_PI = 2.0 * math.pi


def canting_angle(fe: FeParams) -> float:
    """Equilibrium canting angle beta0 (rad) of the Fe spins toward the a axis.

    beta0 = -(1/2) arctan[(A_xz + z D_Fe_y) / (z J_Fe - A_x + A_z)]; this is
    also the exact stationary angle of the classical Fe energy.
    """
    num = fe.A_xz + fe.z * fe.D_Fe_y
    den = fe.z * fe.J_Fe - fe.A_x + fe.A_z
    if den == 0.0:
        raise DegenerateParameterError("z*J_Fe - A_x + A_z vanishes; canting angle undefined")
    return -0.5 * math.atan(num / den)


def abcd(fe: FeParams, beta0: float, consts: PhysConsts = CONSTS) -> tuple[float, float, float, float]:
    """Effective-field coefficients (a, b, c, d) in tesla for the linearized
    Fe spin dynamics about the canted state."""
    pref = fe.S / (consts.g_f * consts.mu_B)
    c2, s2 = math.cos(2 * beta0), math.sin(2 * beta0)
    zJ = fe.z * fe.J_Fe
    zD = fe.z * fe.D_Fe_y
    a = pref * (-fe.A_z - fe.A_x - (zJ + fe.A_z - fe.A_x) * c2 + (fe.A_xz + zD) * s2)
    b = pref * zJ
    c = pref * ((zJ + 2 * fe.A_z - 2 * fe.A_x) * c2 + zD * s2)
    d = pref * (-zJ * c2 - (2 * fe.A_xz + zD) * s2)
    return a, b, c, d


def _radicands(a: float, b: float, c: float, d: float, K: float) -> tuple[float, float]:
    cK = math.cos(K)
    return b * cK - a, d * cK + c


def magnon_frequencies(
    a: float, b: float, c: float, d: float, consts: PhysConsts = CONSTS
) -> tuple[float, float]:
    """Angular frequencies (omega_0, omega_pi) in rad/ps of the qFM and qAFM modes.

    Raises InstabilityError if either radicand product is negative, which
    signals parameters outside the stable canted-antiferromagnet regime.
    """
    out = []
    for K in (0.0, math.pi):
        r1, r2 = _radicands(a, b, c, d, K)
        prod = r1 * r2
        if prod < 0.0:
            raise InstabilityError(
                f"negative radicand at K={K:.3f}: ({r1:.6g})*({r2:.6g}) < 0"
            )
        out.append(consts.gamma * math.sqrt(prod))
    return out[0], out[1]


def quadrature_scale(a: float, b: float, c: float, d: float, K: float) -> float:
    """Scale factor ((b cos K - a)/(d cos K + c))^(1/4) of the T quadrature of
    mode K; the Y quadrature carries its reciprocal."""
    r1, r2 = _radicands(a, b, c, d, K)
    ratio = r1 / r2
    if ratio <= 0.0:
        raise InstabilityError(f"quadrature scale undefined at K={K:.3f} (ratio {ratio:.6g})")
    return ratio ** 0.25


@dataclass(frozen=True)
class MagnonBasis:
    """Canting angle, (a, b, c, d) coefficients (T), mode frequencies (rad/ps)
    and quadrature scale factors for K = 0 and K = pi."""

    beta0: float
    a: float
    b: float
    c: float
    d: float
    omega0: float
    omegapi: float
    t_scale_0: float
    t_scale_pi: float

    @property
    def nu0(self) -> float:
        """qFM frequency as an ordinary frequency (THz)."""
        return self.omega0 / _TWO_PI

    @property
    def nupi(self) -> float:
        """qAFM frequency as an ordinary frequency (THz)."""
        return self.omegapi / _TWO_PI

    @property
    def y_scale_0(self) -> float:
        return 1.0 / self.t_scale_0

    @property
    def y_scale_pi(self) -> float:
        return 1.0 / self.t_scale_pi


def magnon_basis(fe: FeParams, consts: PhysConsts = CONSTS) -> MagnonBasis:
    beta0 = canting_angle(fe)
    a, b, c, d = abcd(fe, beta0, consts)
    w0, wpi = magnon_frequencies(a, b, c, d, consts)
    return MagnonBasis(
        beta0=beta0,
        a=a,
        b=b,
        c=c,
        d=d,
        omega0=w0,
        omegapi=wpi,
        t_scale_0=quadrature_scale(a, b, c, d, 0.0),
        t_scale_pi=quadrature_scale(a, b, c, d, math.pi),
    )


def evolution_matrix(a: float, b: float, c: float, d: float, K: float,
                     consts: PhysConsts = CONSTS) -> np.ndarray:
    """2x2 evolution matrix of the (T, Y) quadratures of the mode at
    wavenumber K: d/dt (T, Y) = gamma [[0, b cosK - a], [-(d cosK + c), 0]] (T, Y).

    Its eigenvalues are +-i omega_K; used as an independent check of the
    closed-form frequencies.
    """
    r1, r2 = _radicands(a, b, c, d, K)
    return consts.gamma * np.array([[0.0, r1], [-r2, 0.0]])


def quadratures_from_amplitudes(
    basis: MagnonBasis, x: float, alpha0: complex = 0j, alphapi: complex = 0j
) -> tuple[float, float, float, float]:
    """Per-site quadrature c-numbers (t0, y0, tpi, ypi) from normalized magnon
    amplitudes alpha_K = <a_K>/sqrt(N).

    For a condensate alpha_K the collective quadratures are
    T_K = scale_K * sqrt(2N) Re(alpha_K) and Y_K = (1/scale_K) sqrt(2N) Im(alpha_K);
    dividing by sqrt(N_UC) with N = 2 x N_UC gives the per-site factor
    2 sqrt(x).
    """
    f = 2.0 * math.sqrt(x)
    t0 = f * basis.t_scale_0 * alpha0.real
    y0 = f * basis.y_scale_0 * alpha0.imag
    tpi = f * basis.t_scale_pi * alphapi.real
    ypi = f * basis.y_scale_pi * alphapi.imag
    return t0, y0, tpi, ypi


def fluctuation_map(
    basis: MagnonBasis,
    x: float,
    quads: tuple[float, float, float, float] | None = None,
    *,
    alpha0: complex = 0j,
    alphapi: complex = 0j,
    S: float = FE_SPIN,
) -> tuple[np.ndarray, np.ndarray]:
    """Per-site Fe spin fluctuations (dS_plus, dS_minus) from mode quadratures.

    ``quads`` = (t0, y0, tpi, ypi) are per-site quadrature c-numbers (the
    collective ones divided by sqrt(N_UC)); alternatively pass normalized
    magnon amplitudes via ``alpha0``/``alphapi`` and the dilution ``x`` to
    have the conversion done here.  The sum/difference fluctuations are

        dS_plus  = sqrt(2S) ( tpi cos(beta0),  y0, -t0 sin(beta0) )
        dS_minus = sqrt(2S) (-t0  cos(beta0), -ypi, tpi sin(beta0) )
    """
    if quads is None:
        quads = quadratures_from_amplitudes(basis, x, alpha0, alphapi)
    t0, y0, tpi, ypi = quads
    root = math.sqrt(2.0 * S)
    cb, sb = math.cos(basis.beta0), math.sin(basis.beta0)
    d_plus = root * np.array([tpi * cb, y0, -t0 * sb])
    d_minus = root * np.array([-t0 * cb, -ypi, tpi * sb])
    return d_plus, d_minus
