"""Reduction of the spin model to an extended Dicke Hamiltonian.

The Fe3+ subsystem enters through its two magnon modes; the Er3+ spins form
a collective pseudospin ensemble coupled to them through five bilinear
couplings lambda_x, lambda_y, lambda_y', lambda_z, lambda_z' plus a static
alignment energy E_x and the direct Er-Er exchange term.  Couplings are
stored as ordinary frequencies nu = lambda/(2 pi) in THz; E_x and exchange
energies in meV.

For the low-temperature transition with the DC field along the a axis only
the qAFM mode and the (lambda_x, lambda_z) pair survive; ``reduce_for_ltpt``
builds that two-coupling model together with the Er resonance frequency
omega_Er = |E_x + g_x mu_B B_x| / hbar.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError
from .magnon import MagnonBasis, magnon_basis
from .model import ErFeCouplings, ModelConfig
from .units import CONSTS, PhysConsts


def alignment_energy(xc: ErFeCouplings, S: float, beta0: float) -> float:
    """Static Er alignment energy E_x = 4S (J sin(beta0) + D_y cos(beta0)) in meV."""
    return 4.0 * S * (xc.J * math.sin(beta0) + xc.D_y * math.cos(beta0))


def coupling_strengths(
    cfg: ModelConfig, basis: MagnonBasis, consts: PhysConsts = CONSTS
) -> tuple[float, float, float, float, float]:
    """Five Er-magnon coupling strengths (nu_x, nu_y, nu_y', nu_z, nu_z') in THz.

    h*nu_x  = sqrt(2xS)(J cos b0 - D_y sin b0) * ((b+a)/(d-c))^(1/4)   [qAFM, Sigma_x+]
    h*nu_y  = sqrt(2xS) J                      * ((d+c)/(b-a))^(1/4)   [qFM,  Sigma_y+]
    h*nu_y' = sqrt(2xS) D_x sin b0             * ((b+a)/(d-c))^(1/4)   [qAFM, Sigma_y-]
    h*nu_z  = sqrt(2xS) D_x                    * ((d-c)/(b+a))^(1/4)   [qAFM, Sigma_z-]
    h*nu_z' = sqrt(2xS)(-J sin b0 - D_y cos b0)* ((b-a)/(d+c))^(1/4)   [qFM,  Sigma_z+]
    """
    xc = cfg.xc
    S = cfg.fe.S
    x = cfg.env.x
    root = math.sqrt(2.0 * x * S)
    cb, sb = math.cos(basis.beta0), math.sin(basis.beta0)
    tpi = basis.t_scale_pi      # ((b+a)/(d-c))^(1/4)
    ypi = basis.y_scale_pi      # ((d-c)/(b+a))^(1/4)
    t0 = basis.t_scale_0        # ((b-a)/(d+c))^(1/4)
    y0 = basis.y_scale_0        # ((d+c)/(b-a))^(1/4)
    h = consts.h
    nu_x = root * (xc.J * cb - xc.D_y * sb) * tpi / h
    nu_y = root * xc.J * y0 / h
    nu_yp = root * (xc.D_x * sb) * tpi / h
    nu_z = root * xc.D_x * ypi / h
    nu_zp = root * (-xc.J * sb - xc.D_y * cb) * t0 / h
    return nu_x, nu_y, nu_yp, nu_z, nu_zp


@dataclass(frozen=True)
class DickeParams:
    """Extended Dicke model constants.

    Frequencies (omega0, omegapi, lambdas) are ordinary frequencies in THz;
    E_x and zEr_JEr = 6x * J_Er are energies in meV.
    """

    omega0: float
    omegapi: float
    E_x: float
    lambda_x: float
    lambda_y: float
    lambda_yp: float
    lambda_z: float
    lambda_zp: float
    zEr_JEr: float
    g_Er: tuple[float, float, float]
    x: float


def derive_dicke_params(cfg: ModelConfig, consts: PhysConsts = CONSTS) -> DickeParams:
    """All extended-Dicke constants from a spin-model configuration."""
    basis = magnon_basis(cfg.fe, consts)
    lx, ly, lyp, lz, lzp = coupling_strengths(cfg, basis, consts)
    return DickeParams(
        omega0=basis.nu0,
        omegapi=basis.nupi,
        E_x=alignment_energy(cfg.xc, cfg.fe.S, basis.beta0),
        lambda_x=lx,
        lambda_y=ly,
        lambda_yp=lyp,
        lambda_z=lz,
        lambda_zp=lzp,
        zEr_JEr=cfg.env.z_Er * cfg.er.J_Er,
        g_Er=cfg.er.g_Er,
        x=cfg.env.x,
    )


@dataclass(frozen=True)
class ReducedDicke:
    """Two-coupling model for the low-temperature transition (B along a only).

    ``c_x`` is the signed Er alignment coefficient E_x + g_x mu_B B_x (meV);
    ``omegaEr`` = |c_x|/h is its magnitude as an ordinary frequency (THz).
    Couplings lambda_x, lambda_z and the qAFM frequency are in THz,
    ``zEr_JEr`` in meV.
    """

    omegapi: float
    omegaEr: float
    lambda_x: float
    lambda_z: float
    zEr_JEr: float
    c_x: float


def reduce_for_ltpt(dicke: DickeParams, B_x: float = 0.0, *,
                    B_ext: tuple[float, float, float] | None = None,
                    consts: PhysConsts = CONSTS) -> ReducedDicke:
    """Drop the qFM mode and the lambda_y/y'/z' couplings; valid only for a
    DC field along the a axis (anything else breaks the symmetry the
    reduction relies on and raises DomainError)."""
    if B_ext is not None:
        if B_ext[1] != 0.0 or B_ext[2] != 0.0:
            raise DomainError("the reduced model requires B_ext along the a axis")
        B_x = B_ext[0]
    c_x = dicke.E_x + dicke.g_Er[0] * consts.mu_B * B_x
    return ReducedDicke(
        omegapi=dicke.omegapi,
        omegaEr=abs(c_x) / consts.h,
        lambda_x=dicke.lambda_x,
        lambda_z=dicke.lambda_z,
        zEr_JEr=dicke.zEr_JEr,
        c_x=c_x,
    )
