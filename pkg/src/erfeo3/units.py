"""Physical constants and the fixed unit conversions used across the package.

Internal conventions: energies in meV, magnetic flux densities in tesla,
temperatures in kelvin.  Frequencies are handled as ordinary frequencies
nu in THz and converted through E = h * nu; angular frequencies (rad/ps)
appear only inside dynamical calculations.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ConfigError

# CODATA 2018
_MU_B_MEV_PER_T = 5.7883818060e-2      # Bohr magneton (meV/T)
_K_B_MEV_PER_K = 8.617333262e-2        # Boltzmann constant (meV/K)
_H_MEV_PS = 4.135667696                # Planck constant (meV*ps), i.e. meV per THz
_MEV_PER_J = 1.0 / 1.602176634e-22     # 1 J in meV
_TWO_PI = 6.283185307179586


@dataclass(frozen=True)
class PhysConsts:
    """Constants in the internal meV / tesla / kelvin system.

    ``gamma`` is the gyromagnetic ratio g_f*mu_B/hbar of a free electron
    spin in rad/(ps*T).
    """

    mu_B: float = _MU_B_MEV_PER_T
    k_B: float = _K_B_MEV_PER_K
    h: float = _H_MEV_PS
    g_f: float = 2.0

    @property
    def hbar(self) -> float:
        """Reduced Planck constant (meV*ps)."""
        return self.h / _TWO_PI

    @property
    def gamma(self) -> float:
        """Free-electron gyromagnetic ratio (rad/(ps*T))."""
        return self.g_f * self.mu_B / self.hbar


CONSTS = PhysConsts()

# Linear conversion factors to the internal energy unit (meV).
_TO_MEV = {
    "meV": 1.0,
    "THz": CONSTS.h,     # E = h * nu
    "K": CONSTS.k_B,     # E = k_B * T
    "J": _MEV_PER_J,
}


def convert(value: float, frm: str, to: str) -> float:
    """Convert ``value`` between the energy-equivalent units meV, THz, K, J.

    All conversions are exact linear maps through meV, so round trips are
    identities up to floating point.
    """
    try:
        a = _TO_MEV[frm]
        b = _TO_MEV[to]
    except KeyError as exc:
        raise ConfigError(
            f"unknown unit {exc.args[0]!r}; expected one of {sorted(_TO_MEV)}"
        ) from None
    return value * (a / b)
