"""Spin resonance frequencies in the high-symmetry phase.

Two routes, compared against each other in the tests:

* mean-field: linearize the precession equations of the four sublattice
  spins about a converged equilibrium.  The 12x12 coefficient matrix has
  four positive, four negative, and four zero eigenfrequencies ("positive"
  meaning +i omega pairs); the positive ones are the observable resonances
  (qFM and qAFM magnons, in-phase and out-of-phase Er precession).

* reduced boson models: per field axis, small quadratic Hamiltonians of
  the magnon modes and the collective Er modes b_+/b_- with the Er-magnon
  couplings scaled by sqrt(x_eff); x_eff = tanh(E_Er/(2 k_B T)) accounts
  for the thermally reduced density of coherently precessing Er spins and
  multiplies the chemical dilution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bosonic import BosonicQuadratic, bogoliubov_frequencies
from .dicke import DickeParams, derive_dicke_params
from .errors import DomainError
from .meanfield import SpinState, _context, _mean_fields_array, solve_equilibrium
from .model import ModelConfig
from .units import CONSTS

_TWO_PI = 2.0 * math.pi
ZERO_FREQ_THZ = 1e-9          # kernel detection threshold
_STATIONARY_TOL = 1e-7        # meV, max |spin x field| accepted by linearize

MODE_QFM = "qFM"
MODE_QAFM = "qAFM"
MODE_ER_IN = "Er-in-phase"
MODE_ER_OUT = "Er-out-of-phase"


@dataclass(frozen=True)
class LinearizedSystem:
    """d/dt dX = M dX for dX = (dsigma_A, dsigma_B, dS_A, dS_B); M in 1/ps."""

    matrix: np.ndarray
    state: SpinState


@dataclass(frozen=True)
class ResonanceSet:
    frequencies: tuple[float, ...]      # positive resonances, THz, ascending
    labels: tuple[str, ...]
    valid: bool = True
    note: str = ""


def effective_er_density(T: float, B_ext, dicke: DickeParams) -> float:
    """Fraction tanh(E_Er/(2 k_B T)) of Er spins taking part in coherent
    precession; E_Er is the bare Er excitation energy at this field."""
    if T <= 0:
        raise ValueError("temperature must be positive")
    mu = CONSTS.mu_B
    gx, gy, gz = dicke.g_Er
    e_er = math.sqrt((dicke.E_x + gx * mu * B_ext[0]) ** 2
                     + (gy * mu * B_ext[1]) ** 2
                     + (gz * mu * B_ext[2]) ** 2)
    return math.tanh(e_er / (2.0 * CONSTS.k_B * T))


# ---------------------------------------------------------------------------
# Mean-field route
# ---------------------------------------------------------------------------

def _cross_matrix(v: np.ndarray) -> np.ndarray:
    x, y, z = v
    return np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])


def linearize(state: SpinState, cfg: ModelConfig) -> LinearizedSystem:
    """12x12 linearization of the coupled precession equations about a
    stationary state: each fluctuation precesses in the static field while
    the static spin precesses in the fluctuations' field."""
    ctx = _context(cfg)
    arr = state.as_array()
    B = np.asarray(cfg.env.B_ext, dtype=float)
    fields = _mean_fields_array(arr, ctx, B)
    worst = float(np.max(np.linalg.norm(np.cross(arr, fields), axis=-1)))
    if worst > _STATIONARY_TOL:
        raise DomainError(
            f"reference state is not stationary (max |spin x field| = {worst:.3g} meV)"
        )

    hbar = CONSTS.hbar
    M = np.zeros((12, 12))
    # -d(spin) x static_field  ==  +[static_field]_x d(spin)
    for s in range(4):
        M[3 * s:3 * s + 3, 3 * s:3 * s + 3] += _cross_matrix(fields[s]) / hbar
    # -static_spin x d(field): d(field) is the linear (B_ext-free) part
    for s in range(4):
        spin_cross = _cross_matrix(arr[s]) / hbar
        for t in range(4):
            for c in range(3):
                probe = np.zeros((4, 3))
                probe[t, c] = 1.0
                df = _mean_fields_array(probe, ctx, np.zeros(3))[s]
                M[3 * s:3 * s + 3, 3 * t + c] -= spin_cross @ df
    return LinearizedSystem(matrix=M, state=state)


def eigenfrequencies(lin: LinearizedSystem) -> np.ndarray:
    """All 12 signed frequencies nu = Im(eig)/2pi in THz, ascending."""
    evals = np.linalg.eigvals(lin.matrix)
    return np.sort(evals.imag / _TWO_PI)


def _label_modes(lin: LinearizedSystem) -> tuple[np.ndarray, list[str]]:
    """Positive eigenfrequencies with best-effort mode labels from the
    symmetric/antisymmetric sublattice content of the eigenvectors."""
    evals, evecs = np.linalg.eig(lin.matrix)
    nu = evals.imag / _TWO_PI
    pos = np.flatnonzero(nu > ZERO_FREQ_THZ)
    pos = pos[np.argsort(nu[pos])]
    freqs, labels = [], []
    for k in pos:
        v = evecs[:, k]
        er_a, er_b = v[0:3], v[3:6]
        fe_a, fe_b = v[6:9], v[9:12]
        w = {
            MODE_ER_IN: np.linalg.norm(er_a + er_b) ** 2 / 2.0,
            MODE_ER_OUT: np.linalg.norm(er_a - er_b) ** 2 / 2.0,
            # qFM: x antisymmetric, y/z symmetric; qAFM the reverse
            MODE_QFM: (abs(fe_a[0] - fe_b[0]) ** 2 + abs(fe_a[1] + fe_b[1]) ** 2
                       + abs(fe_a[2] + fe_b[2]) ** 2) / 2.0,
            MODE_QAFM: (abs(fe_a[0] + fe_b[0]) ** 2 + abs(fe_a[1] - fe_b[1]) ** 2
                        + abs(fe_a[2] - fe_b[2]) ** 2) / 2.0,
        }
        freqs.append(nu[k])
        labels.append(max(w, key=w.get))
    return np.asarray(freqs), labels


def mf_resonances(cfg: ModelConfig, T: float, B_ext) -> ResonanceSet:
    """Solve the equilibrium at (T, B), linearize, and return the four
    positive resonance frequencies."""
    res = solve_equilibrium(cfg, T=T, B_ext=B_ext, tol=1e-12)
    cfg_pt = cfg.with_env(T=max(T, 0.01), B_ext=tuple(np.asarray(B_ext, dtype=float)))
    lin = linearize(res.state, cfg_pt)
    freqs, labels = _label_modes(lin)
    return ResonanceSet(
        frequencies=tuple(freqs),
        labels=tuple(labels),
        valid=bool(res.converged),
        note="" if res.converged else "equilibrium solver did not converge",
    )


# ---------------------------------------------------------------------------
# Reduced boson-model route
# ---------------------------------------------------------------------------

def _scaled(dicke: DickeParams, thermal: float) -> dict:
    """Couplings rescaled by the thermal occupation factor: the DickeParams
    already carry the chemical dilution x, so lambda gains sqrt(thermal)
    and the Er-Er splitting a full factor of thermal."""
    root = math.sqrt(thermal)
    return {
        "lx": dicke.lambda_x * root,
        "ly": dicke.lambda_y * root,
        "lyp": dicke.lambda_yp * root,
        "lz": dicke.lambda_z * root,
        "lzp": dicke.lambda_zp * root,
        "zJ": dicke.zEr_JEr * thermal,
    }


def dicke_resonances(cfg: ModelConfig, T: float, axis: str, B: float) -> ResonanceSet:
    """Resonances of the axis-specific reduced boson Hamiltonians at
    temperature T and field B along ``axis`` in {'a','b','c'}."""
    dicke = derive_dicke_params(cfg)
    mu = CONSTS.mu_B
    h = CONSTS.h
    B_vec = {"a": (B, 0.0, 0.0), "b": (0.0, B, 0.0), "c": (0.0, 0.0, B)}[axis]
    thermal = effective_er_density(T, B_vec, dicke)
    cpl = _scaled(dicke, thermal)
    gx, gy, gz = dicke.g_Er

    if axis == "a":
        c_x = dicke.E_x + gx * mu * B
        gap = 4.0 * cpl["zJ"]
        if -gap <= c_x <= gap:
            raise DomainError(
                "field inside the Er level-crossing gap: the high-symmetry "
                "reduction does not apply there"
            )
        sign = 1.0 if c_x > 0.0 else -1.0
        blk0 = BosonicQuadratic(labels=[MODE_QFM, MODE_ER_IN])
        blk0.set_frequency(MODE_QFM, dicke.omega0)
        blk0.set_frequency(MODE_ER_IN, abs(c_x) / h)
        blk0.couple(MODE_QFM, MODE_ER_IN,
                    rotating=1j * (cpl["ly"] + sign * cpl["lzp"]),
                    counter=1j * (cpl["ly"] - sign * cpl["lzp"]))
        blkpi = BosonicQuadratic(labels=[MODE_QAFM, MODE_ER_OUT])
        blkpi.set_frequency(MODE_QAFM, dicke.omegapi)
        blkpi.set_frequency(MODE_ER_OUT, (abs(c_x) - gap) / h)
        blkpi.couple(MODE_QAFM, MODE_ER_OUT,
                     rotating=-sign * cpl["lz"] + cpl["lyp"],
                     counter=sign * cpl["lz"] + cpl["lyp"])
        f0, w0 = bogoliubov_frequencies(blk0, with_vectors=True)
        fpi, wpi = bogoliubov_frequencies(blkpi, with_vectors=True)
        freqs = np.concatenate([f0, fpi])
        labels = ([blk0.labels[int(np.argmax(w))] for w in w0]
                  + [blkpi.labels[int(np.argmax(w))] for w in wpi])

    elif axis == "b":
        zee = abs(gy * mu * B)
        gap = 4.0 * cpl["zJ"]
        if zee <= gap:
            raise DomainError("field too weak for the high-field reduction (|g mu_B B| <= 4 zEr J_Er)")
        q = BosonicQuadratic(labels=[MODE_QFM, MODE_QAFM, MODE_ER_IN, MODE_ER_OUT])
        q.set_frequency(MODE_QFM, dicke.omega0)
        q.set_frequency(MODE_QAFM, dicke.omegapi)
        q.set_frequency(MODE_ER_IN, zee / h)
        q.set_frequency(MODE_ER_OUT, (zee - gap) / h)
        q.couple(MODE_QAFM, MODE_ER_IN, rotating=1j * cpl["lx"], counter=-1j * cpl["lx"])
        q.couple(MODE_QAFM, MODE_ER_OUT, rotating=1j * cpl["lz"], counter=1j * cpl["lz"])
        q.couple(MODE_QFM, MODE_ER_IN, rotating=cpl["lzp"], counter=cpl["lzp"])
        freqs, wts = bogoliubov_frequencies(q, with_vectors=True)
        labels = [q.labels[int(np.argmax(w))] for w in wts]

    elif axis == "c":
        zee = abs(gz * mu * B)
        gap = 4.0 * cpl["zJ"]
        if zee <= gap:
            raise DomainError("field too weak for the high-field reduction (|g mu_B B| <= 4 zEr J_Er)")
        q = BosonicQuadratic(labels=[MODE_QFM, MODE_QAFM, MODE_ER_IN])
        q.set_frequency(MODE_QFM, dicke.omega0)
        q.set_frequency(MODE_QAFM, dicke.omegapi)
        q.set_frequency(MODE_ER_IN, zee / h)
        q.couple(MODE_QFM, MODE_ER_IN, rotating=-cpl["ly"], counter=cpl["ly"])
        q.couple(MODE_QAFM, MODE_ER_IN, rotating=cpl["lx"], counter=cpl["lx"])
        freqs, wts = bogoliubov_frequencies(q, with_vectors=True)
        labels = [q.labels[int(np.argmax(w))] for w in wts]
        # the out-of-phase Er mode decouples here; report its bare frequency
        freqs = np.append(freqs, (zee - gap) / h)
        labels.append(MODE_ER_OUT)
    else:
        raise ValueError("axis must be one of 'a', 'b', 'c'")

    order = np.argsort(freqs)
    return ResonanceSet(
        frequencies=tuple(float(freqs[i]) for i in order),
        labels=tuple(labels[i] for i in order),
    )


# ---------------------------------------------------------------------------
# Anticrossing extraction
# ---------------------------------------------------------------------------

def anticrossing_centers(B_values: np.ndarray, freq_table: np.ndarray) -> list[dict]:
    """Local minima of the gaps between adjacent sorted branches.

    freq_table: (n_points, n_branches) sorted ascending per row.  Returns a
    list of {B, gap, pair} at interior local minima of each adjacent-branch
    gap, the usual estimate of an anticrossing center on a uniform grid.
    """
    B_values = np.asarray(B_values, dtype=float)
    f = np.asarray(freq_table, dtype=float)
    out = []
    for j in range(f.shape[1] - 1):
        gap = f[:, j + 1] - f[:, j]
        for i in range(1, len(B_values) - 1):
            if gap[i] < gap[i - 1] and gap[i] <= gap[i + 1]:
                out.append({"B": float(B_values[i]), "gap": float(gap[i]), "pair": (j, j + 1)})
    return out
