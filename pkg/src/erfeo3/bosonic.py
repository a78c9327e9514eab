"""Normal-mode frequencies of quadratic boson Hamiltonians.

A Hamiltonian with rotating and counter-rotating bilinears,

    H/h = sum_ij A_ij a_i^dag a_j + (1/2) sum_ij (B_ij a_i^dag a_j^dag + c.c.),

with A Hermitian and B symmetric (entries in THz), is diagonalized by a
para-unitary (Bogoliubov) transformation.  The positive eigenvalues of the
dynamic matrix [[A, B], [-conj(B), -conj(A)]] are the normal-mode
frequencies; complex eigenvalues signal an unstable (non-positive)
Hamiltonian.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InstabilityError

_IMAG_TOL = 1e-9


@dataclass
class BosonicQuadratic:
    """Mode frequencies on the diagonal of A (THz); off-diagonal A entries
    are rotating couplings, B entries counter-rotating ones."""

    labels: list[str]
    A: np.ndarray = field(default=None)
    B: np.ndarray = field(default=None)

    def __post_init__(self):
        n = len(self.labels)
        if self.A is None:
            self.A = np.zeros((n, n), dtype=complex)
        if self.B is None:
            self.B = np.zeros((n, n), dtype=complex)

    @property
    def n(self) -> int:
        return len(self.labels)

    def set_frequency(self, name: str, nu: float):
        i = self.labels.index(name)
        self.A[i, i] = nu

    def couple(self, name_i: str, name_j: str, rotating: complex, counter: complex):
        """Add h*rotating (a_i^dag a_j + h.c.) and h*counter (a_i^dag a_j^dag + h.c.)."""
        i = self.labels.index(name_i)
        j = self.labels.index(name_j)
        self.A[i, j] += rotating
        self.A[j, i] += np.conj(rotating)
        self.B[i, j] += counter
        self.B[j, i] += counter

    def hermitian_ok(self) -> bool:
        return (np.allclose(self.A, self.A.conj().T) and
                np.allclose(self.B, self.B.T))


def bogoliubov_frequencies(q: BosonicQuadratic, with_vectors: bool = False):
    """Positive normal-mode frequencies (THz), ascending.

    With ``with_vectors`` also returns, per mode, the weight |u_i|^2 +
    |v_i|^2 of each original mode in the eigenvector, for labeling.
    Raises InstabilityError when the quadratic form is not stable.
    """
    n = q.n
    if not q.hermitian_ok():
        raise ValueError("quadratic form is not Hermitian")
    D = np.block([[q.A, q.B], [-q.B.conj(), -q.A.conj()]])
    evals, evecs = np.linalg.eig(D)
    scale = max(1.0, float(np.max(np.abs(evals))))
    if np.max(np.abs(evals.imag)) > _IMAG_TOL * scale:
        raise InstabilityError(
            "dynamic matrix has complex eigenvalues; parameters outside the "
            "stable high-symmetry regime"
        )
    order = np.argsort(evals.real)[::-1][:n]   # n largest = positive branch
    freqs = evals.real[order]
    if np.any(freqs < -_IMAG_TOL * scale):
        raise InstabilityError("fewer positive than negative eigenvalues")
    idx = np.argsort(freqs)
    freqs = freqs[idx]
    if not with_vectors:
        return freqs
    weights = np.empty((n, n))
    for k, col in enumerate(order[idx]):
        v = evecs[:, col]
        weights[k] = np.abs(v[:n]) ** 2 + np.abs(v[n:]) ** 2
        weights[k] /= weights[k].sum()
    return freqs, weights
