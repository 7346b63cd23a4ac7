"""Exact dressed eigenbasis of the static transmon-resonator Hamiltonian."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, LabelAmbiguity
from .operators import OperatorMatrix, as_array, static_hamiltonian
from .params import DeviceParams

OVERLAP_FLOOR = 0.25


@dataclass(frozen=True)
class DressedFrame:
    """Eigenbasis of H0 + Hc with bare-state labels and a fixed phase gauge.

    Columns of ``unitary`` are dressed eigenvectors expressed in the bare
    basis, permuted so that column m*n_r + l is the state labeled (m, l).
    The labeled component of each column is made real and positive.
    """

    dims: tuple[int, int]
    unitary: np.ndarray = field(repr=False)
    energies: np.ndarray = field(repr=False)
    labels: tuple[tuple[int, int], ...]

    @property
    def dim(self) -> int:
        return self.dims[0] * self.dims[1]

    def index(self, m: int, l: int) -> int:
        return m * self.dims[1] + l

    def energy(self, m: int, l: int) -> float:
        return float(self.energies[self.index(m, l)])

    def state(self, m: int, l: int) -> np.ndarray:
        """Dressed eigenvector labeled (m, l), in the bare basis."""
        return self.unitary[:, self.index(m, l)].copy()


def _greedy_label(overlaps: np.ndarray, energies: np.ndarray) -> np.ndarray:
    """Assign each eigenvector (column) a bare row by maximal overlap.

    Ties are broken toward the lower-energy eigenvector.  Returns
    perm[bare_index] = eigenvector_index.
    """
    n = overlaps.shape[0]
    order = np.argsort(energies, kind="stable")
    rank = np.empty(n, dtype=int)
    rank[order] = np.arange(n)

    work = overlaps.copy()
    perm = np.full(n, -1, dtype=int)
    assigned_val = np.empty(n)
    for _ in range(n):
        best = np.unravel_index(np.argmax(work), work.shape)
        i, j = int(best[0]), int(best[1])
        # resolve near-ties on the same bare row by energy order
        row = work[i, :]
        ties = np.flatnonzero(row >= work[i, j] - 1e-12)
        if ties.size > 1:
            j = int(ties[np.argmin(rank[ties])])
        perm[i] = j
        assigned_val[i] = overlaps[i, j]
        work[i, :] = -1.0
        work[:, j] = -1.0
    if np.any(assigned_val < OVERLAP_FLOOR):
        worst = int(np.argmin(assigned_val))
        raise LabelAmbiguity(
            f"bare state {worst} matched with overlap^2 = {assigned_val[worst]:.3f} < {OVERLAP_FLOOR}"
        )
    return perm


def diagonalize_static(params: DeviceParams, omega_d: float) -> DressedFrame:
    """Exact eigendecomposition of H0 + Hc, labeled against the bare basis."""
    h = static_hamiltonian(params, omega_d)
    energies, vecs = np.linalg.eigh(h)

    overlaps = np.abs(vecs) ** 2  # row: bare index, column: eigenvector
    perm = _greedy_label(overlaps, energies)

    u = vecs[:, perm]
    e = energies[perm]
    # phase gauge: labeled component real and positive
    diag = np.diagonal(u).copy()
    phases = diag / np.abs(diag)
    u = u * phases.conj()[None, :]

    nt, nr = params.n_transmon, params.n_resonator
    labels = tuple((m, l) for m in range(nt) for l in range(nr))
    return DressedFrame(dims=(nt, nr), unitary=u, energies=e, labels=labels)


def to_dressed_frame(op, frame: DressedFrame) -> OperatorMatrix:
    """Conjugate an operator into the dressed basis: U^dag O U."""
    mat = as_array(op)
    if mat.shape != (frame.dim, frame.dim):
        raise DimensionMismatch(
            f"operator shape {mat.shape} does not match frame dim {frame.dim}"
        )
    out = frame.unitary.conj().T @ mat @ frame.unitary
    hermitian = bool(
        np.abs(mat - mat.conj().T).max() <= 1e-12 * max(1.0, np.abs(mat).max())
    )
    if hermitian:
        out = 0.5 * (out + out.conj().T)
    return OperatorMatrix(dims=frame.dims, matrix=out, hermitian=hermitian)


def from_dressed_frame(op, frame: DressedFrame) -> OperatorMatrix:
    """Inverse transform: U O U^dag."""
    mat = as_array(op)
    if mat.shape != (frame.dim, frame.dim):
        raise DimensionMismatch(
            f"operator shape {mat.shape} does not match frame dim {frame.dim}"
        )
    out = frame.unitary @ mat @ frame.unitary.conj().T
    return OperatorMatrix(dims=frame.dims, matrix=out, hermitian=False)
