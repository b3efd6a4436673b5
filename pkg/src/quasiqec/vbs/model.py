"""Parent Hamiltonian of the SU(d) VBS chain and exact-diagonalisation cross-checks."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import eigsh

from .algebra import ground_energy, su_basis
from .codes import bond_hamiltonians, ground_state
from .mps import to_dense

MAX_DIM = 400_000
DENSE_LIMIT = 500


@dataclass(frozen=True)
class VbsModel:
    """``H = sum_n H_n`` on a periodic chain of ``N`` adjoint-representation sites."""

    d: int
    n_sites: int

    @property
    def local_dim(self) -> int:
        return self.d * self.d - 1

    @property
    def dim(self) -> int:
        return self.local_dim**self.n_sites

    def term(self) -> np.ndarray:
        return bond_hamiltonians(self.d)[1]

    def term_ground_energy(self) -> float:
        return float(np.linalg.eigvalsh(self.term())[0])

    def hamiltonian(self) -> sp.csr_matrix:
        if self.dim > MAX_DIM:
            raise ValueError(f"Hilbert-space dimension {self.dim} exceeds {MAX_DIM}")
        p, n = self.local_dim, self.n_sites
        first = sp.kron(sp.csr_matrix(self.term()), sp.identity(p ** (n - 2)), format="csr")
        # cyclic site shift: the term on (k, k + 1) is the shifted term on (1, 2)
        shift = np.arange(self.dim).reshape((p,) * n)
        total = first
        for _ in range(n - 1):
            shift = np.moveaxis(shift, -1, 0)
            perm = shift.reshape(-1)
            total = total + first[perm][:, perm]
        return total.tocsr()


@dataclass(frozen=True)
class EdReport:
    d: int
    n_sites: int
    energies: np.ndarray
    degeneracy: int
    term_minimum: float
    ground_energy: float
    frustration_free: float
    fidelities: tuple[float, ...]
    term_energy: tuple[float, float]
    term_energy_analytic: tuple[float, float]

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "N": self.n_sites,
            "energies": [float(e) for e in self.energies],
            "degeneracy": self.degeneracy,
            "term_minimum": self.term_minimum,
            "ground_energy": self.ground_energy,
            "frustration_free_residual": self.frustration_free,
            "fidelities": list(self.fidelities),
            "term_energy": list(self.term_energy),
            "term_energy_analytic": list(self.term_energy_analytic),
        }


def ed_cross_check(d: int, n_sites: int, n_levels: int = 6, tol: float = 1e-8) -> EdReport:
    """Diagonalise ``H`` and compare its ground space with the VBS states.

    Reports the lowest levels, the ground degeneracy, the squared overlap of each
    periodic VBS state (``G_L`` and, for ``d >= 3``, ``G_R``) with the ground
    space, and ``<h>``, ``<h^2>`` on one link of the ground space.
    """
    model = VbsModel(d, n_sites)
    # h = sum_a T^a (x) T^a is real in the Gell-Mann index basis
    h_full = model.hamiltonian().real.tocsr()
    if model.dim <= DENSE_LIMIT:
        energies, vecs = np.linalg.eigh(h_full.toarray())
    else:
        k = min(n_levels, model.dim - 2)
        energies, vecs = eigsh(h_full, k=k, which="SA", tol=1e-12)
        order = np.argsort(energies)
        energies, vecs = energies[order], vecs[:, order]
    e0 = energies[0]
    ground, _ = np.linalg.qr(vecs[:, energies < e0 + tol])
    states = [ground_state(d, n_sites)] + ([ground_state(d, n_sites, True)] if d >= 3 else [])
    fids = []
    for st in states:
        v = to_dense(st)
        v = v / np.linalg.norm(v)
        fids.append(float(np.linalg.norm(ground.conj().T @ v) ** 2))
    h, big = bond_hamiltonians(d)
    p = model.local_dim
    # link (1, 2) expectation on the first ground vector
    g0 = ground[:, 0].reshape(p, p, -1)
    e_h = float(np.real(np.einsum("ijr,ijkl,klr->", g0.conj(), h.reshape(p, p, p, p), g0)))
    e_h2 = float(np.real(np.einsum("ijr,ijkl,klr->", g0.conj(), (h @ h).reshape(p, p, p, p), g0)))
    term_min = model.term_ground_energy()
    return EdReport(
        d,
        n_sites,
        energies[:n_levels],
        int(ground.shape[1]),
        term_min,
        float(e0),
        float(abs(e0 - n_sites * term_min)),
        tuple(fids),
        (e_h, e_h2),
        ground_energy(d),
    )
