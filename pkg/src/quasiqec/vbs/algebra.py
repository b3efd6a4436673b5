"""SU(d) Lie-algebra numerics in the generalized Gell-Mann basis."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

MAX_D = 6


@dataclass(frozen=True)
class SuBasis:
    """Generalized Gell-Mann basis of su(d), normalised as ``tr(t^a t^b) = delta_ab / 2``.

    Ordering: symmetric pairs ``(j < k)``, then antisymmetric pairs, then the
    ``d - 1`` diagonal elements.  ``parity`` holds ``eta_a`` with
    ``-(t^a)^T = eta_a t^a``: -1 for real (symmetric and diagonal) elements and
    +1 for imaginary (antisymmetric) ones.
    """

    d: int
    t: np.ndarray  # (D, d, d)
    f: np.ndarray  # (D, D, D) structure constants, [t^a, t^b] = i f_abc t^c
    d_sym: np.ndarray  # (D, D, D), {t^a, t^b} = delta_ab / d + d_abc t^c
    adjoint: np.ndarray  # (D, D, D), T^a = -i f_a.. in the adjoint irrep
    parity: np.ndarray  # (D,)

    @property
    def D(self) -> int:
        return self.d * self.d - 1

    @property
    def h(self) -> np.ndarray:
        """``h_abc = d_abc + i f_abc`` so that ``t^a t^b = delta_ab/(2d) + h_abc t^c / 2``."""
        return self.d_sym + 1j * self.f

    @property
    def parity_operator(self) -> np.ndarray:
        """On-site parity ``Pi = diag(eta)`` in the adjoint (Gell-Mann index) basis."""
        return np.diag(self.parity).astype(complex)

    @property
    def chi(self) -> float:
        """Correlation ratio ``-1 / (d^2 - 1)``."""
        return -1.0 / self.D

    def components(self, op: np.ndarray) -> np.ndarray:
        """Coefficients ``c_a = 2 tr(op t^a)`` of ``op`` on the basis."""
        return 2 * np.einsum("ij,aji->a", op, self.t)

    def standard_order(self) -> np.ndarray:
        """Permutation ``p`` with ``t[p[k]]`` the textbook k-th Gell-Mann matrix.

        The textbook order interleaves each symmetric/antisymmetric pair
        ``(j, k)`` for ``k = 1..d-1``, ``j < k`` and closes each block with the
        ``k``-th diagonal element (lambda_1, lambda_2, lambda_3, ... for d = 3).
        """
        d = self.d
        pairs = [(j, k) for j in range(d) for k in range(j + 1, d)]
        n_pairs = len(pairs)
        order = []
        for k in range(1, d):
            for j in range(k):
                idx = pairs.index((j, k))
                order.extend([idx, n_pairs + idx])
            order.append(2 * n_pairs + k - 1)
        return np.array(order)


def gellmann_matrices(d: int) -> np.ndarray:
    pairs = [(j, k) for j in range(d) for k in range(j + 1, d)]
    ts = []
    for j, k in pairs:
        m = np.zeros((d, d), dtype=complex)
        m[j, k] = m[k, j] = 0.5
        ts.append(m)
    for j, k in pairs:
        m = np.zeros((d, d), dtype=complex)
        m[j, k] = -0.5j
        m[k, j] = 0.5j
        ts.append(m)
    for l in range(1, d):
        diag = np.zeros(d)
        diag[:l] = 1.0
        diag[l] = -l
        ts.append(np.diag(diag * np.sqrt(2.0 / (l * (l + 1))) / 2).astype(complex))
    return np.array(ts)


@lru_cache(maxsize=None)
def su_basis(d: int) -> SuBasis:
    if not 2 <= d <= MAX_D:
        raise ValueError(f"d must lie in [2, {MAX_D}], got {d}")
    t = gellmann_matrices(d)
    ab = np.einsum("aij,bjk->abik", t, t)
    comm = ab - ab.transpose(1, 0, 2, 3)
    anti = ab + ab.transpose(1, 0, 2, 3)
    f = np.real(-2j * np.einsum("abij,cji->abc", comm, t))
    d_sym = np.real(2 * np.einsum("abij,cji->abc", anti, t))
    adjoint = -1j * f
    n_pairs = d * (d - 1) // 2
    parity = np.concatenate([-np.ones(n_pairs), np.ones(n_pairs), -np.ones(d - 1)])
    for arr in (t, f, d_sym, adjoint, parity):
        arr.setflags(write=False)
    return SuBasis(d=d, t=t, f=f, d_sym=d_sym, adjoint=adjoint, parity=parity)


def transfer_spectrum(d: int) -> tuple[np.ndarray, np.ndarray]:
    """Primary transfer matrix ``(2/d) sum_m t^m (x) conj(t^m)`` and its sorted eigenvalues.

    The spectrum is ``(d^2 - 1)/d^2`` once (eigenvector ``|omega>``) and
    ``-1/d^2`` with multiplicity ``d^2 - 1``.
    """
    b = su_basis(d)
    m = (2.0 / d) * np.einsum("aij,akl->ikjl", b.t, b.t.conj()).reshape(d * d, d * d)
    return m, np.linalg.eigvalsh(m)[::-1]


def ground_energy(d: int) -> tuple[float, float]:
    """Closed-form ground-state values of ``h_n`` and ``h_n^2`` on a bulk link."""
    D = d * d - 1
    return -(d**3) / (2.0 * D), d * d * (d * d + 2) / (4.0 * D)


def adjoint_rotation(g: np.ndarray) -> np.ndarray:
    """Adjoint matrix ``u_ij(g) = 2 tr(g t^j g^dagger t^i)`` of ``g`` in SU(d).

    ``u(exp(i theta t^b)) = exp(i theta T^b)``, and the VBS tensors obey
    ``sum_i u_ji A^i = g^dagger A^j g``.
    """
    g = np.asarray(g, dtype=complex)
    b = su_basis(g.shape[0])
    conj = np.einsum("ij,bjk,lk->bil", g, b.t, g.conj())
    return np.real(2 * np.einsum("bil,ali->ab", conj, b.t))


def haar_su(d: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    q = q * (np.diag(r) / np.abs(np.diag(r)))
    return q / np.linalg.det(q) ** (1.0 / d)
