"""Matrix-product states with site tensors ``A^i`` and exact transfer-matrix contraction.

A state on ``N`` sites has coefficients

* ``boundary="trace"``: ``c(i_1..i_N) = tr(B A^{i_N} ... A^{i_1})`` (PBC for ``B = 1``,
  OBC ``<r| ... |l>`` for ``B = |l><r|``);
* ``boundary="hbc"``: the edge vector ``A^{i_N} ... A^{i_1} |l>`` is an extra site
  ``N + 1`` of dimension ``chi`` (half-boundary condition).

Links are numbered ``0..N``: link ``n`` joins site ``n`` and site ``n + 1``; link 0
touches the left boundary and link ``N`` the right boundary or edge.  For the
trace boundary link 0 and link ``N`` coincide.

Contractions sweep from site ``N`` down to site 1 with the map
``X -> sum_i B^{i dagger} X A^i`` on ``chi x chi`` environments, written as a
``chi^2 x chi^2`` superoperator in row-major vectorisation.  A bond operator
``(y_bra, y_ket)`` at link ``n`` acts as ``X -> y_bra^dagger X y_ket`` between
sites ``n + 1`` and ``n``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

BondOp = tuple[np.ndarray | None, np.ndarray | None]


@dataclass(frozen=True)
class Mps:
    tensors: np.ndarray  # (phys, chi, chi)
    n_sites: int
    boundary: str = "trace"
    bmat: np.ndarray | None = None  # chi x chi for "trace", length-chi vector for "hbc"
    scale: complex = 1.0

    def __post_init__(self):
        a = np.asarray(self.tensors, dtype=complex)
        object.__setattr__(self, "tensors", a)
        if self.boundary not in ("trace", "hbc"):
            raise ValueError(f"unknown boundary {self.boundary!r}")
        if self.n_sites < 1:
            raise ValueError("need at least one site")
        chi = a.shape[1]
        if self.bmat is None:
            b = np.eye(chi, dtype=complex) if self.boundary == "trace" else None
            if b is None:
                raise ValueError("hbc states need a left boundary vector")
            object.__setattr__(self, "bmat", b)
        else:
            object.__setattr__(self, "bmat", np.asarray(self.bmat, dtype=complex))

    @property
    def phys(self) -> int:
        return int(self.tensors.shape[0])

    @property
    def chi(self) -> int:
        return int(self.tensors.shape[1])

    def with_scale(self, scale: complex) -> "Mps":
        return Mps(self.tensors, self.n_sites, self.boundary, self.bmat, scale)

    @property
    def dense_dim(self) -> int:
        extra = self.chi if self.boundary == "hbc" else 1
        return self.phys**self.n_sites * extra


def site_superop(bra: np.ndarray, ket: np.ndarray, op: np.ndarray | None = None) -> np.ndarray:
    """Superoperator of ``X -> sum_ij op_ij bra^{i dagger} X ket^j`` (``op = 1`` if None)."""
    if op is None:
        return np.einsum("iba,idc->acbd", bra.conj(), ket).reshape(bra.shape[1] ** 2, -1)
    return np.einsum("ij,iba,jdc->acbd", op, bra.conj(), ket).reshape(bra.shape[1] ** 2, -1)


def bond_superop(chi: int, y_bra: np.ndarray | None, y_ket: np.ndarray | None) -> np.ndarray:
    left = np.eye(chi) if y_bra is None else np.conj(y_bra).T
    right = np.eye(chi) if y_ket is None else y_ket
    return np.kron(left, right.T)


def transfer_product(
    bra: np.ndarray,
    ket: np.ndarray,
    n_sites: int,
    sites: Mapping[int, np.ndarray] | None = None,
    links: Mapping[int, BondOp] | None = None,
) -> np.ndarray:
    """Composite superoperator ``L_0 K_1 L_1 K_2 ... K_N L_N`` (``K_N`` acts first)."""
    sites = dict(sites or {})
    links = dict(links or {})
    chi = ket.shape[1]
    plain = site_superop(bra, ket)
    events = sorted(set(sites) | set(links))
    for n in sites:
        if not 1 <= n <= n_sites:
            raise ValueError(f"site {n} outside [1, {n_sites}]")
    for n in links:
        if not 0 <= n <= n_sites:
            raise ValueError(f"link {n} outside [0, {n_sites}]")
    out = np.eye(chi * chi, dtype=complex)
    pos = 0  # number of sites already multiplied in, counted from site 1
    for n in events:
        if n in sites:
            out = out @ np.linalg.matrix_power(plain, n - 1 - pos) @ site_superop(bra, ket, sites[n])
            pos = n
        if n in links:
            out = out @ np.linalg.matrix_power(plain, n - pos) @ bond_superop(chi, *links[n])
            pos = n
    return out @ np.linalg.matrix_power(plain, n_sites - pos)


def overlap(
    bra: Mps,
    ket: Mps,
    sites: Mapping[int, np.ndarray] | None = None,
    links: Mapping[int, BondOp] | None = None,
    edge: np.ndarray | None = None,
) -> complex:
    """``<bra| O |ket>`` with physical operators ``sites``, bond operators ``links``
    and (for hbc states) an operator ``edge`` on site ``N + 1``."""
    if bra.boundary != ket.boundary or bra.n_sites != ket.n_sites:
        raise ValueError("bra and ket must share boundary kind and size")
    n = ket.n_sites
    chi = ket.chi
    pref = np.conj(bra.scale) * ket.scale
    if ket.boundary == "trace":
        links = dict(links or {})
        if 0 in links:
            if n in links:
                raise ValueError("links 0 and N coincide for the trace boundary")
            links[n] = links.pop(0)
        yb, yk = links.get(n, (None, None))
        yb = bra.bmat if yb is None else yb @ bra.bmat
        yk = ket.bmat if yk is None else yk @ ket.bmat
        links[n] = (yb, yk)
        total = transfer_product(bra.tensors, ket.tensors, n, sites, links)
        return complex(pref * np.trace(total))
    top = np.eye(chi, dtype=complex) if edge is None else np.asarray(edge, dtype=complex)
    total = transfer_product(bra.tensors, ket.tensors, n, sites, links)
    x = (total @ top.reshape(-1)).reshape(chi, chi)
    return complex(pref * (bra.bmat.conj() @ x @ ket.bmat))


def norm_squared(state: Mps) -> float:
    return float(np.real(overlap(state, state)))


def normalized(state: Mps) -> Mps:
    nrm = np.sqrt(norm_squared(state.with_scale(1.0)))
    return state.with_scale(1.0 / nrm)


def to_dense(state: Mps) -> np.ndarray:
    """Full state vector, site 1 most significant (edge site last for hbc)."""
    a = state.tensors
    chi = state.chi
    acc = np.eye(chi, dtype=complex)[None]  # acc[k] = A^{i_n} ... A^{i_1}
    for _ in range(state.n_sites):
        acc = np.einsum("ibc,kca->kiba", a, acc).reshape(-1, chi, chi)
    if state.boundary == "trace":
        vec = np.einsum("ab,kba->k", state.bmat, acc)
    else:
        vec = (acc @ state.bmat).reshape(-1)
    return state.scale * vec


def reduced_density(state: Mps, start: int, width: int) -> np.ndarray:
    """Reduced density operator of sites ``start .. start + width - 1``.

    Not divided by the state norm; site ``start`` is the most significant factor.
    """
    n = state.n_sites
    if start < 1 or width < 1 or start + width - 1 > n:
        raise ValueError("window outside the chain")
    a = state.tensors
    chi, p = state.chi, state.phys
    plain = site_superop(a, a)
    # open[k, l] = superoperator of X -> A^{k dagger} X A^l
    open_ = np.einsum("kba,ldc->klacbd", a.conj(), a).reshape(p, p, chi * chi, chi * chi)
    win = open_
    for _ in range(width - 1):
        win = np.einsum("klxy,mnyz->kmlnxz", win, open_)
        win = win.reshape(win.shape[0] * p, win.shape[2] * p, chi * chi, chi * chi)
    below = np.linalg.matrix_power(plain, start - 1)
    above = np.linalg.matrix_power(plain, n - start - width + 1)
    if state.boundary == "trace":
        close = above @ bond_superop(chi, state.bmat, state.bmat) @ below
        rho = np.einsum("klxy,yx->kl", win, close)
    else:
        top = above @ np.eye(chi, dtype=complex).reshape(-1)
        bottom = (np.outer(state.bmat.conj(), state.bmat).reshape(-1)) @ below
        rho = np.einsum("x,klxy,y->kl", bottom, win, top)
    # rho[k, l] = conj(c_k) c_l, so the density matrix is its transpose
    return abs(state.scale) ** 2 * rho.T


def doubled_site_superop(bra1, ket1, bra2, ket2) -> np.ndarray:
    """Transfer superoperator of ``<bra1|..|ket1> * conj(<bra2|..|ket2>)``."""
    return np.kron(site_superop(bra1, ket1), site_superop(bra2, ket2).conj())


def doubled_bond_superop(kraus1, kraus2) -> np.ndarray:
    """``sum_k L(z1_k) (x) conj(L(z2_k))`` for paired ket-side bond operators."""
    chi1, chi2 = kraus1[0].shape[0], kraus2[0].shape[0]
    return sum(
        np.kron(bond_superop(chi1, None, z1), bond_superop(chi2, None, z2).conj())
        for z1, z2 in zip(kraus1, kraus2)
    )


def placement_sum(
    plain: np.ndarray,
    event: np.ndarray,
    top: np.ndarray,
    n_sites: int,
    weight: int,
    links=None,
) -> np.ndarray:
    """Sum over all ways of placing ``weight`` events on distinct ``links``.

    Evaluates ``sum K_1 L_1 K_2 ... K_N L_N top`` where each ``L_n`` is either the
    identity or ``event`` and exactly ``weight`` of the allowed links carry the
    event.  ``top`` is a matrix (trace closure) or a vector (open closure).
    Link ``N`` is applied first, directly on ``top``.
    """
    allowed = set(range(1, n_sites + 1)) if links is None else set(links)
    if weight < 0 or weight > len(allowed):
        raise ValueError("weight exceeds the number of allowed links")
    acc = [top] + [np.zeros_like(top) for _ in range(weight)]

    def hit(acc):
        return [acc[0]] + [acc[j] + event @ acc[j - 1] for j in range(1, weight + 1)]

    if n_sites in allowed:
        acc = hit(acc)
    for n in range(n_sites, 0, -1):
        acc = [plain @ x for x in acc]
        if n - 1 in allowed:
            acc = hit(acc)
    return acc[weight]
