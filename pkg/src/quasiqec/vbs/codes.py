"""Holographic, edge and bulk codes built from SU(d) VBS matrix-product states."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .algebra import adjoint_rotation, su_basis
from .mps import Mps, norm_squared, overlap, to_dense

KINDS = ("holographic", "edge", "bulk")


def vbs_tensors(d: int) -> np.ndarray:
    """Site tensors ``A^i = sqrt(2d / D) t^i`` of shape ``(D, d, d)``."""
    b = su_basis(d)
    return np.sqrt(2.0 * d / b.D) * np.asarray(b.t)


def ground_state(d: int, n_sites: int, conjugate: bool = False) -> Mps:
    """Periodic VBS ground state ``tr(A^{i_N} ... A^{i_1})`` (``A^*`` if ``conjugate``)."""
    a = vbs_tensors(d)
    return Mps(a.conj() if conjugate else a, n_sites, "trace")


@dataclass(frozen=True)
class MpsCode:
    """A VBS code: normalised codewords sharing the bulk tensors ``A^i`` (or ``A^{i*}``)."""

    d: int
    n_sites: int
    kind: str
    codewords: tuple[Mps, ...]
    labels: tuple[str, ...]
    edge_ref: int = 0

    @property
    def basis(self):
        return su_basis(self.d)

    @property
    def tensors(self) -> np.ndarray:
        return vbs_tensors(self.d)

    @property
    def dim_logical(self) -> int:
        return len(self.codewords)

    @property
    def chi(self) -> float:
        return self.basis.chi

    def gram(self) -> np.ndarray:
        n = self.dim_logical
        return np.array([[overlap(self.codewords[i], self.codewords[j]) for j in range(n)] for i in range(n)])

    def superposition(self, coeffs: Sequence[complex]) -> Mps:
        """MPS of ``sum_k c_k |psi_k>`` (codewords normalised).

        Edge and holographic codes combine boundary vectors; the bulk code uses the
        block-diagonal ``2d`` tensors ``A^i (+) A^{i*}`` with a diagonal boundary matrix.
        """
        c = np.asarray(coeffs, dtype=complex)
        if c.shape != (self.dim_logical,):
            raise ValueError("need one coefficient per codeword")
        if self.kind == "bulk":
            a = self.tensors
            z = np.zeros_like(a)
            block = np.block([[a, z], [z, a.conj()]])
            scales = [cw.scale for cw in self.codewords]
            bmat = np.diag(np.repeat(c * np.array(scales), self.d))
            return Mps(block, self.n_sites, "trace", bmat)
        vec = sum(ck * cw.scale * (cw.bmat[:, 0] if cw.boundary == "trace" else cw.bmat)
                  for ck, cw in zip(c, self.codewords))
        first = self.codewords[0]
        if first.boundary == "trace":
            r = np.zeros(self.d, dtype=complex)
            r[self.edge_ref] = 1.0
            return Mps(first.tensors, self.n_sites, "trace", np.outer(vec, r))
        return Mps(first.tensors, self.n_sites, "hbc", vec)

    def dense_isometry(self) -> np.ndarray:
        return np.stack([to_dense(cw) for cw in self.codewords], axis=1)


def _normalised(state: Mps) -> Mps:
    return state.with_scale(1.0 / np.sqrt(norm_squared(state.with_scale(1.0))))


def build_code(d: int, n_sites: int, kind: str, edge_ref: int = 0) -> MpsCode:
    """Codewords of the holographic (``|l> = |alpha>`` plus edge site), edge
    (``<r| ... |alpha>`` with ``|r>`` a fixed basis state) or bulk (``G_L``, ``G_R``) code."""
    if kind not in KINDS:
        raise ValueError(f"unknown code kind {kind!r}")
    if n_sites < 1 or (kind != "holographic" and n_sites < 2):
        raise ValueError("system too small")
    a = vbs_tensors(d)
    eye = np.eye(d, dtype=complex)
    if kind == "holographic":
        words = tuple(Mps(a, n_sites, "hbc", eye[k]) for k in range(d))
        return MpsCode(d, n_sites, kind, words, tuple(str(k) for k in range(d)))
    if kind == "edge":
        if not 0 <= edge_ref < d:
            raise ValueError("edge reference state out of range")
        words = tuple(_normalised(Mps(a, n_sites, "trace", np.outer(eye[k], eye[edge_ref]))) for k in range(d))
        return MpsCode(d, n_sites, kind, words, tuple(str(k) for k in range(d)), edge_ref)
    if d < 3:
        raise ValueError("the bulk code needs d >= 3 (the d = 2 ground state is unique)")
    words = (_normalised(ground_state(d, n_sites)), _normalised(ground_state(d, n_sites, True)))
    return MpsCode(d, n_sites, kind, words, ("L", "R"))


# --------------------------------------------------------------------------
# expectations
# --------------------------------------------------------------------------

def expectation(
    state: Mps | MpsCode,
    placements: Sequence[tuple[int, np.ndarray]] = (),
    alpha: int = 0,
    beta: int | None = None,
    bra: Mps | None = None,
) -> complex:
    """``<bra| prod O_site |ket>`` by transfer-matrix contraction.

    For a code, ``bra``/``ket`` are codewords ``alpha``/``beta``; for a plain state
    the same state is used on both sides unless ``bra`` is given.
    """
    if isinstance(state, MpsCode):
        ket = state.codewords[alpha if beta is None else beta]
        bra = state.codewords[alpha]
    else:
        ket = state
        bra = state if bra is None else bra
    sites: dict[int, np.ndarray] = {}
    for n, op in placements:
        op = np.asarray(op)
        if n in sites:
            raise ValueError(f"site {n} appears twice")
        if op.shape != (ket.phys, ket.phys):
            raise ValueError("operator shape does not match the physical dimension")
        sites[n] = op
    return overlap(bra, ket, sites=sites)


def two_site_expectation(state: Mps, n: int, m: int, op: np.ndarray) -> complex:
    """Normalised ``<op>`` of a two-site operator on sites ``n`` (first factor) and ``m``."""
    p = state.phys
    t = np.asarray(op).reshape(p, p, p, p).transpose(0, 2, 1, 3).reshape(p * p, p * p)
    u, s, vh = np.linalg.svd(t)
    total = 0.0
    for k in np.flatnonzero(s > 1e-14 * s[0]):
        left = (u[:, k] * s[k]).reshape(p, p)
        right = vh[k].reshape(p, p)
        total += overlap(state, state, sites={n: left, m: right})
    return complex(total / norm_squared(state))


def bond_hamiltonians(d: int) -> tuple[np.ndarray, np.ndarray]:
    """``h = sum_a T^a (x) T^a`` and ``H = h + (2 / 3d) h^2`` on two adjoint sites."""
    b = su_basis(d)
    h = np.einsum("aij,akl->ikjl", b.adjoint, b.adjoint).reshape(b.D**2, b.D**2)
    return h, h + (2.0 / (3 * d)) * h @ h


def link_energies(d: int, n_sites: int, site: int | None = None) -> tuple[float, float]:
    """``<h>`` and ``<h^2>`` on the link ``(site, site + 1)`` of the periodic ground state."""
    state = ground_state(d, n_sites)
    n = n_sites // 2 if site is None else site
    h, _ = bond_hamiltonians(d)
    e1 = two_site_expectation(state, n, n + 1, h)
    e2 = two_site_expectation(state, n, n + 1, h @ h)
    return float(e1.real), float(e2.real)


def correlation(d: int, n_sites: int, a: int, b: int, n: int, m: int) -> float:
    """``<T^a_n T^b_m>`` on the normalised periodic ground state."""
    state = ground_state(d, n_sites)
    t = su_basis(d).adjoint
    val = overlap(state, state, sites={n: t[a], m: t[b]}) / norm_squared(state)
    return float(np.real(val))


def correlation_formula(d: int, r: int) -> float:
    """``(d^3 / 2D) chi^r`` (diagonal ``a = b``)."""
    D = d * d - 1
    return d**3 / (2.0 * D) * (-1.0 / D) ** r


# --------------------------------------------------------------------------
# bond errors
# --------------------------------------------------------------------------

def _link(n: int, side: str) -> int:
    if side in ("+", "plus"):
        return n
    if side in ("-", "minus"):
        return n - 1
    raise ValueError(f"side must be '+' or '-', got {side!r}")


def bond_matrix_element(code: MpsCode, a: int, n: int, side: str, alpha: int, beta: int) -> complex:
    """``<psi_alpha| t^a_{n side} |psi_beta>`` with ``t^a`` on the virtual bond (``a`` 0-based)."""
    if code.kind == "bulk":
        raise ValueError("bond matrix elements are defined for edge and holographic codes")
    link = _link(n, side)
    if not 0 <= link <= code.n_sites:
        raise ValueError("invalid link")
    t = su_basis(code.d).t[a]
    return overlap(code.codewords[alpha], code.codewords[beta], links={link: (None, t)})


def bond_pair_element(code: MpsCode, a: int, m: int, b: int, n: int, alpha: int, beta: int) -> complex:
    """``<psi_alpha| t^a_{m+} t^b_{n+} |psi_beta>`` for ``m < n``."""
    if not m < n:
        raise ValueError("need m < n")
    t = su_basis(code.d).t
    return overlap(code.codewords[alpha], code.codewords[beta], links={m: (None, t[a]), n: (None, t[b])})


def bond_formula(d: int, a: int, n: int, alpha: int, beta: int, side: str = "+") -> complex:
    b = su_basis(d)
    return b.chi ** _link(n, side) * b.t[a][alpha, beta]


def bond_pair_formula(d: int, a: int, m: int, b: int, n: int, alpha: int, beta: int) -> complex:
    """``chi^(n-m) delta_ab delta_alpha_beta / 2d + chi^n h_bac t^c_alpha_beta / 2``."""
    s = su_basis(d)
    first = s.chi ** (n - m) * (a == b) * (alpha == beta) / (2 * d)
    second = s.chi**n * np.einsum("c,c->", s.h[b, a], s.t[:, alpha, beta]) / 2
    return complex(first + second)


# --------------------------------------------------------------------------
# edge states, gates, parity
# --------------------------------------------------------------------------

def transfer_channel(d: int, rho: np.ndarray, steps: int = 1) -> np.ndarray:
    a = vbs_tensors(d)
    for _ in range(steps):
        rho = np.einsum("iab,bc,idc->ad", a, rho, a.conj())
    return rho


def edge_state(code: MpsCode, n: int, alpha: int | np.ndarray = 0) -> tuple[np.ndarray, np.ndarray | None]:
    """Edge state ``sigma_n = E^(n-1)(|alpha><alpha|)`` and the one-site state
    ``rho_n = sum_ij tr(sigma_n A^j A^i) |i><j|`` (None for ``n = N + 1``)."""
    if code.kind != "holographic":
        raise ValueError("edge states are defined for the holographic code")
    if not 1 <= n <= code.n_sites + 1:
        raise ValueError("n outside [1, N + 1]")
    if np.ndim(alpha) == 0:
        vec = np.eye(code.d, dtype=complex)[int(alpha)]
    else:
        vec = np.asarray(alpha, dtype=complex)
    sigma = transfer_channel(code.d, np.outer(vec, vec.conj()), n - 1)
    if n == code.n_sites + 1:
        return sigma, None
    a = code.tensors
    rho = np.einsum("ab,jbc,ica->ij", sigma, a, a)
    return sigma, rho


def edge_state_formula(d: int, n_sites: int, alpha: int) -> np.ndarray:
    """``1/d + 2 chi^N sum_a t^a t^a_alpha_alpha``."""
    b = su_basis(d)
    return np.eye(d) / d + 2 * b.chi**n_sites * np.einsum("aij,a->ij", b.t, b.t[:, alpha, alpha])


@dataclass(frozen=True)
class GateCheck:
    rotation: np.ndarray
    symmetry_residual: float
    logical: np.ndarray | None
    logical_residual: float


def transversal_gate(code: MpsCode, g: np.ndarray) -> GateCheck:
    """Check the SU(d) symmetry ``sum_j u_ij(g) A^j = g^dagger A^i g`` and the logical action.

    For the holographic code the transversal operator ``u(g)`` on every bulk
    site together with ``g`` on the edge site maps ``|psi_alpha>`` to
    ``sum_beta g_beta_alpha |psi_beta>``; ``logical`` holds the contracted matrix
    ``<psi_beta| U |psi_alpha>`` which must equal ``g``.  The edge code only gets
    the tensor check.  For the bulk code
    ``u(g)`` on every site must leave the codeword overlap matrix unchanged.
    """
    g = np.asarray(g, dtype=complex)
    if not np.allclose(g.conj().T @ g, np.eye(code.d), atol=1e-10) or abs(np.linalg.det(g) - 1) > 1e-10:
        raise ValueError("g must be special unitary")
    u = adjoint_rotation(g)
    a = code.tensors
    rotated = np.einsum("ij,jab->iab", u, a)
    sym = float(np.max(np.abs(rotated - g.conj().T @ a @ g)))
    n = code.dim_logical
    if code.kind == "bulk":
        words = code.codewords
        moved = [Mps(np.einsum("ij,jab->iab", u, w.tensors), w.n_sites, w.boundary, w.bmat, w.scale) for w in words]
        logical = np.array([[overlap(words[i], moved[j]) for j in range(n)] for i in range(n)])
        return GateCheck(u, sym, logical, float(np.max(np.abs(logical - code.gram()))))
    if code.kind == "edge":
        # the fixed right boundary state is not invariant, so only the tensor condition applies
        return GateCheck(u, sym, None, float("nan"))
    sites = {k: u for k in range(1, code.n_sites + 1)}
    words = code.codewords
    logical = np.array([[overlap(words[i], words[j], sites=sites, edge=g) for j in range(n)] for i in range(n)])
    return GateCheck(u, sym, logical, float(np.max(np.abs(logical - g))))


@dataclass(frozen=True)
class ParityCheck:
    fidelity: float
    tensor_residual: float
    sign: int
    square_residual: float
    hamiltonian_residual: float


def parity_operator(d: int) -> np.ndarray:
    return su_basis(d).parity_operator


def bulk_logical_x(code: MpsCode) -> ParityCheck:
    """Apply ``Pi`` on every site of ``|G_L>`` and compare with ``|G_R>``."""
    if code.kind != "bulk":
        raise ValueError("logical X by parity is defined for the bulk code")
    pi = parity_operator(code.d)
    a = code.tensors
    mapped = np.einsum("ij,jab->iab", pi, a)
    tensor_res = float(np.max(np.abs(mapped + a.conj())))
    gl, gr = code.codewords
    flipped = Mps(mapped, gl.n_sites, gl.boundary, gl.bmat, gl.scale)
    ov = overlap(gr, flipped)
    fid = abs(ov) / np.sqrt(norm_squared(gr) * norm_squared(flipped))
    h, _ = bond_hamiltonians(code.d)
    pp = np.kron(pi, pi)
    return ParityCheck(
        float(fid),
        tensor_res,
        int(np.sign(np.real(ov))),
        float(np.max(np.abs(pi @ pi - np.eye(len(pi))))),
        float(np.max(np.abs(pp @ h @ pp - h))),
    )


# --------------------------------------------------------------------------
# readout
# --------------------------------------------------------------------------

def readout_energy(d: int, n_sites: int, f: np.ndarray, g: np.ndarray) -> float:
    """``<h>`` on the wrap-around link ``(N, 1)`` of the state with boundary ``|f><g|``."""
    a = vbs_tensors(d)
    f = np.asarray(f, dtype=complex)
    g = np.asarray(g, dtype=complex)
    state = Mps(a, n_sites, "trace", np.outer(f, g.conj()))
    h, _ = bond_hamiltonians(d)
    return float(np.real(two_site_expectation(state, n_sites, 1, h)))


def readout_formula(d: int, overlap_sq: float) -> float:
    D = d * d - 1
    return d**3 / (2.0 * D * D) - d**4 / (2.0 * D * D) * overlap_sq


def readout(d: int, n_sites: int, f: np.ndarray, g: np.ndarray) -> float:
    """Estimate ``|<g|f>|^2`` by inverting the wrap-around energy formula."""
    D = d * d - 1
    e = readout_energy(d, n_sites, f, g)
    return (d**3 / (2.0 * D * D) - e) * 2.0 * D * D / d**4


def probe_frame(d: int, seed: int = 0) -> np.ndarray:
    """``d^2`` probe states spanning the operator space (the tetrahedral SIC for d = 2)."""
    if d == 2:
        w = np.exp(2j * np.pi / 3)
        vecs = [np.array([1, 0]), *(np.array([1 / np.sqrt(3), np.sqrt(2 / 3) * w**k]) for k in range(3))]
        return np.array(vecs, dtype=complex)
    rng = np.random.default_rng(seed)
    z = rng.normal(size=(d * d, d)) + 1j * rng.normal(size=(d * d, d))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def reconstruct_state(frame: np.ndarray, probabilities: np.ndarray) -> np.ndarray:
    """Linear inversion of ``p_k = <g_k| rho |g_k>`` over a spanning probe frame."""
    d = frame.shape[1]
    rows = np.array([np.outer(g.conj(), g).reshape(-1) for g in frame])  # p = rows @ vec(rho)
    if np.linalg.matrix_rank(rows) < d * d:
        raise ValueError("probe frame is not informationally complete")
    vec, *_ = np.linalg.lstsq(rows, np.asarray(probabilities, dtype=complex), rcond=None)
    rho = vec.reshape(d, d)
    rho = (rho + rho.conj().T) / 2
    return rho / np.trace(rho).real


def tomography(d: int, n_sites: int, f: np.ndarray, seed: int = 0) -> np.ndarray:
    frame = probe_frame(d, seed)
    probs = np.array([readout(d, n_sites, f, g) for g in frame])
    return reconstruct_state(frame, probs)
