"""Exact, approximate and quasi error correction on explicit code spaces.

Everything except the dense round trip is expressed through the logical blocks
``G_ij = V^dagger E_i^dagger E_j V`` (``V`` the encoding, ``E_i`` the noise Kraus
operators).  Codes too large for dense matrices (the VBS codes) supply these
blocks from tensor-network contractions and reuse the same analysis.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .channels import (
    ATOL,
    ChannelError,
    Instrument,
    KrausMap,
    choi_of,
    dagger,
    maximally_entangled,
    matrix_to_json,
    trace_distance,
)

TRUNCATION = 1e-12


def _inv_sqrt(m: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh((m + dagger(m)) / 2)
    return (v / np.sqrt(w)) @ dagger(v)


def _sqrt(m: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh((m + dagger(m)) / 2)
    return (v * np.sqrt(np.clip(w, 0, None))) @ dagger(v)


@dataclass(frozen=True)
class CodeSpace:
    """Encoding ``V`` (columns are codewords) of a ``d_L``-dimensional logical space."""

    isometry: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.isometry, dtype=complex)
        if v.ndim != 2 or v.shape[1] > v.shape[0]:
            raise ChannelError("isometry must be dim_physical x d_L with d_L <= dim_physical")
        v.setflags(write=False)
        object.__setattr__(self, "isometry", v)
        if np.linalg.matrix_rank(v) < v.shape[1]:
            raise ChannelError("codewords are linearly dependent")

    @classmethod
    def from_codewords(cls, vectors: Sequence[np.ndarray], normalize: bool = True) -> "CodeSpace":
        cols = [np.asarray(x, dtype=complex) for x in vectors]
        if normalize:
            cols = [c / np.linalg.norm(c) for c in cols]
        return cls(np.stack(cols, axis=1))

    @property
    def dim_logical(self) -> int:
        return int(self.isometry.shape[1])

    @property
    def dim_physical(self) -> int:
        return int(self.isometry.shape[0])

    @property
    def gram(self) -> np.ndarray:
        return dagger(self.isometry) @ self.isometry

    @property
    def delta(self) -> np.ndarray:
        return self.gram - np.eye(self.dim_logical)

    @property
    def is_exact(self) -> bool:
        return float(np.max(np.abs(self.delta))) <= ATOL

    @property
    def orthonormal(self) -> np.ndarray:
        """``V (V^dagger V)^(-1/2)``: the closest isometry with the same span."""
        return self.isometry @ _inv_sqrt(self.gram)

    @property
    def projector(self) -> np.ndarray:
        """Exact projector ``V (V^dagger V)^(-1) V^dagger`` onto the code span."""
        v = self.isometry
        return v @ np.linalg.solve(self.gram, dagger(v))

    @property
    def first_order_projector(self) -> np.ndarray:
        """``V V^dagger``, idempotent only up to ``K = V Delta V^dagger``."""
        return self.isometry @ dagger(self.isometry)

    @property
    def leakage(self) -> np.ndarray:
        """``K = P^2 - P`` for the first-order projector ``P = V V^dagger``."""
        p = self.first_order_projector
        return p @ p - p


def repetition_code(n: int = 3) -> CodeSpace:
    """Bit-flip repetition code ``|0..0>, |1..1>`` on ``n`` qubits."""
    v = np.zeros((2**n, 2), dtype=complex)
    v[0, 0] = 1.0
    v[-1, 1] = 1.0
    return CodeSpace(v)


def local_operator(op: np.ndarray, site: int, n_sites: int, local_dim: int = 2) -> np.ndarray:
    """``op`` on ``site`` (0-based) of ``n_sites`` subsystems, identity elsewhere."""
    left = np.eye(local_dim**site)
    right = np.eye(local_dim ** (n_sites - site - 1))
    return np.kron(np.kron(left, op), right)


def noise_blocks(code: CodeSpace, noise: KrausMap) -> np.ndarray:
    """``G_ij = V^dagger E_i^dagger E_j V`` with shape ``(r, r, d_L, d_L)``."""
    if noise.dim_in != code.dim_physical or noise.dim_out != code.dim_physical:
        raise ChannelError("noise dimensions do not match the code")
    ev = np.einsum("kij,jl->kil", noise.kraus, code.isometry)
    return np.einsum("kia,lib->klab", ev.conj(), ev)


# --------------------------------------------------------------------------
# detection
# --------------------------------------------------------------------------

class Detection(NamedTuple):
    coefficients: np.ndarray | None
    residual: float
    residuals: np.ndarray


def detect_coefficients(code: CodeSpace, noise: KrausMap, tol: float = 1e-9) -> Detection:
    """Check ``P E_i P = e_i P`` (``e_i P^2`` for quasi encodings with ``P = V V^dagger``).

    In logical coordinates the condition reads ``V^dagger E_i V = e_i V^dagger V``.
    """
    if noise.dim_in != code.dim_physical:
        raise ChannelError("noise dimensions do not match the code")
    v = code.isometry
    gram = code.gram
    blocks = np.einsum("ia,kij,jb->kab", v.conj(), noise.kraus, v)
    coeffs = np.einsum("kaa->k", blocks) / np.trace(gram)
    res = np.array([np.linalg.norm(b - c * gram, 2) for b, c in zip(blocks, coeffs)])
    worst = float(res.max())
    return Detection(coeffs if worst <= tol else None, worst, res)


# --------------------------------------------------------------------------
# analysis
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class QecAnalysis:
    """Code matrix, traceless residuals and the diagonalising rotation of the noise.

    ``blocks`` and ``rotated_blocks`` are in the (possibly non-orthonormal) codeword
    basis; ``normalized_residuals`` are in the orthonormalised basis.
    """

    code_matrix: np.ndarray
    residuals: np.ndarray
    diag: np.ndarray
    basis_rotation: np.ndarray
    blocks: np.ndarray
    rotated_blocks: np.ndarray
    gram: np.ndarray
    rotated_kraus: np.ndarray | None = None
    retained: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=int))

    @property
    def dim_logical(self) -> int:
        return int(self.gram.shape[0])

    @property
    def max_residual(self) -> float:
        return float(np.max(np.abs(self.residuals))) if self.residuals.size else 0.0

    @property
    def exact(self) -> bool:
        return self.max_residual <= ATOL

    def orthonormal_blocks(self) -> np.ndarray:
        s = _inv_sqrt(self.gram)
        return np.einsum("ab,klbc,cd->klad", s, self.rotated_blocks, s)

    def normalized_residuals(self) -> np.ndarray:
        """``(G~_kl - d_k delta_kl 1) / sqrt(d_k d_l)`` over retained ``k, l``."""
        keep = self.retained
        dk = self.diag[keep]
        g = self.orthonormal_blocks()[np.ix_(keep, keep)]
        eye = np.eye(self.dim_logical)
        out = g - np.einsum("k,kl,ab->klab", dk, np.eye(len(keep)), eye)
        return out / np.sqrt(np.outer(dk, dk))[:, :, None, None]

    def analytic_distance(self, quasi: bool = False) -> float:
        """``(1 / 2 d_L) sum_kl d_k tr(B^dagger_kl B_kl)``.

        With ``quasi`` the residuals are dressed as ``(1 + Delta) B (1 + Delta)``.
        """
        b = self.normalized_residuals()
        if quasi:
            b = np.einsum("ab,klbc,cd->klad", self.gram, b, self.gram)
        beta = np.einsum("klab,klab->kl", b.conj(), b).real
        dk = self.diag[self.retained]
        return float(np.sum(dk[:, None] * beta) / (2 * self.dim_logical))

    def to_json(self) -> dict:
        return {
            "code_matrix": matrix_to_json(self.code_matrix),
            "diag": [float(x) for x in self.diag],
            "max_residual": self.max_residual,
            "exact": self.exact,
        }


def analyze_blocks(
    blocks: np.ndarray, gram: np.ndarray | None = None, kraus: np.ndarray | None = None
) -> QecAnalysis:
    """Knill-Laflamme analysis from logical blocks ``G_ij``.

    ``a_ij = tr(G^{-1} G_ij) / d_L`` (the code-space trace of ``P E_i^dagger E_j P``),
    residual ``B_ij = G_ij - a_ij G``, and ``rho* = U diag(d) U^dagger``.
    """
    blocks = np.asarray(blocks, dtype=complex)
    dl = blocks.shape[-1]
    gram = np.eye(dl, dtype=complex) if gram is None else np.asarray(gram, dtype=complex)
    ginv = np.linalg.inv(gram)
    a = np.einsum("ab,klba->kl", ginv, blocks) / dl
    a = (a + dagger(a)) / 2
    resid = blocks - a[:, :, None, None] * gram
    w, u = np.linalg.eigh(a)
    order = np.argsort(w)[::-1]
    w, u = np.clip(w[order], 0.0, None), u[:, order]
    rot = np.einsum("ik,jl,ijab->klab", u.conj(), u, blocks)
    keep = np.flatnonzero(w > TRUNCATION * max(w.max(), TRUNCATION))
    fk = None if kraus is None else np.einsum("ik,iab->kab", u, kraus)
    return QecAnalysis(a, resid, w, u, blocks, rot, gram, fk, keep)


def analyze(code: CodeSpace, noise: KrausMap) -> QecAnalysis:
    return analyze_blocks(noise_blocks(code, noise), code.gram, noise.kraus)


# --------------------------------------------------------------------------
# recovery
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class RecoveryScheme:
    """Recovery ``R_k = P F_k^dagger / sqrt(d_k)`` with syndrome projectors ``P_k``.

    The completion ``R'`` is never built: on code inputs it has no action.
    """

    recovery_ops: np.ndarray
    syndrome_projectors: np.ndarray
    diag: np.ndarray
    completion: bool = False

    def as_kraus(self) -> KrausMap:
        return KrausMap(self.recovery_ops)


def build_recovery(code: CodeSpace, analysis: QecAnalysis, projector: str = "exact") -> RecoveryScheme:
    if analysis.rotated_kraus is None:
        raise ChannelError("analysis carries no physical Kraus operators")
    keep = analysis.retained
    if keep.size == 0:
        raise ChannelError("degenerate noise: every d_k is below the truncation threshold")
    if projector == "exact":
        p = code.projector
    elif projector == "first_order":
        p = code.first_order_projector
    else:
        raise ValueError(f"unknown projector variant {projector!r}")
    fk = analysis.rotated_kraus[keep]
    dk = analysis.diag[keep]
    rec = np.einsum("ij,kjl->kil", p, np.conj(np.transpose(fk, (0, 2, 1)))) / np.sqrt(dk)[:, None, None]
    vt = code.orthonormal
    projs = []
    for f in fk:
        u, _, vh = np.linalg.svd(f @ vt, full_matrices=False)
        w = u @ vh
        projs.append(w @ dagger(w))
    return RecoveryScheme(rec, np.array(projs), dk)


def logical_kraus(code: CodeSpace, noise: KrausMap, recovery: RecoveryScheme,
                  scheme: str = "anonymous", analysis: QecAnalysis | None = None,
                  basis: str = "orthonormal") -> KrausMap:
    """Kraus operators of ``V^dagger R N V`` on the logical space.

    ``anonymous`` sums all ``R_k E_l``; ``selective`` pairs ``R_k`` with ``F_k``.
    ``basis="orthonormal"`` uses the orthonormalised encoding, ``"codeword"`` the raw ``V``.
    """
    v = code.orthonormal if basis == "orthonormal" else code.isometry
    if scheme == "anonymous":
        ops = np.einsum("ia,kij,ljm,mb->klab", v.conj(), recovery.recovery_ops, noise.kraus, v)
        ops = ops.reshape(-1, code.dim_logical, code.dim_logical)
    elif scheme == "selective":
        if analysis is None or analysis.rotated_kraus is None:
            raise ChannelError("selective scheme needs the rotated noise operators")
        fk = analysis.rotated_kraus[analysis.retained]
        ops = np.einsum("ia,kij,kjm,mb->kab", v.conj(), recovery.recovery_ops, fk, v)
    else:
        raise ValueError(f"unknown scheme {scheme!r}")
    return KrausMap(ops)


def _identity_choi(dim: int) -> np.ndarray:
    return maximally_entangled(dim)


class Roundtrip(NamedTuple):
    logical: KrausMap
    distance: float
    analytic: float
    reference_distance: float
    analytic_quasi: float

    def to_json(self) -> dict:
        return {
            "distance": self.distance,
            "analytic": self.analytic,
            "reference_distance": self.reference_distance,
            "analytic_quasi": self.analytic_quasi,
        }


def _gram_map_choi(gram: np.ndarray) -> np.ndarray:
    return choi_of(KrausMap.from_list([gram])).matrix


def roundtrip(code: CodeSpace, noise: KrausMap | Instrument, recovery: RecoveryScheme | None = None,
              scheme: str = "anonymous", projector: str = "exact") -> Roundtrip:
    """Encode, apply noise, recover, decode.

    ``distance`` is the Choi trace distance of the orthonormal-basis logical map to
    the identity; ``reference_distance`` compares the codeword-basis map
    ``V^dagger Q V`` with ``V^dagger V``.  Analytic values come from the normalised
    residuals.  An instrument is corrected branch by branch and the branch maps summed.
    """
    if isinstance(noise, Instrument):
        if recovery is not None:
            raise ChannelError("instrument branches build their own recoveries")
        parts = [roundtrip(code, m, None, scheme, projector) for _, m in noise.branches]
        ops = np.concatenate([p.logical.kraus for p in parts])
        logical = KrausMap(ops)
        raw = [_codeword_map(code, m, None, scheme, projector) for _, m in noise.branches]
        raw_ops = np.concatenate([r.kraus for r in raw])
        ref = trace_distance(choi_of(KrausMap(raw_ops)).matrix, _gram_map_choi(code.gram))
        return Roundtrip(
            logical,
            trace_distance(choi_of(logical).matrix, _identity_choi(code.dim_logical)),
            sum(p.analytic for p in parts),
            ref,
            sum(p.analytic_quasi for p in parts),
        )
    analysis = analyze(code, noise)
    if recovery is None:
        recovery = build_recovery(code, analysis, projector)
    logical = logical_kraus(code, noise, recovery, scheme, analysis)
    raw = logical_kraus(code, noise, recovery, scheme, analysis, basis="codeword")
    dist = trace_distance(choi_of(logical).matrix, _identity_choi(code.dim_logical))
    ref = trace_distance(choi_of(raw).matrix, _gram_map_choi(code.gram))
    return Roundtrip(logical, dist, analysis.analytic_distance(), ref, analysis.analytic_distance(quasi=True))


def _codeword_map(code, noise, recovery, scheme, projector) -> KrausMap:
    analysis = analyze(code, noise)
    recovery = build_recovery(code, analysis, projector) if recovery is None else recovery
    return logical_kraus(code, noise, recovery, scheme, analysis, basis="codeword")


def logical_map_from_blocks(analysis: QecAnalysis) -> np.ndarray:
    """Superoperator (row-major) of the anonymous-scheme logical map from blocks alone."""
    keep = analysis.retained
    g = analysis.orthonormal_blocks()
    dk = analysis.diag[keep]
    ks = g[keep][:, keep] / np.sqrt(dk)[:, None, None, None]
    ks = ks.reshape(-1, analysis.dim_logical, analysis.dim_logical)
    return np.einsum("kab,kcd->acbd", ks, ks.conj()).reshape(analysis.dim_logical**2, -1)


def choi_from_superop(superop: np.ndarray) -> np.ndarray:
    """Choi matrix ``(Phi (x) 1)(omega)`` of a row-major superoperator."""
    d = int(round(np.sqrt(superop.shape[1])))
    dout = superop.shape[0] // d
    s = superop.reshape(dout, dout, d, d)
    return np.einsum("acbd->abcd", s).reshape(dout * d, dout * d) / d


def superop_distance(superop: np.ndarray) -> float:
    """Choi trace distance of a logical superoperator to the identity channel."""
    d = int(round(np.sqrt(superop.shape[1])))
    return trace_distance(choi_from_superop(superop), maximally_entangled(d))


def qec_instrument(code: CodeSpace, noise: KrausMap, recovery: RecoveryScheme) -> list[KrausMap]:
    """Per-syndrome logical maps ``sigma -> sum_l V^dagger R_k E_l V sigma (...)^dagger``."""
    v = code.orthonormal
    out = []
    for r in recovery.recovery_ops:
        ops = np.einsum("ia,ij,ljm,mb->lab", v.conj(), r, noise.kraus, v)
        out.append(KrausMap(ops))
    return out


# --------------------------------------------------------------------------
# complementary channel, encoding error, Kraus-span sampling
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ComplementaryMap:
    """``rho -> sum_ij tr(rho E_i^dagger E_j) |j><i|`` on logical inputs, as a superoperator."""

    matrix: np.ndarray
    rank: int
    dim_logical: int

    def __call__(self, sigma: np.ndarray) -> np.ndarray:
        return (self.matrix @ np.asarray(sigma).reshape(-1)).reshape(self.rank, self.rank)


def complementary(noise: KrausMap, code: CodeSpace) -> ComplementaryMap:
    vt = code.orthonormal
    ev = np.einsum("kij,jl->kil", noise.kraus, vt)
    g = np.einsum("kia,lib->klab", ev.conj(), ev)  # G_kl
    # out[j, i] = sum_ab sigma_ab G_ij[b, a]
    m = np.einsum("ijba->jiab", g).reshape(noise.rank**2, code.dim_logical**2)
    return ComplementaryMap(m, noise.rank, code.dim_logical)


def encoding_error(code: CodeSpace) -> float:
    """``sqrt(sum_{i != j} |<psi_i|psi_j>|^2) / (2 sqrt(d_L))`` for normalised codewords."""
    g = code.gram
    off = g - np.diag(np.diag(g))
    return float(np.sqrt(np.sum(np.abs(off) ** 2)) / (2 * np.sqrt(code.dim_logical)))


def encoding_error_from_choi(code: CodeSpace) -> float:
    """Encoding error read off the Choi matrix of ``sigma -> V sigma V^dagger``.

    The partial trace of the Choi matrix over the physical factor is
    ``(V^dagger V)^T / d_L``; its deviation from ``1 / d_L`` gives ``delta`` and the
    first-order distance ``sqrt(tr delta^2) / (2 sqrt(d_L))``.
    """
    enc = KrausMap.from_list([code.isometry / np.sqrt(np.real(np.diag(code.gram)))[None, :]])
    choi = choi_of(enc).matrix
    dl = code.dim_logical
    reduced = np.einsum("aiaj->ij", choi.reshape(code.dim_physical, dl, code.dim_physical, dl))
    delta = dl * reduced.T - np.eye(dl)
    return float(np.sqrt(np.real(np.trace(delta @ delta)))) / (2 * np.sqrt(dl))


class SpanSample(NamedTuple):
    map: KrausMap
    trace_preserving: bool


def span_sample(noise: KrausMap, seed: int, strength: float = 0.9) -> SpanSample:
    """Random CP map whose Kraus operators lie in the span of ``noise``'s.

    Kraus operators ``F = C E`` with ``C^dagger C = M``.  For TP input the Gram
    constraint ``sum M_ij E_i^dagger E_j = 1`` is kept by moving ``M`` away from the
    identity inside the null space of the constraint, then mixing with a Haar
    unitary.  Non-TP input gets a random ``M`` scaled to be trace non-increasing.
    """
    kr = noise.kraus
    if not np.any(np.abs(kr) > 0):
        raise ChannelError("degenerate span: all Kraus operators vanish")
    rng = np.random.default_rng(seed)
    r = noise.rank
    prods = np.einsum("iab,jac->ijbc", kr.conj(), kr).reshape(r * r, -1)
    z = rng.normal(size=(r, r)) + 1j * rng.normal(size=(r, r))
    unitary, rr = np.linalg.qr(z)
    unitary = unitary * (np.diag(rr) / np.abs(np.diag(rr)))
    if noise.is_tp():
        _, s, vh = np.linalg.svd(prods.T)
        null = vh[np.sum(s > 1e-10 * s.max()):].conj()
        m = np.eye(r, dtype=complex)
        if len(null):
            y = (rng.normal(size=len(null)) + 1j * rng.normal(size=len(null))) @ null
            x = y.reshape(r, r)
            x = (x + dagger(x)) / 2
            top = np.max(np.abs(np.linalg.eigvalsh(x)))
            if top > 1e-14:
                m = m + rng.uniform(0, strength) * x / top
        c = unitary @ _sqrt(m)
        return SpanSample(KrausMap(np.einsum("ki,iab->kab", c, kr)), True)
    g = rng.normal(size=(r, r)) + 1j * rng.normal(size=(r, r))
    m = g @ dagger(g)
    total = np.einsum("ij,iba,jbc->ac", m, kr.conj(), kr)
    m = m / max(np.linalg.eigvalsh((total + dagger(total)) / 2).max(), 1e-300)
    c = unitary @ _sqrt(m)
    return SpanSample(KrausMap(np.einsum("ki,iab->kab", c, kr)), False)
