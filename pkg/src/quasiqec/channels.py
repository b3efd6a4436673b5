"""Completely positive maps, instruments, Choi matrices and distance measures.

Conventions
-----------
* Kraus operators are stored as a stacked array of shape ``(rank, dim_out, dim_in)``.
* The Choi matrix of ``phi`` is ``(phi (x) id)(omega)`` with the trace-one
  maximally entangled state ``|omega> = d_in**-1/2 sum_i |ii>``.  The output
  factor comes first, so ``choi.reshape(dout, din, dout, din)``.
* Vectorisation is row-major throughout: ``vec(K)[o * din + i] = K[o, i]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

ATOL = 1e-10


class ChannelError(ValueError):
    """Raised for malformed maps, invalid Choi matrices or dimension mismatches."""


# --------------------------------------------------------------------------
# matrix helpers
# --------------------------------------------------------------------------

def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(m, -1, -2))


def is_hermitian(m: np.ndarray, tol: float = ATOL) -> bool:
    return bool(np.max(np.abs(m - dagger(m)), initial=0.0) <= tol)


def is_unitary(m: np.ndarray, tol: float = ATOL) -> bool:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    return bool(np.max(np.abs(m @ dagger(m) - np.eye(m.shape[0]))) <= tol)


def is_psd(m: np.ndarray, tol: float = ATOL) -> bool:
    if not is_hermitian(m, tol):
        return False
    return bool(np.linalg.eigvalsh((m + dagger(m)) / 2).min() >= -tol)


def is_projector(m: np.ndarray, tol: float = ATOL) -> bool:
    return is_hermitian(m, tol) and bool(np.max(np.abs(m @ m - m)) <= tol)


def psd_sqrt(m: np.ndarray) -> np.ndarray:
    """Square root of a Hermitian PSD matrix, clipping tiny negative eigenvalues."""
    w, v = np.linalg.eigh((m + dagger(m)) / 2)
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ dagger(v)


def trace_norm(m: np.ndarray) -> float:
    return float(np.sum(np.linalg.svd(m, compute_uv=False)))


def trace_distance(a: np.ndarray, b: np.ndarray) -> float:
    """``0.5 * ||a - b||_1`` for Hermitian (not necessarily normalised) operators."""
    diff = a - b
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh((diff + dagger(diff)) / 2))))


def fidelity(a: np.ndarray, b: np.ndarray) -> float:
    """Uhlmann fidelity ``||sqrt(a) sqrt(b)||_1 ** 2`` of two PSD operators."""
    return trace_norm(psd_sqrt(a) @ psd_sqrt(b)) ** 2


def matrix_to_json(m: np.ndarray) -> dict:
    m = np.asarray(m, dtype=complex)
    return {
        "rows": int(m.shape[0]),
        "cols": int(m.shape[1]),
        "re": m.real.ravel().tolist(),
        "im": m.imag.ravel().tolist(),
    }


def matrix_from_json(obj: dict) -> np.ndarray:
    re = np.asarray(obj["re"], dtype=float)
    im = np.asarray(obj["im"], dtype=float)
    return (re + 1j * im).reshape(obj["rows"], obj["cols"])


# --------------------------------------------------------------------------
# core types
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class KrausMap:
    """A completely positive map ``rho -> sum_k K_k rho K_k^dagger``."""

    kraus: np.ndarray
    dim_in: int = field(init=False)
    dim_out: int = field(init=False)

    def __post_init__(self):
        ks = np.asarray(self.kraus, dtype=complex)
        if ks.ndim == 2:
            ks = ks[None]
        if ks.ndim != 3 or ks.shape[0] == 0:
            raise ChannelError("Kraus list must be a nonempty stack of matrices")
        ks.setflags(write=False)
        object.__setattr__(self, "kraus", ks)
        object.__setattr__(self, "dim_out", int(ks.shape[1]))
        object.__setattr__(self, "dim_in", int(ks.shape[2]))

    @classmethod
    def from_list(cls, ops: Sequence[np.ndarray]) -> "KrausMap":
        ops = [np.asarray(o, dtype=complex) for o in ops]
        if not ops:
            raise ChannelError("Kraus list must be nonempty")
        shape = ops[0].shape
        if any(o.shape != shape for o in ops):
            raise ChannelError("all Kraus operators must share one shape")
        return cls(np.stack(ops))

    @classmethod
    def identity(cls, dim: int) -> "KrausMap":
        return cls(np.eye(dim, dtype=complex)[None])

    @classmethod
    def unitary(cls, u: np.ndarray) -> "KrausMap":
        return cls(np.asarray(u, dtype=complex)[None])

    @property
    def rank(self) -> int:
        return int(self.kraus.shape[0])

    def __call__(self, rho: np.ndarray) -> np.ndarray:
        if rho.shape != (self.dim_in, self.dim_in):
            raise ChannelError(f"input of shape {rho.shape} does not match dim_in={self.dim_in}")
        return np.einsum("kij,jl,kml->im", self.kraus, rho, self.kraus.conj())

    def adjoint(self, x: np.ndarray) -> np.ndarray:
        """Heisenberg-picture action ``sum_k K_k^dagger x K_k``."""
        return np.einsum("kji,jl,klm->im", self.kraus.conj(), x, self.kraus)

    def tp_defect(self) -> np.ndarray:
        return self.adjoint(np.eye(self.dim_out)) - np.eye(self.dim_in)

    def is_tp(self, tol: float = ATOL) -> bool:
        return bool(np.max(np.abs(self.tp_defect())) <= tol)

    def superoperator(self) -> np.ndarray:
        """Matrix ``S`` with ``vec(phi(rho)) = S vec(rho)`` (row-major vec)."""
        return np.einsum("kij,kml->imjl", self.kraus, self.kraus.conj()).reshape(
            self.dim_out**2, self.dim_in**2
        )

    def to_json(self) -> dict:
        return {
            "dim_in": self.dim_in,
            "dim_out": self.dim_out,
            "kraus": [matrix_to_json(k) for k in self.kraus],
        }


@dataclass(frozen=True)
class Instrument:
    """Labelled CP maps whose sum is a channel."""

    branches: tuple[tuple[str, KrausMap], ...]

    def __post_init__(self):
        branches = tuple((str(label), m) for label, m in self.branches)
        if not branches:
            raise ChannelError("an instrument needs at least one branch")
        dims = {(m.dim_in, m.dim_out) for _, m in branches}
        if len(dims) != 1:
            raise ChannelError("instrument branches must share dimensions")
        object.__setattr__(self, "branches", branches)
        if not self.total().is_tp():
            raise ChannelError("instrument branches do not sum to a trace-preserving map")

    def total(self) -> KrausMap:
        return KrausMap(np.concatenate([m.kraus for _, m in self.branches]))

    def labels(self) -> list[str]:
        return [label for label, _ in self.branches]

    def __getitem__(self, label: str) -> KrausMap:
        for name, m in self.branches:
            if name == label:
                return m
        raise KeyError(label)


@dataclass(frozen=True)
class ChoiMatrix:
    dim_in: int
    dim_out: int
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        n = self.dim_in * self.dim_out
        if m.shape != (n, n):
            raise ChannelError(f"Choi matrix must be {n}x{n}, got {m.shape}")
        object.__setattr__(self, "matrix", m)

    def partial_trace_output(self) -> np.ndarray:
        t = self.matrix.reshape(self.dim_out, self.dim_in, self.dim_out, self.dim_in)
        return np.einsum("aiaj->ij", t)

    def is_psd(self, tol: float = ATOL) -> bool:
        return is_psd(self.matrix, tol)


def maximally_entangled(dim: int) -> np.ndarray:
    """Density operator of ``|omega> = dim**-1/2 sum_i |ii>``."""
    v = np.eye(dim).reshape(-1) / np.sqrt(dim)
    return np.outer(v, v).astype(complex)


# --------------------------------------------------------------------------
# operations
# --------------------------------------------------------------------------

def choi_of(phi: KrausMap) -> ChoiMatrix:
    vecs = phi.kraus.reshape(phi.rank, -1)
    m = np.einsum("ka,kb->ab", vecs, vecs.conj()) / phi.dim_in
    return ChoiMatrix(phi.dim_in, phi.dim_out, m)


def kraus_from_choi(choi: ChoiMatrix, tol: float = 1e-12) -> KrausMap:
    """Minimal Kraus representation from the eigendecomposition of ``choi``.

    Eigenvalues below ``tol * max(1, lambda_max)`` are discarded; a negative
    eigenvalue beyond that threshold means ``choi`` is not a valid Choi matrix.
    """
    m = choi.matrix
    if not is_hermitian(m, max(tol, ATOL)):
        raise ChannelError("Choi matrix is not Hermitian")
    w, v = np.linalg.eigh((m + dagger(m)) / 2)
    scale = max(1.0, float(np.abs(w).max()))
    if w.min() < -tol * scale:
        raise ChannelError(f"Choi matrix is not PSD (min eigenvalue {w.min():.3e})")
    keep = w > tol * scale
    if not np.any(keep):
        raise ChannelError("Choi matrix is zero within tolerance")
    ks = np.sqrt(choi.dim_in * w[keep])[:, None] * v[:, keep].T
    return KrausMap(ks.reshape(-1, choi.dim_out, choi.dim_in))


@dataclass(frozen=True)
class DistanceReport:
    D_t_choi: float
    F_E: float
    F_G: float
    diamond_lower: float
    diamond_upper: float

    def to_json(self) -> dict:
        return dict(self.__dict__)


def distance_suite(phi: KrausMap, psi: KrausMap) -> DistanceReport:
    if (phi.dim_in, phi.dim_out) != (psi.dim_in, psi.dim_out):
        raise ChannelError("maps must have matching dimensions")
    a = choi_of(phi).matrix
    b = choi_of(psi).matrix
    dt = trace_distance(a, b)
    fe = fidelity(a, b)
    d1 = phi.dim_in
    return DistanceReport(
        D_t_choi=dt,
        F_E=fe,
        F_G=(fe * d1 + 1) / (d1 + 1),
        diamond_lower=2 * dt,
        diamond_upper=2 * d1 * dt,
    )


@dataclass(frozen=True)
class ScptpReport:
    is_scptp: bool
    adjoint_residual: float
    subspace_residual: float
    leak_out: float
    leak_in: float
    code_tp_residual: float
    predicates_agree: bool

    @property
    def block_diagonal(self) -> bool:
        return self.predicates_agree == self.is_scptp


def is_scptp(phi: KrausMap, projector: np.ndarray, tol: float = ATOL) -> ScptpReport:
    """Decide whether ``phi`` is trace preserving on the code space of ``projector``.

    Two independent predicates are evaluated: (i) ``phi^dagger(P) = P`` with
    ``P phi(X) = phi(X)`` on a basis of code-supported inputs, and (ii) every
    Kraus operator is block diagonal in the ``P / (1 - P)`` split with the
    code block trace preserving.  ``leak_out`` is the largest norm of a
    ``(1 - P) K P`` block and ``leak_in`` of a ``P K (1 - P)`` block.
    """
    p = np.asarray(projector, dtype=complex)
    if p.shape != (phi.dim_in, phi.dim_in) or phi.dim_in != phi.dim_out:
        raise ChannelError("projector and map dimensions disagree")
    if not is_projector(p, tol):
        raise ChannelError("input is not a Hermitian idempotent projector")
    q = np.eye(phi.dim_in) - p

    adjoint_res = float(np.max(np.abs(phi.adjoint(p) - p)))
    w, v = np.linalg.eigh(p)
    code_basis = v[:, w > 0.5]
    sub_res = 0.0
    for i in range(code_basis.shape[1]):
        for j in range(code_basis.shape[1]):
            out = phi(np.outer(code_basis[:, i], code_basis[:, j].conj()))
            sub_res = max(sub_res, float(np.max(np.abs(p @ out - out))))
    pred1 = adjoint_res <= tol and sub_res <= tol

    ks = phi.kraus
    leak_out = max(float(np.linalg.norm(q @ k @ p, 2)) for k in ks)
    leak_in = max(float(np.linalg.norm(p @ k @ q, 2)) for k in ks)
    code_tp = float(np.max(np.abs(sum(p @ dagger(k) @ p @ k @ p for k in ks) - p)))
    pred2 = leak_out <= tol and leak_in <= tol and code_tp <= tol
    return ScptpReport(
        is_scptp=pred1,
        adjoint_residual=adjoint_res,
        subspace_residual=sub_res,
        leak_out=leak_out,
        leak_in=leak_in,
        code_tp_residual=code_tp,
        predicates_agree=pred1 == pred2,
    )


class AtpDeviation(NamedTuple):
    distance: float
    max_norm: float
    choi_distance: float


def atp_deviation(phi: KrausMap) -> AtpDeviation:
    """Non-trace-preservation of ``phi`` measured through ``delta = sum K^dagger K - 1``.

    ``distance`` is the first-order closed form ``sqrt(tr delta^2) / (2 sqrt(d_in))``;
    ``choi_distance`` is the exact Choi trace distance between the single-Kraus map
    ``sqrt(1 + delta)`` and the identity, which agrees to first order in ``delta``.
    """
    delta = phi.tp_defect()
    dist = float(np.sqrt(np.real(np.trace(delta @ delta)))) / (2 * np.sqrt(phi.dim_in))
    root = KrausMap.from_list([psd_sqrt(delta + np.eye(phi.dim_in))])
    exact = trace_distance(choi_of(root).matrix, maximally_entangled(phi.dim_in))
    return AtpDeviation(dist, float(np.max(np.abs(delta))), exact)


def combine(kind: str, maps: Sequence[KrausMap], weights: Sequence[float] | None = None) -> KrausMap:
    """Compose, tensor or mix maps.

    ``compose`` applies the maps in list order, so ``combine("compose", [a, b])``
    is ``b o a``.
    """
    maps = list(maps)
    if not maps:
        raise ChannelError("need at least one map")
    if kind == "compose":
        out = maps[0]
        for nxt in maps[1:]:
            if nxt.dim_in != out.dim_out:
                raise ChannelError("maps are not chainable")
            ks = np.einsum("aij,bjk->abik", nxt.kraus, out.kraus)
            out = KrausMap(ks.reshape(-1, nxt.dim_out, out.dim_in))
        return out
    if kind == "tensor":
        out = maps[0].kraus
        for nxt in maps[1:]:
            out = np.einsum("aij,bkl->abikjl", out, nxt.kraus)
            out = out.reshape(
                out.shape[0] * out.shape[1],
                out.shape[2] * out.shape[3],
                out.shape[4] * out.shape[5],
            )
        return KrausMap(out)
    if kind == "mix":
        if weights is None or len(weights) != len(maps):
            raise ChannelError("mix needs one weight per map")
        w = np.asarray(weights, dtype=float)
        if np.any(w < 0) or abs(w.sum() - 1) > 1e-12:
            raise ChannelError("mixing weights must be a probability vector")
        if len({(m.dim_in, m.dim_out) for m in maps}) != 1:
            raise ChannelError("mixed maps must share dimensions")
        return KrausMap(np.concatenate([np.sqrt(p) * m.kraus for p, m in zip(w, maps) if p > 0]))
    raise ChannelError(f"unknown combination kind {kind!r}")


# --------------------------------------------------------------------------
# standard channels used across the package and its tests
# --------------------------------------------------------------------------

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def depolarizing(p: float) -> KrausMap:
    """Qubit depolarising channel ``(1 - p) rho + p/3 (X rho X + Y rho Y + Z rho Z)``."""
    return KrausMap.from_list(
        [np.sqrt(1 - p) * PAULI["I"]] + [np.sqrt(p / 3) * PAULI[s] for s in "XYZ"]
    )


def amplitude_damping(gamma: float) -> KrausMap:
    k0 = np.array([[1, 0], [0, np.sqrt(1 - gamma)]], dtype=complex)
    k1 = np.array([[0, np.sqrt(gamma)], [0, 0]], dtype=complex)
    return KrausMap.from_list([k0, k1])


def random_kraus_map(dim_in: int, dim_out: int, rank: int, rng: np.random.Generator, tp: bool = True) -> KrausMap:
    """Random map of the given Kraus rank; trace preserving needs ``rank * dim_out >= dim_in``."""
    if tp and rank * dim_out < dim_in:
        raise ChannelError("rank * dim_out must be at least dim_in for a TP map")
    g =rng.normal(size=(rank * dim_out, dim_in)) + 1j * rng.normal(size=(rank * dim_out, dim_in))
    if tp:
        q, r = np.linalg.qr(g)
        g = q * np.sign(np.diag(r).real + (np.diag(r).real == 0))
    return KrausMap(g.reshape(rank, dim_out, dim_in))
