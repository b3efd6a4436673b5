"""Gate-cell partitions of U(1) and SU(2), Euler decomposition and coding-cost laws."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)


def z_rotation(theta: float) -> np.ndarray:
    """``Z(theta) = diag(1, e^{i theta})``."""
    return np.diag([1.0, np.exp(1j * theta)])


@dataclass(frozen=True)
class CellPartition:
    kind: str  # "U1" | "SU2"
    eta: float

    def __post_init__(self):
        if self.kind not in ("U1", "SU2"):
            raise ValueError(f"unknown partition kind {self.kind!r}")
        if not 0 < self.eta <= 2 * math.pi:
            raise ValueError("eta must lie in (0, 2 pi]")

    @property
    def count(self) -> int:
        """Segments (U1) or cubes per axis (SU2) covering ``[-pi/2, pi/2]``."""
        if self.kind == "U1":
            return math.ceil(2 * math.pi / self.eta - 1e-12)
        return 2 * math.ceil((math.pi / 2) / self.side - 1e-12)

    @property
    def side(self) -> float:
        """Segment length (U1) or cube side ``eta / sqrt(3)`` (SU2)."""
        if self.kind == "U1":
            return 2 * math.pi / self.count
        return self.eta / math.sqrt(3)

    def to_json(self) -> dict:
        return {"kind": self.kind, "eta": self.eta, "count": self.count, "side": self.side}


@dataclass(frozen=True)
class GateCellId:
    kind: str
    index: tuple[int, ...]


def u1_partition(eta: float) -> CellPartition:
    return CellPartition("U1", eta)


def su2_partition(eta: float) -> CellPartition:
    return CellPartition("SU2", eta)


def cell_of_angle(theta: float, partition: CellPartition) -> GateCellId:
    if partition.kind != "U1":
        raise ValueError("need a U1 partition")
    theta = float(theta) % (2 * math.pi)
    k = min(int(theta // partition.side), partition.count - 1)
    return GateCellId("U1", (k,))


def _check_su2(u: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    if u.shape != (2, 2) or np.max(np.abs(u.conj().T @ u - np.eye(2))) > tol:
        raise ValueError("need a 2x2 unitary")
    return u


def su2_axis_angle(u: np.ndarray) -> tuple[float, np.ndarray]:
    """``(theta, n)`` with ``U = e^{i phase} e^{i theta n.sigma}``, folded to ``theta <= pi/2``."""
    u = _check_su2(u)
    u = u / np.sqrt(np.linalg.det(u))
    # U = cos(theta) 1 + i sin(theta) n.sigma
    c = np.real(np.trace(u)) / 2
    s_vec = np.array([np.imag(u[0, 1] + u[1, 0]), np.real(u[0, 1] - u[1, 0]), np.imag(u[0, 0] - u[1, 1])]) / 2
    if c < 0:  # U(theta, n) = -U(theta - pi, n); the sign is a global phase
        c, s_vec = -c, -s_vec
    s = np.linalg.norm(s_vec)
    theta = math.atan2(s, c)
    n = s_vec / s if s > 1e-15 else np.array([0.0, 0.0, 1.0])
    return theta, n


def su2_cell(u: np.ndarray, partition: CellPartition) -> GateCellId:
    """Cube index of ``theta n`` on the lattice of side ``eta / sqrt(3)``."""
    if partition.kind != "SU2":
        raise ValueError("need an SU2 partition")
    theta, n = su2_axis_angle(u)
    point = theta * n
    half = partition.count // 2
    idx = np.floor(point / partition.side).astype(int)
    idx = np.clip(idx, -half, half - 1)
    return GateCellId("SU2", tuple(int(i) for i in idx))


def euler_decompose(u: np.ndarray) -> tuple[float, float, float]:
    """Angles with ``U = Z(t1) H Z(t2) H Z(t3)`` up to a global phase."""
    u = _check_su2(u)
    # H Z(t2) H = e^{i t2/2} exp(-i t2 X / 2); match |U_00| = |cos(t2/2)|
    a, b = u[0, 0], u[0, 1]
    t2 = 2 * math.atan2(abs(b), abs(a))
    # U ~ diag(1, e^{i t1}) [[cos, -i sin], [-i sin, cos]] diag(1, e^{i t3})
    if abs(b) < 1e-14:
        return float(np.angle(u[1, 1] / a)), 0.0, 0.0
    if abs(a) < 1e-14:
        t1 = float(np.angle(u[1, 0] / (-1j)) - np.angle(b / (-1j)))
        return t1, math.pi, 0.0
    g = a  # the global phase carried by U_00 = g cos
    t3 = float(np.angle((b / g) / (-1j)))
    t1 = float(np.angle((u[1, 0] / g) / (-1j)))
    return t1, t2, t3


def euler_compose(t1: float, t2: float, t3: float) -> np.ndarray:
    return z_rotation(t1) @ HADAMARD @ z_rotation(t2) @ HADAMARD @ z_rotation(t3)


def phase_distance(u: np.ndarray, v: np.ndarray) -> float:
    """Spectral-norm distance minimised over a global phase."""
    w = np.trace(v.conj().T @ u)
    ph = w / abs(w) if abs(w) > 1e-15 else 1.0
    return float(np.linalg.norm(u - ph * v, 2))


def coding_cost(family: str, epsilon: float, x: float | None = None,
                alpha: float | None = None, c: float | None = None) -> float:
    """System size ``N(eps)``: ``log(1/eps)/log x`` (exp_in_N), ``eps^(-1/alpha)``
    (power_in_N) or ``c / eps`` (weak families)."""
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    if family == "exp_in_N":
        if x is None or x <= 1:
            raise ValueError("exponential families need x > 1")
        return math.log(1 / epsilon) / math.log(x)
    if family == "power_in_N":
        if alpha is None or alpha <= 0:
            raise ValueError("power-law families need alpha > 0")
        return epsilon ** (-1 / alpha)
    if family in ("weak", "exp_in_n", "power_in_n"):
        if c is None:
            raise ValueError("weak families need the prefactor c")
        return c / epsilon
    raise ValueError(f"unknown family {family!r}")
