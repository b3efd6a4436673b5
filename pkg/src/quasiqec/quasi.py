"""Quasi-code evaluation: scaling sweeps, strong/weak classification, quasi
distance under a logical-error cutoff and threshold reports."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.stats import binom

from .channels import trace_distance
from .vbs.codes import build_code, correlation, correlation_formula
from .vbs.mps import norm_squared, reduced_density
from .vbs.recovery import average_recovery_distance, closed_form_distance

FAMILIES = {"vbs-holographic": "holographic", "vbs-edge": "edge", "vbs-bulk": "bulk"}
METRICS = ("recovery_Dt", "encoding_error", "gram_offdiag", "correlation")
DECAY_TYPES = ("exp_in_n", "exp_in_N", "power_in_n", "power_in_N")


@dataclass(frozen=True)
class ScalingPoint:
    N: int
    d: int
    p: float | None = None
    t: int | None = None

    def __post_init__(self):
        if self.N < 2 or self.d < 2:
            raise ValueError("need N >= 2 and d >= 2")
        if self.p is not None and not 0 <= self.p <= 1:
            raise ValueError("p must lie in [0, 1]")
        if self.t is not None and not 0 <= self.t <= self.N:
            raise ValueError("t must lie in [0, N]")


@dataclass(frozen=True)
class SweepRow:
    point: ScalingPoint
    quantity: str
    value: float
    analytic: float | None

    @property
    def rel_err(self) -> float | None:
        if self.analytic is None or self.analytic == 0:
            return None
        return abs(self.value - self.analytic) / abs(self.analytic)


@dataclass(frozen=True)
class SweepReport:
    family: str
    quantity: str
    rows: tuple[SweepRow, ...]

    def values(self) -> np.ndarray:
        return np.array([r.value for r in self.rows])


def gram_encoding_error(gram: np.ndarray) -> float:
    """``sqrt(sum_{i != j} |G_ij|^2) / (2 sqrt(d_L))`` for a normalised Gram matrix."""
    off = gram - np.diag(np.diag(gram))
    return float(np.sqrt(np.sum(np.abs(off) ** 2)) / (2 * np.sqrt(len(gram))))


def _evaluate(args) -> SweepRow:
    family, point, quantity = args
    kind = FAMILIES[family]
    if quantity == "correlation":
        r = point.t or 1
        n = point.N // 2
        return SweepRow(point, quantity, correlation(point.d, point.N, 0, 0, n, n + r), correlation_formula(point.d, r))
    code = build_code(point.d, point.N, kind)
    if quantity == "recovery_Dt":
        t = point.t or 1
        res = average_recovery_distance(code, t, point.p if point.p is not None else 0.1)
        return SweepRow(point, quantity, res.exact, res.closed_form)
    if quantity == "encoding_error":
        return SweepRow(point, quantity, gram_encoding_error(code.gram()), 0.0 if kind == "holographic" else None)
    g = code.gram()
    off = np.abs(g - np.diag(np.diag(g)))
    return SweepRow(point, quantity, float(off.max()), 0.0 if kind == "holographic" else None)


def sweep(family: str, grid: Sequence[ScalingPoint], quantity: str, jobs: int = 1) -> SweepReport:
    """Evaluate ``quantity`` at every grid point (rows in grid order)."""
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}; choose from {sorted(FAMILIES)}")
    if quantity not in METRICS:
        raise ValueError(f"unknown metric {quantity!r}; choose from {METRICS}")
    tasks = [(family, pt, quantity) for pt in grid]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_evaluate, tasks))
    else:
        rows = [_evaluate(t) for t in tasks]
    return SweepReport(family, quantity, tuple(rows))


# --------------------------------------------------------------------------
# classification
# --------------------------------------------------------------------------

WindowFamily = Callable[[int, int], np.ndarray]
"""``family(N, n)`` -> array ``(codewords, locations, dim, dim)`` of window states."""


def vbs_windows(kind: str, d: int, logical: Sequence[int] = (0, 1)) -> WindowFamily:
    """Window states of selected codewords of a VBS code (bulk sites only)."""

    def family(n_sites: int, width: int) -> np.ndarray:
        code = build_code(d, n_sites, kind)
        out = []
        for k in logical:
            cw = code.codewords[k]
            nrm = norm_squared(cw)
            out.append([reduced_density(cw, s, width) / nrm for s in range(1, n_sites - width + 2)])
        return np.array(out)

    return family


def planted_windows(decay: str, param: float, scale: float = 0.5) -> WindowFamily:
    """Qubit windows ``(1 +- delta Z) / 2`` whose distance profile is planted.

    ``exp_in_n``: ``delta = scale x^(-loc)``; ``power_in_n``: ``scale loc^(-alpha)`` (``loc >= 1``);
    ``exp_in_N``: ``scale x^(-N)``; ``power_in_N``: ``scale N^(-alpha)`` at every location.
    """
    if decay not in DECAY_TYPES:
        raise ValueError(f"unknown decay type {decay!r}")

    def family(n_sites: int, width: int) -> np.ndarray:
        locs = np.arange(1, n_sites - width + 2, dtype=float)
        if decay == "exp_in_n":
            delta = scale * param ** (-locs)
        elif decay == "power_in_n":
            delta = scale * locs ** (-param)
        elif decay == "exp_in_N":
            delta = np.full_like(locs, scale * param ** (-float(n_sites)))
        else:
            delta = np.full_like(locs, scale * float(n_sites) ** (-param))
        z = np.diag([1.0, -1.0])
        eye = np.eye(2)
        return np.array([[(eye + s * dl * z) / 2 for dl in delta] for s in (1, -1)])

    return family


@dataclass(frozen=True)
class DecayFit:
    kind: str  # "exp" | "power" | "ambiguous" | "none"
    parameter: float  # x for exponential, alpha for power law
    residual_exp: float
    residual_power: float


def fit_decay(x: np.ndarray, y: np.ndarray, tie: float = 0.05) -> DecayFit:
    """Compare ``log y`` linear in ``x`` (exponential, ``y ~ x0^-x``) with linear in
    ``log x`` (power law); ties within ``tie`` relative residual are ambiguous."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    keep = y > 1e-13
    x, y = x[keep], y[keep]
    if len(x) < 3:
        return DecayFit("none", float("nan"), float("nan"), float("nan"))
    ly = np.log(y)
    pe, re, *_ = np.polyfit(x, ly, 1, full=True)
    pp, rp, *_ = np.polyfit(np.log(x), ly, 1, full=True)
    r_exp = float(re[0]) if len(re) else 0.0
    r_pow = float(rp[0]) if len(rp) else 0.0
    if abs(r_exp - r_pow) <= tie * max(r_exp, r_pow, 1e-300) and max(r_exp, r_pow) > 1e-20:
        return DecayFit("ambiguous", float("nan"), r_exp, r_pow)
    if r_exp <= r_pow:
        return DecayFit("exp", float(np.exp(-pe[0])), r_exp, r_pow)
    return DecayFit("power", float(-pp[0]), r_exp, r_pow)


@dataclass(frozen=True)
class ClassRow:
    N: int
    strong: float
    weak: float


@dataclass(frozen=True)
class ClassificationReport:
    family: str
    width: int
    rows: tuple[ClassRow, ...]
    profile: tuple[float, ...]  # per-location worst-case distance at the largest N
    cls: str  # "strong" | "weak" | "exact" | "none"
    decay_type: str | None
    parameter: float | None
    fit: DecayFit | None = field(default=None)

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "window": self.width,
            "rows": [{"N": r.N, "strong": r.strong, "weak": r.weak} for r in self.rows],
            "profile": list(self.profile),
            "class": self.cls,
            "decay_type": self.decay_type,
            "parameter": self.parameter,
        }


def _pair_distances(states: np.ndarray) -> tuple[np.ndarray, float]:
    """Worst pairwise distance per location, and worst pairwise distance of the averages."""
    k = len(states)
    per_loc = np.zeros(states.shape[1])
    avg = states.mean(axis=1)
    weak = 0.0
    for i in range(k):
        for j in range(i + 1, k):
            per_loc = np.maximum(per_loc, [trace_distance(a, b) for a, b in zip(states[i], states[j])])
            weak = max(weak, trace_distance(avg[i], avg[j]))
    return per_loc, weak


def classify(
    family: WindowFamily,
    n_grid: Sequence[int],
    width: int = 1,
    name: str = "custom",
    decay_ratio: float = 0.5,
    zero: float = 1e-12,
) -> ClassificationReport:
    """Strong metric: worst codeword-pair distance over all windows; weak metric:
    distance between the location-averaged window states (uniform weights).

    Strong quasi codes have a strong metric decaying with ``N`` (fitted as
    ``exp_in_N`` or ``power_in_N``).  If it saturates but the weak metric
    decays, the code is weak and the decay type is fitted on the per-location
    profile at the largest ``N`` (``exp_in_n`` or ``power_in_n``, window location
    ``n = 1, 2, ...``).
    """
    n_grid = sorted(int(n) for n in n_grid)
    if not n_grid:
        raise ValueError("empty N grid")
    if width < 1 or width > min(n_grid) // 2:
        raise ValueError("windows must satisfy 1 <= n <= min N / 2")
    rows = []
    profile = np.zeros(0)
    for n in n_grid:
        per_loc, weak = _pair_distances(family(n, width))
        rows.append(ClassRow(n, float(per_loc.max()), float(weak)))
        profile = per_loc
    strong = np.array([r.strong for r in rows])
    weak = np.array([r.weak for r in rows])
    if strong.max() <= zero:
        return ClassificationReport(name, width, tuple(rows), tuple(profile), "exact", None, None)
    if strong[-1] <= decay_ratio * strong[0]:
        fit = fit_decay(np.array(n_grid), strong)
        kind = {"exp": "exp_in_N", "power": "power_in_N"}.get(fit.kind)
        return ClassificationReport(name, width, tuple(rows), tuple(profile), "strong", kind, fit.parameter, fit)
    if weak[-1] <= decay_ratio * weak[0]:
        fit = fit_decay(np.arange(1, len(profile) + 1), profile)
        kind = {"exp": "exp_in_n", "power": "power_in_n"}.get(fit.kind)
        return ClassificationReport(name, width, tuple(rows), tuple(profile), "weak", kind, fit.parameter, fit)
    return ClassificationReport(name, width, tuple(rows), tuple(profile), "none", None, None)


# --------------------------------------------------------------------------
# quasi distance and thresholds
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class QuasiDistance:
    t_max: int
    distance: int
    capped: bool
    violations: tuple[int, ...]


def quasi_distance(curve: Sequence[float], cutoff: float, n_sites: int | None = None) -> QuasiDistance:
    """``d_c = 2 t + 1`` for the largest ``t`` with ``eps_l(t) <= cutoff``.

    ``curve[t]`` is the logical error at weight ``t``, starting at ``t = 0``.  A
    decreasing step is flagged and replaced by the running maximum.  When every
    point passes, ``t`` is capped at ``n_sites`` (or the last weight) and flagged.
    """
    eps = np.asarray(curve, dtype=float)
    if eps.ndim != 1 or len(eps) == 0:
        raise ValueError("need a non-empty curve")
    if cutoff < eps[0]:
        raise ValueError("cutoff lies below eps_l(0)")
    violations = tuple(int(t) for t in np.flatnonzero(np.diff(eps) < 0) + 1)
    eps = np.maximum.accumulate(eps)
    passing = np.flatnonzero(eps <= cutoff)
    t_hat = int(passing.max())
    capped = t_hat == len(eps) - 1
    if capped and n_sites is not None:
        t_hat = n_sites
    return QuasiDistance(t_hat, 2 * t_hat + 1, capped, violations)


def recovery_curve(kind: str, d: int, n_sites: int, t_max: int, exact: bool = True) -> np.ndarray:
    """``eps_l(t)`` for ``t = 0..t_max`` from the exact average or the closed form."""
    out = [0.0]
    code = build_code(d, n_sites, kind) if exact else None
    for t in range(1, t_max + 1):
        out.append(average_recovery_distance(code, t).exact if exact else closed_form_distance(kind, d, n_sites, t))
    return np.array(out)


@dataclass(frozen=True)
class ThresholdRow:
    p: float
    success: float
    mc_success: float | None = None
    mc_radius: float | None = None
    samples: int | None = None
    seed: int | None = None

    @property
    def within(self) -> bool | None:
        if self.mc_success is None:
            return None
        return abs(self.mc_success - self.success) <= self.mc_radius


@dataclass(frozen=True)
class ThresholdReport:
    N: int
    d: int
    t: int
    epsilon_p_star: float
    epsilon_l_star: float
    rows: tuple[ThresholdRow, ...]

    def to_json(self) -> dict:
        return {
            "N": self.N,
            "d": self.d,
            "t": self.t,
            "epsilon_p_star": self.epsilon_p_star,
            "epsilon_l_star": self.epsilon_l_star,
            "rows": [r.__dict__ for r in self.rows],
        }


def success_probability(n_sites: int, t: int, p: float) -> float:
    """``sum_{x <= t} C(N, x) p^x (1 - p)^(N - x)``."""
    return float(binom.cdf(t, n_sites, p))


def threshold_report(
    n_sites: int,
    d: int,
    t: int,
    p_grid: Sequence[float],
    seeds: Sequence[int] | None = None,
    samples: int = 100_000,
    sigmas: float = 3.0,
) -> ThresholdReport:
    """Binomial success curve with the threshold pair ``(t / N, t^2 / (2D(N - t)))``.

    With ``seeds`` (one per grid point, reused cyclically) every point is checked
    against a Monte Carlo estimate from sampled i.i.d. error configurations.
    """
    if not 0 <= t < n_sites:
        raise ValueError("need 0 <= t < N")
    D = d * d - 1
    rows = []
    for k, p in enumerate(p_grid):
        if not 0 <= p <= 1:
            raise ValueError("p must lie in [0, 1]")
        succ = success_probability(n_sites, t, p)
        if seeds:
            seed = int(seeds[k % len(seeds)])
            rng = np.random.default_rng(seed)
            hits = 0
            left = samples
            while left:
                m = min(left, 20_000)
                counts = (rng.random((m, n_sites)) < p).sum(axis=1)
                hits += int((counts <= t).sum())
                left -= m
            est = hits / samples
            radius = sigmas * math.sqrt(max(succ * (1 - succ), 1.0 / samples) / samples)
            rows.append(ThresholdRow(float(p), succ, est, radius, samples, seed))
        else:
            rows.append(ThresholdRow(float(p), succ))
    return ThresholdReport(n_sites, d, t, t / n_sites, t * t / (2.0 * D * (n_sites - t)), tuple(rows))
