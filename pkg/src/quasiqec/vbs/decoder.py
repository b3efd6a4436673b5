"""Domain-wall decoder for parity errors on the bulk VBS code.

An on-site parity error at site ``k`` anticommutes with the two adjacent terms
``h_{k-1}`` and ``h_k``; the syndrome bit ``s_n`` flags the term between sites ``n``
and ``n + 1`` on the periodic chain.  Two error patterns fit each syndrome, one the
complement of the other, and the decoder applies the lighter one.  The composite
of error and correction is either nothing or the global logical flip.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import binom


def _check_syndrome(syndrome, n_sites: int) -> np.ndarray:
    s = np.asarray(syndrome)
    if s.ndim not in (1, 2) or s.shape[-1] != n_sites:
        raise ValueError(f"syndrome must have {n_sites} entries")
    if not np.isin(s, (0, 1)).all():
        raise ValueError("syndrome entries must be 0 or 1")
    if (s.sum(axis=-1) % 2).any():
        raise ValueError("a periodic syndrome has an even number of flagged terms")
    return s.astype(np.int8)


def syndrome_of(errors: np.ndarray) -> np.ndarray:
    """``s_n = e_n xor e_{n+1}`` (0-based, periodic)."""
    e = np.asarray(errors, dtype=np.int8)
    return e ^ np.roll(e, -1, axis=-1)


def _decode(s: np.ndarray) -> np.ndarray:
    # candidate with site 0 unflipped: c_{n+1} = c_n xor s_n
    c = np.zeros_like(s)
    c[..., 1:] = np.cumsum(s[..., :-1], axis=-1) % 2
    n = s.shape[-1]
    heavy = c.sum(axis=-1, keepdims=True) * 2 > n
    return np.where(heavy, 1 - c, c).astype(np.int8)


def bulk_x_decode(syndrome, n_sites: int) -> set[int]:
    """Sites (1-based) to flip; ``syndrome[n - 1]`` flags the term between sites ``n`` and ``n + 1``."""
    s = _check_syndrome(syndrome, n_sites)
    if s.ndim != 1:
        raise ValueError("decode one syndrome at a time")
    return {int(k) + 1 for k in np.flatnonzero(_decode(s))}


@dataclass(frozen=True)
class DecoderStats:
    n_sites: int
    p: float
    samples: int
    failures: int
    seed: int

    @property
    def rate(self) -> float:
        return self.failures / self.samples

    @property
    def stderr(self) -> float:
        r = self.rate
        return float(np.sqrt(max(r * (1 - r), 1e-300) / self.samples))

    @property
    def analytic(self) -> float:
        return majority_failure(self.n_sites, self.p)

    def to_json(self) -> dict:
        return {
            "N": self.n_sites,
            "p": self.p,
            "samples": self.samples,
            "failures": self.failures,
            "rate": self.rate,
            "stderr": self.stderr,
            "analytic": self.analytic,
            "seed": self.seed,
        }


def majority_failure(n_sites: int, p: float) -> float:
    """Probability that more than half the sites carry an error (ties count as half)."""
    fail = float(binom.sf(n_sites // 2, n_sites, p))
    if n_sites % 2 == 0:
        fail -= 0.5 * float(binom.pmf(n_sites // 2, n_sites, p))
    return fail


def decoder_monte_carlo(n_sites: int, p: float, samples: int, seed: int = 0, batch: int = 20_000) -> DecoderStats:
    """Sample i.i.d. parity errors, decode, and count logical flips."""
    if not 0 <= p <= 1:
        raise ValueError("p must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    failures = 0
    done = 0
    while done < samples:
        m = min(batch, samples - done)
        e = (rng.random((m, n_sites)) < p).astype(np.int8)
        c = _decode(syndrome_of(e))
        failures += int(np.all((e ^ c) == 1, axis=1).sum())
        done += m
    return DecoderStats(n_sites, p, samples, failures, seed)
