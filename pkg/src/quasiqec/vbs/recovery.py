"""Local bond-error recovery on VBS codes.

Noise acts on virtual bonds.  A depolarizing link channel has Kraus operators
``y_0 = sqrt(1 - p) 1`` and ``y_a = sqrt(2dp / D) t^a``; the fixed local recovery
at a link is ``{P, sqrt(2d) P t^a}`` (``x_0 = 1``, ``x_a = sqrt(2d) t^a``) and a set
of touched links is recovered jointly by ``P prod x_k``.  Logical maps are
obtained by a doubled transfer-matrix contraction: each link carries
``sum_k (x_k u) (x) conj(x_k u')`` for the ket-layer operators ``u, u'``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import product
from math import comb
from typing import Sequence

import numpy as np

from ..qec import superop_distance
from .algebra import su_basis
from .codes import MpsCode
from .mps import bond_superop, doubled_site_superop, overlap, placement_sum

ERROR_KINDS = ("bond", "site", "unitary", "parity")


@dataclass(frozen=True)
class ErrorInsertion:
    """One error: ``kind`` in ``ERROR_KINDS``, site ``n``, generator ``a`` (0-based, or
    None for the full link channel), bond ``side`` and span coefficients ``coeffs``."""

    kind: str
    n: int
    a: int | None = None
    side: str = "+"
    coeffs: tuple[complex, ...] | None = None

    @property
    def links(self) -> tuple[int, ...]:
        if self.kind == "site":
            return (self.n - 1, self.n)
        if self.kind == "parity":
            return ()
        return (self.n if self.side == "+" else self.n - 1,)


_ITEM = re.compile(r"^\s*(\w+)\s*:\s*(.*)$")


def parse_error(text: str) -> ErrorInsertion:
    """Parse ``bond:a=3,n=5,+``, ``bond:n=5`` (link channel), ``site:a=1,n=2``,
    ``unitary:n=2,v=0.9|0.1|0|0`` or ``parity:n=3``.  ``a`` is 1-based here."""
    m = _ITEM.match(text)
    if not m:
        raise ValueError(f"malformed error spec {text!r}")
    kind, rest = m.group(1), m.group(2)
    if kind not in ERROR_KINDS:
        raise ValueError(f"unknown error kind {kind!r}")
    fields: dict[str, str] = {}
    side = "+"
    for part in filter(None, (p.strip() for p in rest.split(","))):
        if part in ("+", "-"):
            side = part
            continue
        if "=" not in part:
            raise ValueError(f"malformed field {part!r} in {text!r}")
        key, val = (s.strip() for s in part.split("=", 1))
        fields[key] = val
    unknown = set(fields) - {"a", "n", "v"}
    if unknown:
        raise ValueError(f"unknown fields {sorted(unknown)} in {text!r}")
    if "n" not in fields:
        raise ValueError(f"missing site index in {text!r}")
    n = int(fields["n"])
    a = int(fields["a"]) - 1 if "a" in fields else None
    coeffs = tuple(complex(v) for v in fields["v"].split("|")) if "v" in fields else None
    if kind == "site" and a is None:
        raise ValueError("site errors need a generator index")
    if kind == "unitary" and coeffs is None:
        raise ValueError("unitary errors need coefficients v")
    return ErrorInsertion(kind, n, a, side, coeffs)


@dataclass(frozen=True)
class ErrorSpec:
    insertions: tuple[ErrorInsertion, ...]

    @classmethod
    def parse(cls, text: str | Sequence[str]) -> "ErrorSpec":
        items = text.split(";") if isinstance(text, str) else list(text)
        return cls(tuple(parse_error(s) for s in items if s.strip()))

    def validate(self, code: MpsCode) -> None:
        D = code.basis.D
        used: set[int] = set()
        valid = _valid_links(code)
        for e in self.insertions:
            if e.kind == "parity":
                raise ValueError("parity errors are handled by the bulk decoder, not by bond recovery")
            if e.a is not None and not 0 <= e.a < D:
                raise ValueError(f"generator index must lie in [1, {D}]")
            if e.coeffs is not None and len(e.coeffs) != D + 1:
                raise ValueError(f"unitary errors need {D + 1} coefficients")
            if not 1 <= e.n <= code.n_sites:
                raise ValueError(f"site {e.n} outside [1, {code.n_sites}]")
            for link in e.links:
                if link not in valid:
                    raise ValueError(f"link {link} is not a bond of the {code.kind} code")
                if link in used:
                    raise ValueError(f"two errors share link {link}")
                used.add(link)


def _valid_links(code: MpsCode) -> set[int]:
    if code.kind == "edge":
        return set(range(1, code.n_sites))
    return set(range(1, code.n_sites + 1)) if code.kind == "bulk" else set(range(0, code.n_sites + 1))


def average_links(code: MpsCode) -> list[int]:
    """Links averaged over by ``average_recovery_distance``."""
    if code.kind == "edge":
        return list(range(1, code.n_sites))
    return list(range(1, code.n_sites + 1))


# --------------------------------------------------------------------------
# local operators
# --------------------------------------------------------------------------

def recovery_ops(d: int) -> list[np.ndarray]:
    t = su_basis(d).t
    return [np.eye(d, dtype=complex)] + [np.sqrt(2.0 * d) * ta for ta in t]


def channel_kraus(d: int, p: float) -> list[np.ndarray]:
    if not 0 <= p <= 1:
        raise ValueError("p must lie in [0, 1]")
    b = su_basis(d)
    return [np.sqrt(1 - p) * np.eye(d, dtype=complex)] + [np.sqrt(2.0 * d * p / b.D) * ta for ta in b.t]


# Each Kraus operator of an insertion is a list of terms (coefficient, {link: bond op}).
Term = tuple[complex, dict[int, np.ndarray]]


def insertion_kraus(e: ErrorInsertion, d: int, p: float) -> list[list[Term]]:
    t = su_basis(d).t
    if e.kind == "bond":
        (link,) = e.links
        if e.a is None:
            return [[(1.0, {link: y})] for y in channel_kraus(d, p)]
        return [[(1.0, {link: np.sqrt(2.0 * d) * t[e.a]})]]
    if e.kind == "unitary":
        (link,) = e.links
        v = np.asarray(e.coeffs)
        op = v[0] * np.eye(d) + np.einsum("a,aij->ij", v[1:], t)
        return [[(1.0, {link: op})]]
    if e.kind == "site":
        # T^a_n = t^a on link n - 1 minus t^a on link n
        return [[(1.0, {e.n - 1: t[e.a]}), (-1.0, {e.n: t[e.a]})]]
    raise ValueError(f"unsupported error kind {e.kind!r}")


# --------------------------------------------------------------------------
# doubled contractions
# --------------------------------------------------------------------------

def _event(pairs, xs, conj1: bool, conj2: bool) -> np.ndarray:
    """``sum_{(u, u')} w sum_k L(x_k u) (x) conj(L(x_k u'))`` with block conjugations."""
    chi = xs[0].shape[0]
    out = 0
    for w, u1, u2 in pairs:
        for x in xs:
            z1, z2 = x @ u1, x @ u2
            z1 = z1.conj() if conj1 else z1
            z2 = z2.conj() if conj2 else z2
            out = out + w * np.kron(bond_superop(chi, None, z1), bond_superop(chi, None, z2).conj())
    return out


def _chain(plain: np.ndarray, events: dict[int, np.ndarray], top: np.ndarray, n_sites: int) -> np.ndarray:
    acc = top
    if n_sites in events:
        acc = events[n_sites] @ acc
    for n in range(n_sites, 0, -1):
        acc = plain @ acc
        if n - 1 in events:
            acc = events[n - 1] @ acc
    return acc


def _configurations(insertions, d: int, p: float):
    """Expand insertions into ``(weight, {link: [(w, u, u')]})`` pieces of the doubled sum."""
    eye = np.eye(d, dtype=complex)
    per_insertion = []
    for e in insertions:
        kraus = insertion_kraus(e, d, p)
        links = e.links
        pairs: dict[int, list] = {link: [] for link in links}
        if all(len(terms) == 1 and len(terms[0][1]) == 1 for terms in kraus):
            # single-link Kraus operators fold into one event
            (link,) = links
            pairs[link] = [(abs(terms[0][0]) ** 2, terms[0][1][link], terms[0][1][link]) for terms in kraus]
            per_insertion.append([(1.0, pairs)])
            continue
        options = []
        for terms in kraus:
            for (c1, ops1), (c2, ops2) in product(terms, terms):
                opt = {link: [(1.0, ops1.get(link, eye), ops2.get(link, eye))] for link in links}
                options.append((c1 * np.conj(c2), opt))
        per_insertion.append(options)
    for combo in product(*per_insertion):
        weight = 1.0
        merged: dict[int, list] = {}
        for w, opt in combo:
            weight *= w
            merged.update(opt)
        yield weight, merged


def _block_tensors(code: MpsCode) -> list[tuple[np.ndarray, bool]]:
    a = code.tensors
    if code.kind == "bulk":
        return [(a, False), (a.conj(), True)]
    return [(a, False)]


def _raw_doubled(code: MpsCode, configs) -> np.ndarray:
    """``W[(alpha, alpha'), (beta, beta')] = sum K_ab conj(K_a'b')`` on unnormalised codewords."""
    d = code.d
    n = code.n_sites
    xs = recovery_ops(d)
    dl = code.dim_logical
    if code.kind == "bulk":
        blocks = _block_tensors(code)
        out = np.zeros((dl, dl, dl, dl), dtype=complex)
        top = np.eye(d**4, dtype=complex)
        for x1, y1, x2, y2 in product(range(2), repeat=4):
            (bx1, _), (by1, c1), (bx2, _), (by2, c2) = blocks[x1], blocks[y1], blocks[x2], blocks[y2]
            plain = doubled_site_superop(bx1, by1, bx2, by2)
            total = 0
            for weight, merged in configs:
                events = {link: _event(pairs, xs, c1, c2) for link, pairs in merged.items()}
                total = total + weight * np.trace(_chain(plain, events, top, n))
            out[x1, x2, y1, y2] = total
        return out.reshape(dl * dl, dl * dl)
    a = code.tensors
    plain = doubled_site_superop(a, a, a, a)
    if code.kind == "holographic":
        edge = np.eye(d, dtype=complex)
    else:
        edge = np.zeros((d, d), dtype=complex)
        edge[code.edge_ref, code.edge_ref] = 1.0
    top = np.kron(edge.reshape(-1), edge.reshape(-1).conj())
    total = 0
    for weight, merged in configs:
        events = {link: _event(pairs, xs, False, False) for link, pairs in merged.items()}
        total = total + weight * _chain(plain, events, top, n)
    x = total.reshape(d, d, d, d)  # (alpha, beta, alpha', beta')
    return x.transpose(0, 2, 1, 3).reshape(d * d, d * d)


def _raw_gram(code: MpsCode) -> np.ndarray:
    words = [w.with_scale(1.0) for w in code.codewords]
    return np.array([[overlap(u, v) for v in words] for u in words])


def _normalise(code: MpsCode, raw: np.ndarray) -> np.ndarray:
    """Express the logical map in the orthonormalised codeword basis ``K -> M^dagger K M``."""
    g = _raw_gram(code)
    w, v = np.linalg.eigh(g)
    m = v @ np.diag(w**-0.5) @ v.conj().T
    return np.kron(m.conj().T, m.T) @ raw @ np.kron(m, m.conj())


def logical_superop(code: MpsCode, errors: ErrorSpec | str, p: float = 0.1) -> np.ndarray:
    """Row-major superoperator of the recovered logical map for fixed error insertions."""
    spec = ErrorSpec.parse(errors) if isinstance(errors, str) else errors
    spec.validate(code)
    configs = list(_configurations(spec.insertions, code.d, p))
    return _normalise(code, _raw_doubled(code, configs))


@dataclass(frozen=True)
class RecoveredState:
    superop: np.ndarray
    state: np.ndarray
    trace: float
    distance: float


def recover_logical(code: MpsCode, errors: ErrorSpec | str, sigma: np.ndarray, p: float = 0.1) -> RecoveredState:
    """Apply the fixed local recovery branchwise and return the logical output ``sigma_f``."""
    w = logical_superop(code, errors, p)
    dl = code.dim_logical
    sigma = np.asarray(sigma, dtype=complex)
    if sigma.shape != (dl, dl):
        raise ValueError("input state has the wrong dimension")
    out = (w @ sigma.reshape(-1)).reshape(dl, dl)
    return RecoveredState(w, out, float(np.real(np.trace(out))), superop_distance(w))


def gellmann_twirl(d: int, sigma: np.ndarray) -> np.ndarray:
    """``E(sigma) = sum_a t^a sigma t^a``."""
    t = su_basis(d).t
    return np.einsum("aij,jk,akl->il", t, sigma, t)


def weight1_formula(d: int, n: int, sigma: np.ndarray) -> np.ndarray:
    chi = su_basis(d).chi
    return sigma + 2 * d * chi ** (2 * n) * gellmann_twirl(d, sigma)


def weight2_formula(d: int, m: int, n: int, sigma: np.ndarray) -> np.ndarray:
    """Stated two-error form ``(1 + D chi^2r) sigma + 2d (chi^2n - chi^2m) E(sigma)``."""
    b = su_basis(d)
    r = n - m
    return (1 + b.D * b.chi ** (2 * r)) * sigma + 2 * d * (b.chi ** (2 * n) - b.chi ** (2 * m)) * gellmann_twirl(d, sigma)


def weight2_exact(d: int, m: int, n: int, sigma: np.ndarray) -> np.ndarray:
    """Closed form of the recovered two-error state, ``(1 + D chi^2r) sigma + 2d (chi^2m + D chi^2n) E(sigma)``."""
    b = su_basis(d)
    r = n - m
    return (1 + b.D * b.chi ** (2 * r)) * sigma + 2 * d * (b.chi ** (2 * m) + b.D * b.chi ** (2 * n)) * gellmann_twirl(d, sigma)


# --------------------------------------------------------------------------
# averages over random error locations
# --------------------------------------------------------------------------

def closed_form_distance(kind: str, d: int, n_sites: int, t: int) -> float:
    """Closed-form estimates ``D / (2N(D^2 - 1))`` (t = 1), ``t^2 / (2D(N - t))`` and
    ``t(t - 1) / (2D(N - t))`` for the bulk code."""
    D = d * d - 1
    if kind == "bulk":
        return t * (t - 1) / (2.0 * D * (n_sites - t))
    if t == 1:
        return D / (2.0 * n_sites * (D * D - 1))
    return t * t / (2.0 * D * (n_sites - t))


@dataclass(frozen=True)
class AverageDistance:
    kind: str
    d: int
    n_sites: int
    t: int
    exact: float
    closed_form: float
    trace_excess: float

    @property
    def rel_err(self) -> float:
        if self.closed_form == 0:
            return abs(self.exact)
        return abs(self.exact - self.closed_form) / self.closed_form

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "d": self.d,
            "N": self.n_sites,
            "t": self.t,
            "exact": self.exact,
            "closed_form": self.closed_form,
            "rel_err": self.rel_err,
            "trace_excess": self.trace_excess,
        }


def average_superop(code: MpsCode, t: int, p: float = 0.1) -> np.ndarray:
    """Uniform average of the recovered logical map over all weight-``t`` link-channel placements."""
    links = average_links(code)
    if t < 1 or t >= code.n_sites or t > len(links):
        raise ValueError("need 1 <= t < N")
    d = code.d
    n = code.n_sites
    xs = recovery_ops(d)
    pairs = [(1.0, y, y) for y in channel_kraus(d, p)]
    dl = code.dim_logical
    if code.kind == "bulk":
        blocks = _block_tensors(code)
        raw = np.zeros((dl, dl, dl, dl), dtype=complex)
        top = np.eye(d**4, dtype=complex)
        for x1, y1, x2, y2 in product(range(2), repeat=4):
            (bx1, _), (by1, c1), (bx2, _), (by2, c2) = blocks[x1], blocks[y1], blocks[x2], blocks[y2]
            plain = doubled_site_superop(bx1, by1, bx2, by2)
            event = _event(pairs, xs, c1, c2)
            raw[x1, x2, y1, y2] = np.trace(placement_sum(plain, event, top, n, t, links))
        raw = raw.reshape(dl * dl, dl * dl)
    else:
        a = code.tensors
        plain = doubled_site_superop(a, a, a, a)
        if code.kind == "holographic":
            edge = np.eye(d, dtype=complex)
        else:
            edge = np.zeros((d, d), dtype=complex)
            edge[code.edge_ref, code.edge_ref] = 1.0
        top = np.kron(edge.reshape(-1), edge.reshape(-1).conj())
        event = _event(pairs, xs, False, False)
        x = placement_sum(plain, event, top, n, t, links).reshape(d, d, d, d)
        raw = x.transpose(0, 2, 1, 3).reshape(d * d, d * d)
    return _normalise(code, raw) / comb(len(links), t)


def average_recovery_distance(code: MpsCode, t: int, p: float = 0.1) -> AverageDistance:
    """Exact average logical deviation over weight-``t`` placements vs the closed-form estimate."""
    w = average_superop(code, t, p)
    dl = code.dim_logical
    mixed = np.eye(dl).reshape(-1) / dl
    excess = float(np.real(np.trace((w @ mixed).reshape(dl, dl)))) - 1.0
    return AverageDistance(
        code.kind, code.d, code.n_sites, t,
        superop_distance(w), closed_form_distance(code.kind, code.d, code.n_sites, t), excess,
    )


def noise_blocks(code: MpsCode, errors: ErrorSpec | str, p: float = 0.1) -> tuple[np.ndarray, np.ndarray]:
    """Blocks ``<psi_alpha| K_i^dagger K_j |psi_beta>`` of the joint Kraus set of single-link
    channel and bond errors, with the codeword Gram matrix (input for ``qec.analyze_blocks``)."""
    spec = ErrorSpec.parse(errors) if isinstance(errors, str) else errors
    spec.validate(code)
    lists = []
    for e in spec.insertions:
        kraus = insertion_kraus(e, code.d, p)
        if any(len(terms) != 1 for terms in kraus):
            raise ValueError("noise blocks need single-term Kraus operators")
        lists.append([terms[0][1] for terms in kraus])
    joint = []
    for combo in product(*lists):
        ops: dict[int, np.ndarray] = {}
        for part in combo:
            ops.update(part)
        joint.append(ops)
    words = code.codewords
    dl = code.dim_logical
    r = len(joint)
    blocks = np.zeros((r, r, dl, dl), dtype=complex)
    for i, ki in enumerate(joint):
        for j, kj in enumerate(joint):
            links = {link: (ki[link], kj[link]) for link in ki}
            for al in range(dl):
                for be in range(dl):
                    blocks[i, j, al, be] = overlap(words[al], words[be], links=links)
    gram = np.array([[overlap(u, v) for v in words] for u in words])
    return blocks, gram
