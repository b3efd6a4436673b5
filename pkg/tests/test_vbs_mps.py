import itertools

import numpy as np
import pytest

from quasiqec.vbs.mps import (
    Mps, norm_squared, normalized, overlap, placement_sum, reduced_density, site_superop, to_dense,
)


def random_mps(rng, phys=2, chi=2, n=4, boundary="trace"):
    a = rng.normal(size=(phys, chi, chi)) + 1j * rng.normal(size=(phys, chi, chi))
    if boundary == "trace":
        b = rng.normal(size=(chi, chi)) + 1j * rng.normal(size=(chi, chi))
    else:
        b = rng.normal(size=chi) + 1j * rng.normal(size=chi)
    return Mps(a, n, boundary, b)


def brute_dense(state):
    """Coefficients by explicit matrix products, site 1 most significant."""
    a, n, chi = state.tensors, state.n_sites, state.chi
    out = []
    for idx in itertools.product(range(state.phys), repeat=n):
        m = np.eye(chi)
        for i in idx:
            m = a[i] @ m  # A^{i_N} ... A^{i_1}
        if state.boundary == "trace":
            out.append(np.trace(state.bmat @ m))
        else:
            out.extend(m @ state.bmat)
    return state.scale * np.array(out)


def local(op, site, n, phys):
    return np.kron(np.kron(np.eye(phys ** (site - 1)), op), np.eye(phys ** (n - site)))


@pytest.mark.parametrize("boundary", ["trace", "hbc"])
def test_dense_matches_explicit_products(boundary):
    s = random_mps(np.random.default_rng(0), boundary=boundary)
    assert np.allclose(to_dense(s), brute_dense(s))
    assert len(to_dense(s)) == s.dense_dim


@pytest.mark.parametrize("boundary", ["trace", "hbc"])
def test_overlap_with_site_operators_matches_dense(boundary):
    rng = np.random.default_rng(1)
    bra = random_mps(rng, boundary=boundary)
    ket = Mps(bra.tensors, bra.n_sites, boundary, random_mps(rng, boundary=boundary).bmat)
    op1 = rng.normal(size=(2, 2))
    op3 = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    n = bra.n_sites
    full = local(op1, 1, n, 2) @ local(op3, 3, n, 2)
    if boundary == "hbc":
        edge = rng.normal(size=(2, 2))
        full = np.kron(full, edge)
        val = overlap(bra, ket, sites={1: op1, 3: op3}, edge=edge)
    else:
        val = overlap(bra, ket, sites={1: op1, 3: op3})
    assert np.isclose(val, to_dense(bra).conj() @ full @ to_dense(ket))


def test_bond_operator_equals_inserting_matrix_into_chain():
    rng = np.random.default_rng(2)
    s = random_mps(rng, n=4)
    y = rng.normal(size=(2, 2))
    # a ket-side bond operator at link 2 inserts y between A^{i_2} and A^{i_3}
    a = s.tensors
    coeffs = []
    for idx in itertools.product(range(2), repeat=4):
        m = np.eye(2)
        for k, i in enumerate(idx, start=1):
            m = a[i] @ m
            if k == 2:
                m = y @ m
        coeffs.append(np.trace(s.bmat @ m))
    expected = to_dense(s).conj() @ np.array(coeffs)
    assert np.isclose(overlap(s, s, links={2: (None, y)}), expected)


def test_trace_boundary_link_zero_is_link_n():
    rng = np.random.default_rng(3)
    s = random_mps(rng, n=3)
    y = rng.normal(size=(2, 2))
    assert np.isclose(overlap(s, s, links={0: (None, y)}), overlap(s, s, links={3: (None, y)}))
    with pytest.raises(ValueError):
        overlap(s, s, links={0: (None, y), 3: (None, y)})


@pytest.mark.parametrize("boundary", ["trace", "hbc"])
@pytest.mark.parametrize("start,width", [(1, 1), (2, 2), (3, 2)])
def test_reduced_density_matches_partial_trace(boundary, start, width):
    s = random_mps(np.random.default_rng(4), n=4, boundary=boundary)
    psi = to_dense(s)
    extra = s.chi if boundary == "hbc" else 1
    t = psi.reshape(2 ** (start - 1), 2**width, 2 ** (4 - start - width + 1) * extra)
    rho = np.einsum("aib,ajb->ij", t, t.conj())
    assert np.allclose(reduced_density(s, start, width), rho)


def test_normalized_state_has_unit_norm():
    s = normalized(random_mps(np.random.default_rng(5)))
    assert np.isclose(norm_squared(s), 1)
    assert np.isclose(np.linalg.norm(to_dense(s)), 1)


def test_placement_sum_matches_explicit_enumeration():
    rng = np.random.default_rng(6)
    plain = rng.normal(size=(3, 3))
    event = rng.normal(size=(3, 3))
    top = rng.normal(size=3)
    n, w = 5, 2
    links = [1, 2, 3, 4, 5]
    total = np.zeros(3)
    for chosen in itertools.combinations(links, w):
        x = top.copy()
        for k in range(n, 0, -1):
            if k in chosen:
                x = event @ x
            x = plain @ x
        total += x
    assert np.allclose(placement_sum(plain, event, top, n, w, links), total)


def test_site_superop_identity_action():
    rng = np.random.default_rng(7)
    a = rng.normal(size=(2, 3, 3))
    x = rng.normal(size=(3, 3))
    out = (site_superop(a, a) @ x.reshape(-1)).reshape(3, 3)
    assert np.allclose(out, sum(a[i].conj().T @ x @ a[i] for i in range(2)))


def test_invalid_inputs():
    a = np.zeros((2, 2, 2))
    with pytest.raises(ValueError):
        Mps(a, 3, "open")
    with pytest.raises(ValueError):
        Mps(a, 3, "hbc")
    s = Mps(a, 3)
    with pytest.raises(ValueError):
        overlap(s, s, sites={4: np.eye(2)})
