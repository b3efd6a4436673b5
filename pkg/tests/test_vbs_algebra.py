import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from quasiqec.vbs.algebra import (
    adjoint_rotation, gellmann_matrices, ground_energy, haar_su, su_basis, transfer_spectrum,
)

DIMS = [2, 3, 4, 5]


@pytest.mark.parametrize("d", DIMS)
def test_generators_are_traceless_hermitian_and_orthonormal(d):
    t = gellmann_matrices(d)
    assert t.shape == (d * d - 1, d, d)
    assert np.allclose(np.einsum("aii->a", t), 0)
    assert np.allclose(t, t.conj().transpose(0, 2, 1))
    assert np.allclose(np.einsum("aij,bji->ab", t, t), np.eye(d * d - 1) / 2)


@pytest.mark.parametrize("d", DIMS)
def test_structure_constants_reproduce_products(d):
    b = su_basis(d)
    prod = np.einsum("aij,bjk->abik", b.t, b.t)
    rebuilt = (np.einsum("ab,ik->abik", np.eye(b.D), np.eye(d)) / (2 * d)
               + 0.5 * np.einsum("abc,cik->abik", b.d_sym + 1j * b.f, b.t))
    assert np.allclose(prod, rebuilt)
    assert np.allclose(b.f, -b.f.transpose(1, 0, 2))
    assert np.allclose(b.d_sym, b.d_sym.transpose(1, 0, 2))


@pytest.mark.parametrize("d", DIMS)
def test_casimirs(d):
    b = su_basis(d)
    assert np.allclose(np.einsum("aij,ajk->ik", b.t, b.t), (d * d - 1) / (2 * d) * np.eye(d))
    # adjoint Casimir: f_acd f_bcd = d delta_ab
    assert np.allclose(np.einsum("acd,bcd->ab", b.f, b.f), d * np.eye(b.D))


def test_su2_structure_constants_are_levi_civita():
    b = su_basis(2)
    o = b.standard_order()
    f = b.f[np.ix_(o, o, o)]
    assert np.isclose(f[0, 1, 2], 1)
    assert np.allclose(b.d_sym, 0)


def test_su3_standard_order_values():
    b = su_basis(3)
    o = b.standard_order()
    f = b.f[np.ix_(o, o, o)]
    dsym = b.d_sym[np.ix_(o, o, o)]
    assert np.isclose(f[0, 1, 2], 1)
    assert np.isclose(f[3, 4, 7], np.sqrt(3) / 2)
    assert np.isclose(dsym[0, 0, 7], 1 / np.sqrt(3))


@pytest.mark.parametrize("d", DIMS)
def test_parity_signs(d):
    b = su_basis(d)
    assert np.allclose(-b.t.transpose(0, 2, 1), b.parity[:, None, None] * b.t)


@pytest.mark.parametrize("d", DIMS)
def test_transfer_spectrum(d):
    _, ev = transfer_spectrum(d)
    assert np.isclose(ev[0], (d * d - 1) / d**2)
    assert np.allclose(ev[1:], -1 / d**2)


def test_ground_energy_values():
    assert np.allclose(ground_energy(2), (-4 / 3, 2.0))
    assert np.allclose(ground_energy(3), (-27 / 16, 99 / 32))


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from([2, 3, 4]))
def test_adjoint_rotation_is_orthogonal_and_conjugates_generators(seed, d):
    g = haar_su(d, np.random.default_rng(seed))
    assert np.isclose(np.linalg.det(g), 1)
    u = adjoint_rotation(g)
    assert np.allclose(u @ u.T, np.eye(d * d - 1))
    t = su_basis(d).t
    assert np.allclose(np.einsum("ab,bij->aij", u, t), np.einsum("ji,ajk,kl->ail", g.conj(), t, g))


def test_rejects_bad_dimension():
    with pytest.raises(ValueError):
        su_basis(1)
