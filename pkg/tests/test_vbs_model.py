import numpy as np
import pytest

from quasiqec.vbs import codes
from quasiqec.vbs.mps import to_dense
from quasiqec.vbs.model import MAX_DIM, VbsModel, ed_cross_check


def explicit_hamiltonian(d, n):
    """Periodic sum of two-site terms applied by einsum on the full tensor."""
    p = d * d - 1
    t4 = codes.bond_hamiltonians(d)[1].reshape(p, p, p, p)
    letters = "abcdefghij"[:n]
    total = np.zeros((p**n, p**n), dtype=complex)
    for k in range(n):
        m = (k + 1) % n
        out = list(letters)
        out[k], out[m] = "x", "y"
        spec = f"xy{letters[k]}{letters[m]},{letters}z->{''.join(out)}z"
        total += np.einsum(spec, t4, np.eye(p**n).reshape((p,) * n + (-1,))).reshape(p**n, p**n)
    return total


def test_hamiltonian_matches_explicit_sum():
    h = VbsModel(2, 4).hamiltonian().toarray()
    assert np.allclose(h, explicit_hamiltonian(2, 4))
    assert np.allclose(h, h.conj().T)


@pytest.mark.parametrize("d,n", [(2, 4), (2, 6), (3, 3)])
def test_vbs_state_is_frustration_free_ground_state(d, n):
    model = VbsModel(d, n)
    v = to_dense(codes.ground_state(d, n))
    v /= np.linalg.norm(v)
    hv = model.hamiltonian() @ v
    assert np.allclose(hv, n * model.term_ground_energy() * v, atol=1e-10)


def test_ed_unique_ground_state_for_d2():
    rep = ed_cross_check(2, 6)
    assert rep.degeneracy == 1
    assert np.isclose(rep.fidelities[0], 1)
    assert rep.frustration_free < 1e-9


def test_ed_two_ground_states_for_d3():
    rep = ed_cross_check(3, 4)
    assert rep.degeneracy == 2
    assert np.allclose(rep.fidelities, 1, atol=1e-10)
    assert rep.energies[2] - rep.energies[0] > 1e-3
    assert set(rep.to_json()) >= {"degeneracy", "fidelities", "energies"}


def test_model_dimension_guard():
    with pytest.raises(ValueError):
        VbsModel(3, 7).hamiltonian()
    assert VbsModel(2, 11).dim <= MAX_DIM
