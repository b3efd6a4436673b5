import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from quasiqec import gatecell
from quasiqec.vbs.algebra import haar_su


@pytest.mark.parametrize("eta", [math.pi / 8, 0.3, 1.0, 2 * math.pi / 7])
def test_u1_partition_covers_circle(eta):
    part = gatecell.u1_partition(eta)
    assert part.count == math.ceil(2 * math.pi / eta - 1e-12)
    assert part.side <= eta + 1e-12
    ids = {gatecell.cell_of_angle(th, part).index for th in np.linspace(0, 2 * math.pi, 2000, endpoint=False)}
    assert len(ids) == part.count


def test_angle_cells_wrap():
    part = gatecell.u1_partition(0.5)
    assert gatecell.cell_of_angle(2 * math.pi + 0.1, part) == gatecell.cell_of_angle(0.1, part)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 100_000))
def test_euler_roundtrip(seed):
    u = haar_su(2, np.random.default_rng(seed))
    t = gatecell.euler_decompose(u)
    assert gatecell.phase_distance(gatecell.euler_compose(*t), u) < 1e-9


@pytest.mark.parametrize("u", [np.eye(2), np.array([[0, 1], [1, 0]]), gatecell.HADAMARD, np.diag([1, 1j])])
def test_euler_special_cases(u):
    u = np.asarray(u, dtype=complex)
    assert gatecell.phase_distance(gatecell.euler_compose(*gatecell.euler_decompose(u)), u) < 1e-12


def test_phase_distance_ignores_global_phase():
    u = haar_su(2, np.random.default_rng(0))
    assert gatecell.phase_distance(np.exp(0.7j) * u, u) < 1e-12


def test_su2_cells_have_side_eta_over_root_three():
    eta = 0.4
    part = gatecell.su2_partition(eta)
    assert np.isclose(part.side, eta / math.sqrt(3))
    # unitaries in one cube differ by at most eta in axis-angle coordinates
    rng = np.random.default_rng(3)
    cells = {}
    for _ in range(400):
        u = haar_su(2, rng)
        theta, n = gatecell.su2_axis_angle(u)
        cells.setdefault(gatecell.su2_cell(u, part), []).append(theta * n)
    for pts in cells.values():
        pts = np.array(pts)
        assert np.max(np.linalg.norm(pts[:, None] - pts[None], axis=-1)) <= eta + 1e-12


def test_axis_angle_reconstructs_unitary():
    u = haar_su(2, np.random.default_rng(4))
    theta, n = gatecell.su2_axis_angle(u)
    sig = np.array([[[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]])
    rebuilt = math.cos(theta) * np.eye(2) + 1j * math.sin(theta) * np.einsum("a,aij->ij", n, sig)
    assert gatecell.phase_distance(rebuilt, u) < 1e-12
    assert 0 <= theta <= math.pi / 2 + 1e-12


def test_coding_cost_laws():
    assert np.isclose(gatecell.coding_cost("exp_in_N", 1e-6, x=10), 6)
    assert np.isclose(gatecell.coding_cost("power_in_N", 1e-4, alpha=2), 100)
    assert np.isclose(gatecell.coding_cost("weak", 0.01, c=2), 200)
    with pytest.raises(ValueError):
        gatecell.coding_cost("exp_in_N", 1e-3, x=0.5)
    with pytest.raises(ValueError):
        gatecell.coding_cost("weak", 2.0, c=1)


def test_partition_rejects_bad_eta():
    with pytest.raises(ValueError):
        gatecell.u1_partition(0.0)
