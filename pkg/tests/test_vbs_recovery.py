import numpy as np
import pytest

from quasiqec.vbs import codes, recovery
from quasiqec.vbs.algebra import su_basis
from quasiqec.vbs.mps import overlap


def random_pure(d, seed):
    rng = np.random.default_rng(seed)
    psi = rng.normal(size=d) + 1j * rng.normal(size=d)
    psi /= np.linalg.norm(psi)
    return np.outer(psi, psi.conj())


def single_layer_recovery(code, link_op, link, sigma):
    """Oracle: sum_k <a| x_k y |c> sigma_cd conj(<b| x_k y |d>) from single-layer overlaps."""
    words = code.codewords
    dl = code.dim_logical
    out = np.zeros((dl, dl), dtype=complex)
    for x in recovery.recovery_ops(code.d):
        m = np.array([[overlap(words[a], words[c], links={link: (None, x @ link_op)}) for c in range(dl)]
                      for a in range(dl)])
        out += m @ sigma @ m.conj().T
    return out


def test_parse_error_forms():
    e = recovery.parse_error("bond:a=3,n=5,+")
    assert (e.kind, e.a, e.n, e.side, e.links) == ("bond", 2, 5, "+", (5,))
    e = recovery.parse_error("bond:a=1,n=5,-")
    assert e.links == (4,)
    assert recovery.parse_error("bond:n=2").a is None
    e = recovery.parse_error("site:a=1,n=2")
    assert e.links == (1, 2)
    e = recovery.parse_error("unitary:n=2,v=0.9|0.1|0|0")
    assert e.coeffs == (0.9, 0.1, 0, 0)
    assert recovery.ErrorSpec.parse("bond:n=1; bond:n=3").insertions[1].n == 3


@pytest.mark.parametrize("text", ["bond", "flip:n=2", "bond:a=1", "site:n=2", "bond:n=2,q=1", "unitary:n=1"])
def test_parse_error_rejects_malformed(text):
    with pytest.raises(ValueError):
        recovery.parse_error(text)


def test_validate_rejects_conflicts():
    code = codes.build_code(2, 6, "holographic")
    for bad in ("bond:n=2;bond:n=2", "bond:a=4,n=1", "parity:n=3", "bond:n=7", "unitary:n=1,v=1|0"):
        with pytest.raises(ValueError):
            recovery.ErrorSpec.parse(bad).validate(code)
    edge = codes.build_code(2, 6, "edge")
    with pytest.raises(ValueError):
        recovery.ErrorSpec.parse("bond:n=6").validate(edge)


@pytest.mark.parametrize("d,a,n", [(2, 0, 3), (2, 2, 1), (3, 4, 2)])
def test_fixed_bond_error_matches_single_layer_oracle(d, a, n):
    code = codes.build_code(d, 6, "holographic")
    sigma = random_pure(d, n)
    out = recovery.recover_logical(code, f"bond:a={a + 1},n={n}", sigma).state
    y = np.sqrt(2.0 * d) * su_basis(d).t[a]
    assert np.allclose(out, single_layer_recovery(code, y, n, sigma), atol=1e-12)


@pytest.mark.parametrize("d", [2, 3])
@pytest.mark.parametrize("n", [1, 2, 4])
def test_link_channel_matches_weight_one_form(d, n):
    code = codes.build_code(d, 10, "holographic")
    sigma = random_pure(d, 7)
    out = recovery.recover_logical(code, f"bond:n={n}", sigma).state
    assert np.allclose(out, recovery.weight1_formula(d, n, sigma), atol=1e-12)


@pytest.mark.parametrize("m,n", [(1, 3), (2, 5), (3, 4)])
def test_two_link_channels_match_derived_form(m, n):
    code = codes.build_code(2, 12, "holographic")
    sigma = random_pure(2, 3)
    out = recovery.recover_logical(code, f"bond:n={m};bond:n={n}", sigma).state
    assert np.allclose(out, recovery.weight2_exact(2, m, n, sigma), atol=1e-12)


def test_recovered_map_is_hermiticity_preserving_and_positive():
    code = codes.build_code(3, 8, "holographic")
    w = recovery.logical_superop(code, "bond:n=2;bond:n=6")
    choi = w.reshape(3, 3, 3, 3).transpose(0, 2, 1, 3).reshape(9, 9)
    assert np.allclose(choi, choi.conj().T)
    assert np.linalg.eigvalsh(choi).min() > -1e-12


def test_far_errors_are_recovered_almost_perfectly():
    code = codes.build_code(2, 30, "holographic")
    sigma = random_pure(2, 1)
    out = recovery.recover_logical(code, "bond:n=25", sigma)
    assert out.distance < 1e-10
    assert np.isclose(out.trace, 1, atol=1e-12)


@pytest.mark.parametrize("d", [2, 3])
def test_average_weight_one_distance_within_five_percent(d):
    for n in (8, 12, 20):
        avg = recovery.average_recovery_distance(codes.build_code(d, n, "holographic"), 1)
        assert avg.rel_err < 0.05
        assert np.isclose(avg.trace_excess, 2 * avg.exact, rtol=1e-8)


def test_holographic_d2_n10_reference_value():
    avg = recovery.average_recovery_distance(codes.build_code(2, 10, "holographic"), 1)
    assert np.isclose(avg.closed_form, 0.01875)
    assert abs(avg.exact - 0.01875) / 0.01875 < 0.05


def test_bulk_single_error_is_exactly_recovered():
    avg = recovery.average_recovery_distance(codes.build_code(3, 12, "bulk"), 1)
    assert avg.exact < 1e-12
    assert avg.closed_form == 0


def test_average_of_fixed_placements_equals_average_superop():
    code = codes.build_code(2, 5, "holographic")
    links = recovery.average_links(code)
    total = sum(recovery.logical_superop(code, f"bond:n={m};bond:n={n}")
                for i, m in enumerate(links) for n in links[i + 1:])
    assert np.allclose(total / 10, recovery.average_superop(code, 2), atol=1e-12)


def test_site_error_touches_two_links():
    code = codes.build_code(2, 8, "holographic")
    out = recovery.recover_logical(code, "site:a=1,n=4", np.eye(2) / 2)
    assert np.isfinite(out.distance)


def test_noise_blocks_shapes():
    code = codes.build_code(2, 6, "holographic")
    blocks, gram = recovery.noise_blocks(code, "bond:n=2;bond:n=4")
    assert blocks.shape == (16, 16, 2, 2)
    assert np.allclose(gram, np.eye(2))
    # total Kraus weight on the code is one
    assert np.allclose(np.einsum("kkab->ab", blocks), np.eye(2))
