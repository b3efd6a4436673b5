import numpy as np
import pytest

from quasiqec.channels import ChannelError, KrausMap, PAULI, combine, depolarizing
from quasiqec.qec import (
    CodeSpace, analyze, build_recovery, detect_coefficients, encoding_error, encoding_error_from_choi,
    local_operator, repetition_code, roundtrip, span_sample, superop_distance,
)


def bit_flip_noise(n, p):
    """At most one bit flip on an n-qubit register."""
    ops = [np.sqrt(1 - p) * np.eye(2**n)]
    ops += [np.sqrt(p / n) * local_operator(PAULI["X"], k, n) for k in range(n)]
    return KrausMap.from_list(ops)


def test_repetition_code_corrects_single_flips_exactly():
    code = repetition_code(3)
    noise = bit_flip_noise(3, 0.3)
    res = analyze(code, noise)
    assert res.exact
    rt = roundtrip(code, noise)
    assert rt.distance < 1e-12
    assert rt.analytic < 1e-12


def test_repetition_code_fails_on_phase_flips():
    code = repetition_code(3)
    z = local_operator(PAULI["Z"], 0, 3)
    noise = KrausMap.from_list([np.sqrt(0.9) * np.eye(8), np.sqrt(0.1) * z])
    res = analyze(code, noise)
    assert not res.exact
    rt = roundtrip(code, noise)
    # a logical Z error keeps the code space, so both recovery branches fire
    assert rt.distance > 0.1
    assert np.isclose(rt.analytic, rt.distance, rtol=1e-6)


def test_recovery_is_trace_non_increasing():
    code = repetition_code(3)
    res = analyze(code, bit_flip_noise(3, 0.2))
    rec = build_recovery(code, res).as_kraus()
    defect = rec.tp_defect()
    assert np.linalg.eigvalsh(defect).max() < 1e-10


def test_detection_coefficients_for_detectable_errors():
    code = repetition_code(3)
    z_pair = local_operator(PAULI["Z"], 0, 3) @ local_operator(PAULI["Z"], 1, 3)
    det = detect_coefficients(code, KrausMap.from_list([z_pair / np.sqrt(2), np.eye(8) / np.sqrt(2)]))
    assert det.coefficients is not None
    assert np.allclose(det.coefficients, 1 / np.sqrt(2))
    det = detect_coefficients(code, KrausMap.from_list([local_operator(PAULI["Z"], 0, 3)]))
    assert det.coefficients is None


def test_encoding_error_of_non_orthogonal_codewords():
    theta = 0.05
    a = np.array([1.0, 0.0, 0.0])
    b = np.array([np.sin(theta), np.cos(theta), 0.0])
    code = CodeSpace.from_codewords([a, b])
    # off-diagonal overlap sin(theta) twice: sqrt(2) sin(theta) / (2 sqrt 2)
    assert np.isclose(encoding_error(code), np.sin(theta) / 2)
    assert np.isclose(encoding_error_from_choi(code), encoding_error(code))
    assert not code.is_exact


def test_projectors_of_quasi_code():
    v = np.array([[1, 0.1], [0, 1], [0, 0]], dtype=complex)
    code = CodeSpace(v)
    p = code.projector
    assert np.allclose(p @ p, p)
    assert np.allclose(code.leakage, code.first_order_projector @ code.first_order_projector - code.first_order_projector)
    o = code.orthonormal
    assert np.allclose(o.conj().T @ o, np.eye(2))


def test_dependent_codewords_rejected():
    with pytest.raises(ChannelError):
        CodeSpace(np.array([[1, 1], [0, 0]], dtype=complex))


def test_span_sample_keeps_tp_and_stays_in_span():
    noise = bit_flip_noise(3, 0.3)
    out = span_sample(noise, seed=3)
    assert out.trace_preserving and out.map.is_tp()
    basis = noise.kraus.reshape(noise.rank, -1).T
    for k in out.map.kraus:
        coef, *_ = np.linalg.lstsq(basis, k.reshape(-1), rcond=None)
        assert np.allclose(basis @ coef, k.reshape(-1))


def test_superop_distance_of_identity_is_zero():
    assert superop_distance(np.eye(4)) < 1e-14


def test_depolarised_repetition_code_residuals_match_distance():
    code = repetition_code(3)
    noise = combine("tensor", [depolarizing(0.01)] * 3)
    rt = roundtrip(code, noise)
    assert rt.distance > 0
    assert np.isclose(rt.analytic, rt.distance, rtol=0.05)
