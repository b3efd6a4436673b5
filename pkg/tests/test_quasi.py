import numpy as np
import pytest

from quasiqec import quasi


def test_sweep_parallel_matches_serial():
    grid = [quasi.ScalingPoint(n, 2, 0.1, 1) for n in (8, 10, 12)]
    serial = quasi.sweep("vbs-holographic", grid, "recovery_Dt")
    parallel = quasi.sweep("vbs-holographic", grid, "recovery_Dt", jobs=2)
    assert np.array_equal(serial.values(), parallel.values())
    assert [r.point.N for r in serial.rows] == [8, 10, 12]
    assert all(r.rel_err < 0.05 for r in serial.rows)


def test_sweep_correlation_and_encoding_metrics():
    rows = quasi.sweep("vbs-holographic", [quasi.ScalingPoint(20, 3, t=2)], "correlation").rows
    assert rows[0].rel_err < 1e-6
    enc = quasi.sweep("vbs-bulk", [quasi.ScalingPoint(n, 3) for n in (6, 8)], "encoding_error").values()
    assert enc[1] < enc[0]


def test_sweep_rejects_unknown_names():
    with pytest.raises(ValueError):
        quasi.sweep("toric", [quasi.ScalingPoint(4, 2)], "recovery_Dt")
    with pytest.raises(ValueError):
        quasi.sweep("vbs-edge", [quasi.ScalingPoint(4, 2)], "entropy")
    with pytest.raises(ValueError):
        quasi.ScalingPoint(4, 2, p=1.5)


def test_fit_decay_distinguishes_exponential_and_power():
    x = np.arange(1, 15, dtype=float)
    fit = quasi.fit_decay(x, 0.5 * 3.0 ** (-x))
    assert fit.kind == "exp" and np.isclose(fit.parameter, 3.0)
    fit = quasi.fit_decay(x, 0.5 * x ** (-2.0))
    assert fit.kind == "power" and np.isclose(fit.parameter, 2.0)
    assert quasi.fit_decay(x[:2], x[:2]).kind == "none"


@pytest.mark.parametrize("decay,param,cls", [
    ("exp_in_N", 1.3, "strong"),
    ("power_in_N", 1.5, "strong"),
    ("exp_in_n", 2.0, "weak"),
    ("power_in_n", 1.5, "weak"),
])
def test_planted_families_are_classified(decay, param, cls):
    rep = quasi.classify(quasi.planted_windows(decay, param), [8, 12, 16, 20, 24], name=decay)
    assert rep.cls == cls
    assert rep.decay_type == decay
    assert abs(rep.parameter - param) / param < 0.05


def test_vbs_codes_classification():
    bulk = quasi.classify(quasi.vbs_windows("bulk", 3), [6, 8, 10])
    assert bulk.cls == "exact"
    holo = quasi.classify(quasi.vbs_windows("holographic", 2), [8, 12, 16, 20])
    assert holo.cls == "weak" and holo.decay_type == "exp_in_n"
    assert abs(holo.parameter - 3.0) < 0.1
    assert holo.to_json()["class"] == "weak"


def test_classify_window_bounds():
    with pytest.raises(ValueError):
        quasi.classify(quasi.planted_windows("exp_in_n", 2.0), [8], width=5)


def test_quasi_distance_rules():
    qd = quasi.quasi_distance([0.0, 0.01, 0.05, 0.2], 0.06)
    assert (qd.t_max, qd.distance, qd.capped) == (2, 5, False)
    qd = quasi.quasi_distance([0.0, 0.03, 0.02, 0.2], 0.06)
    assert qd.violations == (2,)
    qd = quasi.quasi_distance([0.0, 0.01], 0.5, n_sites=9)
    assert qd.capped and qd.t_max == 9 and qd.distance == 19
    with pytest.raises(ValueError):
        quasi.quasi_distance([0.1, 0.2], 0.05)


def test_recovery_curve_closed_form_matches_formula():
    curve = quasi.recovery_curve("holographic", 2, 20, 3, exact=False)
    assert curve[0] == 0
    assert np.isclose(curve[2], 4 / (2 * 3 * 18))


def test_success_probability_small_case():
    assert np.isclose(quasi.success_probability(3, 1, 0.1), 0.972)


def test_threshold_report_monte_carlo_within_radius():
    rep = quasi.threshold_report(50, 2, 5, [0.05, 0.1, 0.2], seeds=[1, 2, 3], samples=20_000)
    assert rep.epsilon_p_star == 0.1
    assert np.isclose(rep.epsilon_l_star, 25 / (2 * 3 * 45))
    assert all(r.within for r in rep.rows)
    again = quasi.threshold_report(50, 2, 5, [0.05, 0.1, 0.2], seeds=[1, 2, 3], samples=20_000)
    assert [r.mc_success for r in rep.rows] == [r.mc_success for r in again.rows]
