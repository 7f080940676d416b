import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spincom.errors import InstabilityError, ParameterError
from spincom.metrics import (
    DirectionalPair,
    directional_pair,
    enhancement_factor,
    evaluate,
    qnr,
    qnr_from,
    quantum_advantage,
    record_advantage,
    static_sql_force_noise,
)
from spincom.params import BACKWARD, FORWARD, DriveConfig
from spincom.spectra import sql
from spincom.sweep import golden_section, metric_block, optimize, point_metric, sweep

W1K = np.array([2 * np.pi * 1e3])


def test_pair_shares_forward_angle(params):
    pair = directional_pair(params, DriveConfig(FORWARD, 5690.0, "optimal"), W1K)
    own = evaluate(params, DriveConfig(BACKWARD, 5690.0, "optimal"), W1K)
    np.testing.assert_array_equal(pair.forward.phi_lo, pair.backward.phi_lo)
    assert pair.backward.s_qz[0] >= own.s_qz[0]


def test_pair_validates_alignment(params):
    a = evaluate(params, DriveConfig(FORWARD, 100.0), W1K)
    b = evaluate(params, DriveConfig(BACKWARD, 100.0), 2 * W1K)
    with pytest.raises(ParameterError):
        DirectionalPair(a, b)


def test_qnr_sign_follows_better_direction(params):
    pair = directional_pair(params, DriveConfig(FORWARD, 5690.0, "optimal"), W1K)
    assert qnr(pair)[0] > 0
    assert qnr(pair.swapped())[0] == -qnr(pair)[0]


@settings(max_examples=100, deadline=None)
@given(st.floats(1e-3, 1e3), st.floats(1e-3, 1e3))
def test_qnr_from_antisymmetric(a, b):
    assert qnr_from(a, b) == -qnr_from(b, a)
    assert qnr_from(a, a) == 0.0


def test_qnr_rejects_nonpositive():
    with pytest.raises(ParameterError):
        qnr_from(0.0, 1.0)
    with pytest.raises(ParameterError):
        qnr_from(1.0, np.nan)


def test_enhancement_factor():
    assert enhancement_factor([4.0, 2.0, 3.0], [1.0, 0.5, np.nan]) == 4.0
    with pytest.raises(ParameterError):
        enhancement_factor([1.0], [1.0, 2.0])
    with pytest.raises(ParameterError):
        enhancement_factor([np.nan], [1.0])


def test_advantage_definition():
    assert quantum_advantage(1.0, 100.0) == pytest.approx(10.0)
    assert quantum_advantage(1.0, 1.0) == 0.0


def test_sql_force_noise_floor_is_zero_advantage(params):
    w = 2 * np.pi * np.logspace(1, 6, 7)
    ref = static_sql_force_noise(params, w)
    np.testing.assert_allclose(quantum_advantage(ref, ref), 0.0, atol=1e-12)


def test_record_advantage_consistent_with_ratio(params):
    rec = evaluate(params, DriveConfig(FORWARD, 5690.0), W1K)
    adv = record_advantage(rec, params)
    # bath subtracted: S_FF ratio reduces to n_sql / n_add
    assert adv[0] == pytest.approx(5 * math.log10(rec.n_sql[0] / rec.n_add[0]), rel=1e-10)


def test_metric_block_matches_records(params):
    drive = DriveConfig(FORWARD, 3000.0, np.pi / 2)
    rec = evaluate(params, drive, W1K)
    assert metric_block("n_add", params, drive, W1K, None)[0, 0] == pytest.approx(rec.n_add[0], rel=1e-12)
    assert metric_block("squeeze_db", params, drive, W1K, None)[0, 0] == pytest.approx(rec.squeeze_db[0], rel=1e-12)
    assert metric_block("s_ff", params, drive, W1K, None)[0, 0] == pytest.approx(rec.s_ff[0], rel=1e-12)
    pair = directional_pair(params, drive, W1K)
    assert metric_block("qnr", params, drive, W1K, None)[0, 0] == pytest.approx(qnr(pair)[0], rel=1e-12)
    assert metric_block("n_add", params, DriveConfig(BACKWARD, 9000.0), W1K, None) is None
    with pytest.raises(ParameterError):
        metric_block("fidelity", params, drive, W1K, None)


def test_sweep_axis_order_and_masking(params):
    axes = {"omega_hz": [1e2, 1e3, 1e4], "nu_rot_hz": [0.0, 5000.0, 9000.0]}
    res = sweep(params, DriveConfig(BACKWARD, 0.0, np.pi / 2), axes, "n_add_ratio")
    assert res.values.shape == (3, 3)
    assert res.names == ("omega_hz", "nu_rot_hz")
    assert res.mask[:, 2].all() and not res.mask[:, :2].any()
    ref = evaluate(params, DriveConfig(BACKWARD, 5000.0), 2 * np.pi * 1e4)
    assert res.values[2, 1] == pytest.approx(ref.n_add[0] / ref.n_sql[0], rel=1e-12)
    rows = list(res.rows())
    assert len(rows) == 9 and all(len(r) == 4 for r in rows)


def test_sweep_errors(params):
    with pytest.raises(ParameterError):
        sweep(params, DriveConfig(), {}, "qnr")
    with pytest.raises(ParameterError):
        sweep(params, DriveConfig(), {"radius": [1.0]}, "qnr")
    with pytest.raises(InstabilityError):
        sweep(params, DriveConfig(BACKWARD), {"nu_rot_hz": [9000.0, 10000.0]}, "n_add")


def test_sweep_best_uses_metric_direction(params):
    res = sweep(params, DriveConfig(FORWARD, 0.0, "optimal"), {"nu_rot_hz": np.linspace(0, 8000, 9)}, "qnr")
    best = res.best()
    assert best.value == np.nanmax(res.values)
    assert 0 < best.coords["nu_rot_hz"] < 8000


def test_golden_section_quadratic():
    x, fx = golden_section(lambda t: (t - 1.234) ** 2, -3.0, 5.0, 1e-9)
    assert x == pytest.approx(1.234, abs=1e-8)
    assert fx < 1e-16


def test_optimize_handles_nan_and_maximize():
    f = lambda x: math.nan if x < 0 else -(x - 2.0) ** 2 + 1.0  # noqa: E731
    x, v = optimize(f, [(-5.0, 5.0)], 1e-8, maximize=True)
    assert x == pytest.approx(2.0, abs=1e-6) and v == pytest.approx(1.0)
    (a, b), v = optimize(lambda a, b: (a - 1) ** 2 + 3 * (b + 0.5) ** 2, [(-2, 2), (-2, 2)], 1e-9)
    assert a == pytest.approx(1.0, abs=1e-6) and b == pytest.approx(-0.5, abs=1e-6)
    with pytest.raises(InstabilityError):
        optimize(lambda x: math.nan, [(0, 1)], 1e-3)
    with pytest.raises(ParameterError):
        optimize(lambda *x: 0.0, [(0, 1)] * 3, 1e-3)


def test_point_metric_refines_grid(params):
    drive = DriveConfig(FORWARD, 0.0, np.pi / 2)
    f = point_metric("n_add_ratio", params, drive, ["nu_rot_hz"])
    grid = sweep(params, drive, {"nu_rot_hz": np.linspace(0, 8000, 41)}, "n_add_ratio")
    x, v = optimize(f, [(0.0, 8000.0)], 1e-2)
    assert v <= np.nanmin(grid.values)
    assert f(x) == v
    assert 5000 < x < 6500
