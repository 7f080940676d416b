from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spincom.errors import BlindSensorError, ParameterError
from spincom.model import linearize
from spincom.params import FORWARD, DriveConfig
from spincom.spectra import (
    FrequencyGrid,
    SpectrumRecord,
    added_noise,
    analytic_added_noise,
    compute_output,
    homodyne_spectrum,
    mechanical_susceptibility,
    optimal_angle,
    optimal_coupling,
    output_spectra,
    spectrum_record,
    sql,
    squeeze_db,
    squeezing_spectrum,
    susceptibility,
)

OMEGAS = 2 * np.pi * np.array([10.0, 1e3, 1e5, 3e6, 6.3e7])


def reference_output(model, omega):
    """Direct transfer-matrix evaluation T = C chi B + F, S = T N T^dagger."""
    chi = np.linalg.inv(-1j * omega * np.eye(4) - model.drift)
    T = model.output @ chi @ model.noise_input + model.feedthrough
    return T @ np.diag(model.noise) @ T.conj().T


def test_output_matches_direct_evaluation(params, spinning):
    _, model = linearize(params, spinning)
    out = compute_output(model, OMEGAS)
    for k, w in enumerate(OMEGAS):
        S = reference_output(model, w)
        assert out.s_qq[k] == pytest.approx(S[0, 0].real, rel=1e-10)
        assert out.s_pp[k] == pytest.approx(S[1, 1].real, rel=1e-10)
        assert out.s_qp[k] == pytest.approx(S[0, 1].real, rel=1e-10, abs=1e-14)
        assert out.s_qp_imag[k] == pytest.approx(S[0, 1].imag, rel=1e-10, abs=1e-14)


def test_susceptibility_inverts_resolvent(params, spinning):
    _, model = linearize(params, spinning)
    chi = susceptibility(model, 2 * np.pi * 1e3)
    np.testing.assert_allclose((-1j * 2 * np.pi * 1e3 * np.eye(4) - model.drift) @ chi, np.eye(4), atol=1e-12)


@pytest.mark.parametrize("eta_c", [1.0, 0.4])
def test_dark_cavity_outputs_vacuum(params, eta_c):
    _, model = linearize(replace(params, power=0.0, eta_c=eta_c), DriveConfig(FORWARD, 3000.0))
    s_qq, s_pp, s_qp = output_spectra(model, OMEGAS)
    np.testing.assert_allclose(s_qq, 0.5, rtol=1e-12)
    np.testing.assert_allclose(s_pp, 0.5, rtol=1e-12)
    np.testing.assert_allclose(s_qp, 0.0, atol=1e-12)
    with pytest.raises(BlindSensorError):
        added_noise(model, OMEGAS, np.pi / 2)


def test_static_readout_matches_analytic_noise(params):
    """Resonant static phase readout well below kappa: shot plus back-action plus zero point."""
    steady, model = linearize(params, DriveConfig())
    w = 2 * np.pi * np.array([10.0, 100.0, 1e3])
    numeric = added_noise(model, w, np.pi / 2)
    analytic = analytic_added_noise(steady.enhanced_coupling, w, params.kappa, params.gamma_m, params.omega_m)
    np.testing.assert_allclose(numeric - 0.5, analytic, rtol=1e-6)


def test_optimal_coupling_reaches_sql(params):
    w = 2 * np.pi * np.logspace(1, 6, 11)
    g = optimal_coupling(w, params.kappa, params.gamma_m, params.omega_m)
    np.testing.assert_allclose(
        analytic_added_noise(g, w, params.kappa, params.gamma_m, params.omega_m), sql(params, w), rtol=1e-12
    )


def test_sql_on_resonance(params):
    assert sql(params, params.omega_m) == pytest.approx(0.5, rel=1e-12)
    assert abs(mechanical_susceptibility(params.omega_m, params.omega_m, params.gamma_m)) == pytest.approx(
        params.omega_m / (params.omega_m * params.gamma_m)
    )


psd = st.tuples(
    st.floats(0.01, 100.0), st.floats(0.01, 100.0), st.floats(-0.99, 0.99)
).map(lambda t: (t[0], t[1], t[2] * np.sqrt(t[0] * t[1])))


@settings(max_examples=200, deadline=None)
@given(psd)
def test_optimal_angle_is_global_minimum(s):
    s_qq, s_pp, s_qp = s
    angle, smin = optimal_angle(s_qq, s_pp, s_qp)
    assert 0 <= angle < np.pi
    assert homodyne_spectrum(s_qq, s_pp, s_qp, angle) == pytest.approx(smin, rel=1e-9, abs=1e-12)
    grid = homodyne_spectrum(s_qq, s_pp, s_qp, np.linspace(0, np.pi, 721))
    assert smin <= grid.min() + 1e-12 * max(s_qq, s_pp)
    # lambda_min = det / lambda_max >= det / trace
    assert smin >= (s_qq * s_pp - s_qp**2) / (s_qq + s_pp) * (1 - 1e-9)


def test_homodyne_limits():
    assert homodyne_spectrum(2.0, 3.0, 0.7, 0.0) == pytest.approx(2.0)
    assert homodyne_spectrum(2.0, 3.0, 0.7, np.pi / 2) == pytest.approx(3.0)
    assert homodyne_spectrum(2.0, 3.0, 0.7, np.pi / 4) == pytest.approx(2.5 + 0.7)


def test_squeeze_db_convention():
    assert squeeze_db(0.5) == 0.0
    assert squeeze_db(0.25) == pytest.approx(np.log10(2.0))
    assert squeeze_db(1.0) < 0


def test_squeezing_spectrum_optimal_not_worse(params, spinning):
    _, model = linearize(params, spinning)
    s_opt, _ = squeezing_spectrum(model, OMEGAS, "optimal")
    for phi in np.linspace(0, np.pi, 13):
        s_fix, _ = squeezing_spectrum(model, OMEGAS, phi)
        assert np.all(s_opt <= s_fix * (1 + 1e-12))
    with pytest.raises(ParameterError):
        squeezing_spectrum(model, OMEGAS, "best")


def test_spectrum_record_columns(params, spinning):
    _, model = linearize(params, spinning)
    rec = spectrum_record(model, params, OMEGAS, "optimal")
    rows = rec.rows()
    assert rows.shape == (len(OMEGAS), len(SpectrumRecord.COLUMNS))
    assert SpectrumRecord.COLUMNS[:10] == (
        "omega_hz", "s_qq", "s_pp", "s_qp", "r_m", "n_add", "n_sql", "s_ff", "s_qz", "squeeze_db"
    )
    np.testing.assert_allclose(rows[:, 0], OMEGAS / (2 * np.pi))
    np.testing.assert_allclose(rec.squeeze_db, squeeze_db(rec.s_qz))
    assert np.all(rec.r_m > 0)


@pytest.mark.parametrize(
    "points", [[1.0], [2.0, 1.0], [-1.0, 2.0], [[1.0, 2.0]]]
)
def test_frequency_grid_rejects(points):
    with pytest.raises(ParameterError):
        FrequencyGrid(np.array(points))


def test_frequency_grid_from_hz():
    g = FrequencyGrid.from_hz(10.0, 1e3, 3)
    np.testing.assert_allclose(g.hz, [10.0, 100.0, 1000.0])
    assert len(FrequencyGrid.default()) == 400
    with pytest.raises(ParameterError):
        FrequencyGrid.from_hz(10.0, 1.0)
