import math
from dataclasses import replace

import numpy as np
import pytest

from spincom.errors import InstabilityError, ParameterError
from spincom.model import (
    build_linear_model,
    linearize,
    require_stable,
    sagnac_shift,
    stability_check,
    steady_state,
    thermal_occupancy,
)
from spincom.params import BACKWARD, FORWARD, DriveConfig, PhysicalParams, hz

# Hand-evaluated with n = 1.4, R = 97 um, nu = 5.69 kHz, lambda = 1550 nm:
# n R (2 pi nu) (2 pi / lambda) (1 - 1/n^2) / (2 pi)
SAGNAC_HZ_AT_5690 = 1534176.6488


def test_sagnac_shift_hand_value(params):
    shift = sagnac_shift(params, DriveConfig(FORWARD, 5690.0))
    assert shift / (2 * math.pi) == pytest.approx(SAGNAC_HZ_AT_5690, rel=1e-9)


def test_sagnac_sign_and_linearity(params):
    fwd = sagnac_shift(params, DriveConfig(FORWARD, 1000.0))
    bwd = sagnac_shift(params, DriveConfig(BACKWARD, 1000.0))
    assert fwd > 0 and bwd == -fwd
    assert sagnac_shift(params, DriveConfig(FORWARD, 3000.0)) == pytest.approx(3 * fwd, rel=1e-14)
    assert sagnac_shift(params, DriveConfig(FORWARD, 0.0)) == 0.0


def test_dispersion_term_enters_with_wavelength_over_index(params):
    base = sagnac_shift(params, DriveConfig(FORWARD, 1000.0))
    disp = replace(params, dispersion=-1e4)
    factor = 1 - 1 / 1.4**2 - (1550e-9 / 1.4) * -1e4
    expected = base / (1 - 1 / 1.4**2) * factor
    assert sagnac_shift(disp, DriveConfig(FORWARD, 1000.0)) == pytest.approx(expected, rel=1e-12)


def test_thermal_occupancy_room_temperature(params):
    # k_B * 300 K / (hbar * 2 pi * 62.92 MHz), evaluated by hand
    assert thermal_occupancy(replace(params, temperature=300.0)) == pytest.approx(99348.1522, rel=1e-8)
    assert thermal_occupancy(replace(params, temperature=0.0)) == 0.0


def test_photon_number_fixed_point(params):
    """The compensated steady state is the fixed point of the cavity-pull iteration."""
    drive = DriveConfig(FORWARD, 2000.0)
    ss = steady_state(params, drive)
    hbar = 6.62607015e-34 / (2 * math.pi)
    shift = sagnac_shift(params, drive)
    photons = 0.0
    for _ in range(200):
        omega_l = params.omega0 - params.g0**2 * photons / params.omega_m
        photons = 4 * params.eta_c * params.kappa * params.power / (hbar * omega_l * (params.kappa**2 + 4 * shift**2))
    assert ss.photon_number == pytest.approx(photons, rel=1e-12)
    assert ss.effective_detuning == pytest.approx(shift, rel=1e-12)
    assert ss.enhanced_coupling == pytest.approx(math.sqrt(2) * params.g0 * math.sqrt(photons), rel=1e-12)
    assert ss.mech_displacement == pytest.approx(-params.g0 * photons / params.omega_m, rel=1e-12)


def test_directions_share_photon_number(params):
    f = steady_state(params, DriveConfig(FORWARD, 4000.0))
    b = steady_state(params, DriveConfig(BACKWARD, 4000.0))
    assert f.photon_number == b.photon_number
    assert f.cavity_phase == -b.cavity_phase


def test_drift_structure(params, spinning):
    steady, model = linearize(params, spinning)
    A = model.drift
    assert A[0, 0] == A[1, 1] == -params.kappa / 2
    assert A[2, 3] == params.omega_m and A[3, 2] == -params.omega_m
    assert A[3, 3] == -params.gamma_m
    np.testing.assert_allclose(model.diffusion, model.noise_input @ np.diag(model.noise) @ model.noise_input.T)
    with pytest.raises(ValueError):
        model.drift[0, 0] = 1.0


def test_bath_occupancy_toggle(params):
    steady, model = linearize(params, DriveConfig())
    assert model.bath_occupancy == 0.0
    _, thermal = linearize(replace(params, subtract_thermal=False), DriveConfig())
    assert thermal.bath_occupancy == pytest.approx(steady.thermal_occupancy)
    explicit = build_linear_model(steady, params, bath_occupancy=3.0)
    assert explicit.diffusion[3, 3] == pytest.approx(params.gamma_m * 7.0)


def test_backward_instability_detected(params):
    _, model = linearize(params, DriveConfig(BACKWARD, 9000.0))
    stable, abscissa = stability_check(model)
    assert not stable and abscissa > 0
    with pytest.raises(InstabilityError):
        require_stable(model)


def test_static_is_stable(params):
    assert stability_check(linearize(params, DriveConfig())[1])[0]


@pytest.mark.parametrize(
    "change, word",
    [
        (dict(eta_c=1.5), "eta_c"),
        (dict(power=-1.0), "power"),
        (dict(kappa=0.0), "kappa"),
        (dict(refractive_index=0.5), "refractive_index"),
        (dict(omega_m=hz(1e6)), "omega_m"),
        (dict(temperature=-1.0), "temperature"),
    ],
)
def test_parameter_validation_names_bound(change, word):
    with pytest.raises(ParameterError, match=word):
        PhysicalParams(**change)


def test_drive_validation():
    with pytest.raises(ParameterError):
        DriveConfig("sideways")
    with pytest.raises(ParameterError):
        DriveConfig(FORWARD, -1.0)
    assert DriveConfig(FORWARD, 10.0).reversed().direction == BACKWARD
