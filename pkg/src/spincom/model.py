"""Classical working point and linearized state-space model.

State order is ``(dq, dp, dq_m, dp_m)``: optical amplitude and phase
quadratures in the frame of the drive, then mechanical position and
momentum (all dimensionless, vacuum variance 1/2).

Noise inputs are ordered ``(q_in, p_in, q_0, p_0, f_in)``: the coupling
port, the intrinsic-loss port and the mechanical bath force.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InstabilityError, ParameterError
from .params import C_LIGHT, HBAR, K_B, DriveConfig, PhysicalParams

#: symmetrized vacuum variance of a quadrature
VACUUM = 0.5


def sagnac_shift(params: PhysicalParams, drive: DriveConfig) -> float:
    """Rotation-induced resonance shift of the driven mode (rad/s).

    Positive for forward input, negative for backward input.
    """
    n = params.refractive_index
    lam = params.wavelength
    factor = 1.0 - 1.0 / n**2 - (lam / n) * params.dispersion
    magnitude = n * params.radius * drive.rotation_rate * params.omega0 / C_LIGHT * factor
    return drive.sign * magnitude


def thermal_occupancy(params: PhysicalParams) -> float:
    """High-temperature mean phonon number k_B T / (hbar Omega_m)."""
    return K_B * params.temperature / (HBAR * params.omega_m)


@dataclass(frozen=True)
class SteadyState:
    photon_number: float
    mech_displacement: float
    effective_detuning: float
    enhanced_coupling: float
    cavity_phase: float
    sagnac_shift: float
    thermal_occupancy: float
    drive_frequency: float
    drive_detuning: float


def steady_state(params: PhysicalParams, drive: DriveConfig) -> SteadyState:
    """Mean intracavity field and mechanical offset.

    With the compensated drive detuning ``Delta_c = -g0 * q_m`` the
    effective detuning equals the Sagnac shift. The photon number still
    depends on the laser frequency ``omega_l = omega0 - Delta_c`` through the
    photon energy; since ``Delta_c = g0**2 |alpha|**2 / Omega_m`` this is a
    quadratic in ``|alpha|**2`` solved in closed form.
    """
    if params.power < 0:
        raise ParameterError("power must be >= 0")
    delta_f = sagnac_shift(params, drive)
    kappa = params.kappa
    omega0 = params.omega0
    # |alpha|^2 * hbar * omega_l = k_num
    k_num = 4.0 * params.eta_c * kappa * params.power / (HBAR * (kappa**2 + 4.0 * delta_f**2))
    shift = params.g0**2 / params.omega_m
    disc = omega0**2 - 4.0 * shift * k_num
    if disc < 0:
        raise ParameterError("drive too strong: no compensated working point exists")
    # stable root of shift*x^2 - omega0*x + k_num = 0
    photons = 2.0 * k_num / (omega0 + math.sqrt(disc))
    q_m = -params.g0 * photons / params.omega_m
    delta_c = -params.g0 * q_m
    eff = (delta_c + params.g0 * q_m) + delta_f
    return SteadyState(
        photon_number=photons,
        mech_displacement=q_m,
        effective_detuning=eff,
        enhanced_coupling=math.sqrt(2.0) * params.g0 * math.sqrt(photons),
        cavity_phase=math.atan(-2.0 * eff / kappa),
        sagnac_shift=delta_f,
        thermal_occupancy=thermal_occupancy(params),
        drive_frequency=omega0 - delta_c,
        drive_detuning=delta_c,
    )


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class LinearModel:
    """Linear Langevin model ``dx/dt = A x + B xi`` with its readout.

    ``diffusion`` is ``B diag(noise) B^T``. The optical output quadratures
    are ``output @ x + feedthrough @ xi``; the force signal enters through
    ``signal_input``.
    """

    drift: np.ndarray
    diffusion: np.ndarray
    signal_input: np.ndarray
    noise_input: np.ndarray
    noise: np.ndarray
    output: np.ndarray
    feedthrough: np.ndarray
    kappa: float
    gamma_m: float
    omega_m: float
    bath_occupancy: float


def build_linear_model(steady: SteadyState, params: PhysicalParams, bath_occupancy=None) -> LinearModel:
    """Drift, diffusion and readout of the linearized dynamics.

    ``bath_occupancy`` overrides the mechanical bath occupancy; by default it
    is the thermal occupancy, or zero when ``params.subtract_thermal``.
    """
    kappa, gm, om = params.kappa, params.gamma_m, params.omega_m
    delta = steady.effective_detuning
    g = steady.enhanced_coupling
    s, c = math.sin(steady.cavity_phase), math.cos(steady.cavity_phase)
    drift = [
        [-kappa / 2, delta, g * s, 0.0],
        [-delta, -kappa / 2, -g * c, 0.0],
        [0.0, 0.0, 0.0, om],
        [-g * c, -g * s, -om, -gm],
    ]
    if bath_occupancy is None:
        bath_occupancy = 0.0 if params.subtract_thermal else steady.thermal_occupancy
    if bath_occupancy < 0:
        raise ParameterError("bath occupancy must be >= 0")
    ext = math.sqrt(params.eta_c * kappa)
    loss = math.sqrt((1.0 - params.eta_c) * kappa)
    force = math.sqrt(2.0 * gm)
    noise_input = np.zeros((4, 5))
    noise_input[0, 0] = noise_input[1, 1] = ext
    noise_input[0, 2] = noise_input[1, 3] = loss
    noise_input[3, 4] = force
    noise = np.array([VACUUM] * 4 + [bath_occupancy + VACUUM])
    diffusion = noise_input @ np.diag(noise) @ noise_input.T
    output = np.zeros((2, 4))
    output[0, 0] = output[1, 1] = ext
    feedthrough = np.zeros((2, 5))
    feedthrough[0, 0] = feedthrough[1, 1] = -1.0
    return LinearModel(
        drift=_frozen(drift),
        diffusion=_frozen(diffusion),
        signal_input=_frozen([0.0, 0.0, 0.0, force]),
        noise_input=_frozen(noise_input),
        noise=_frozen(noise),
        output=_frozen(output),
        feedthrough=_frozen(feedthrough),
        kappa=kappa,
        gamma_m=gm,
        omega_m=om,
        bath_occupancy=float(bath_occupancy),
    )


def linearize(params: PhysicalParams, drive: DriveConfig, bath_occupancy=None):
    """Convenience: ``(steady_state, linear_model)`` for one configuration."""
    steady = steady_state(params, drive)
    return steady, build_linear_model(steady, params, bath_occupancy)


def stability_check(model: LinearModel) -> tuple[bool, float]:
    """Return ``(stable, spectral_abscissa)``; stable means every eigenvalue has Re < 0."""
    abscissa = float(np.max(np.linalg.eigvals(model.drift).real))
    return abscissa < 0.0, abscissa


def require_stable(model: LinearModel) -> None:
    stable, abscissa = stability_check(model)
    if not stable:
        raise InstabilityError(
            f"linearized dynamics are not stable (spectral abscissa {abscissa:.6g} rad/s)"
        )
