"""Physical constants, device parameters and drive configuration.

Rates are angular frequencies in rad/s throughout. Values quoted in Hz are
converted with ``2*pi`` only where parameters enter from a profile or the
command line.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

from scipy import constants

from .errors import ParameterError

log = logging.getLogger(__name__)

HBAR = constants.hbar
K_B = constants.k
C_LIGHT = constants.c
TWO_PI = 2.0 * math.pi

FORWARD = "forward"
BACKWARD = "backward"
DIRECTIONS = (FORWARD, BACKWARD)


def hz(value: float) -> float:
    """Convert a cyclic frequency in Hz to rad/s."""
    return TWO_PI * value


@dataclass(frozen=True)
class PhysicalParams:
    """Resonator, mechanical mode, drive power and bath.

    ``omega_m`` may be left as ``None``; it is then fixed to
    ``mechanical_q * gamma_m``. ``subtract_thermal`` removes the Brownian
    force from every noise evaluation (the occupancy is still reported) so
    that spectra show the quantum noise alone.
    """

    refractive_index: float = 1.4
    radius: float = 97e-6
    wavelength: float = 1550e-9
    dispersion: float = 0.0
    optical_q: float = 3.2e7
    kappa: float = hz(6.43e6)
    eta_c: float = 1.0
    mass: float = 10e-12
    mechanical_q: float = 1.21e4
    gamma_m: float = hz(5.2e3)
    omega_m: float | None = None
    g0: float = hz(100.0)
    power: float = 10e-3
    temperature: float = 0.13
    detuning_mode: str = "compensated"
    subtract_thermal: bool = True

    def __post_init__(self):
        if self.omega_m is None:
            object.__setattr__(self, "omega_m", self.mechanical_q * self.gamma_m)
        self.validate()

    @property
    def omega0(self) -> float:
        """Static optical resonance 2*pi*c/lambda (rad/s)."""
        return TWO_PI * C_LIGHT / self.wavelength

    @property
    def kappa_ex(self) -> float:
        return self.eta_c * self.kappa

    @property
    def kappa_0(self) -> float:
        return (1.0 - self.eta_c) * self.kappa

    def validate(self) -> None:
        checks = [
            (self.refractive_index > 1.0, "refractive_index must be > 1"),
            (self.radius > 0.0, "radius must be > 0"),
            (self.wavelength > 0.0, "wavelength must be > 0"),
            (self.kappa > 0.0, "kappa must be > 0 (no stationary state without loss)"),
            (self.gamma_m > 0.0, "gamma_m must be > 0 (no stationary state without damping)"),
            (self.omega_m > 0.0, "omega_m must be > 0"),
            (self.mass > 0.0, "mass must be > 0"),
            (self.power >= 0.0, "power must be >= 0"),
            (self.temperature >= 0.0, "temperature must be >= 0"),
            (self.optical_q > 0.0, "optical_q must be > 0"),
            (self.mechanical_q > 0.0, "mechanical_q must be > 0"),
            (0.0 <= self.eta_c <= 1.0, "eta_c must lie in [0, 1]"),
            (self.g0 >= 0.0, "g0 must be >= 0"),
        ]
        for ok, message in checks:
            # comparisons against NaN are False, so NaN fails here as well
            if not ok:
                raise ParameterError(message)
        if self.detuning_mode != "compensated":
            raise ParameterError(
                f"detuning_mode must be 'compensated', got {self.detuning_mode!r}"
            )
        expected = self.mechanical_q * self.gamma_m
        if abs(self.omega_m - expected) > 0.01 * expected:
            raise ParameterError(
                "omega_m inconsistent with mechanical_q * gamma_m "
                f"({self.omega_m:.6g} vs {expected:.6g} rad/s, tolerance 1%)"
            )
        linewidth = self.omega0 / self.optical_q
        if abs(linewidth - self.kappa) > 0.2 * self.kappa:
            log.warning(
                "omega0/optical_q = %.4g rad/s differs from kappa = %.4g rad/s by more than 20%%",
                linewidth,
                self.kappa,
            )


@dataclass(frozen=True)
class DriveConfig:
    """Input side, rotation rate (Hz) and local-oscillator phase (rad).

    ``phi_lo`` may be the string ``"optimal"``: the angle is then chosen per
    Fourier frequency to minimize the detected quadrature noise.
    """

    direction: str = FORWARD
    nu_rot: float = 0.0
    phi_lo: float | str = field(default=math.pi / 2)

    def __post_init__(self):
        if self.direction not in DIRECTIONS:
            raise ParameterError(
                f"direction must be one of {DIRECTIONS}, got {self.direction!r}"
            )
        if not self.nu_rot >= 0.0:
            raise ParameterError("nu_rot must be >= 0 (spin sense is fixed; pick the drive side)")
        if isinstance(self.phi_lo, str):
            if self.phi_lo != "optimal":
                raise ParameterError(f"phi_lo must be a number or 'optimal', got {self.phi_lo!r}")
        elif not math.isfinite(self.phi_lo):
            raise ParameterError("phi_lo must be finite")

    @property
    def sign(self) -> int:
        return 1 if self.direction == FORWARD else -1

    @property
    def rotation_rate(self) -> float:
        """Angular velocity of the spinning resonator in rad/s."""
        return TWO_PI * self.nu_rot

    def reversed(self) -> "DriveConfig":
        other = BACKWARD if self.direction == FORWARD else FORWARD
        return DriveConfig(other, self.nu_rot, self.phi_lo)
