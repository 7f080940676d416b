"""Frequency-domain noise analysis of the linearized sensor.

Fourier convention: ``x(omega) = chi(omega) B xi(omega)`` with
``chi = (-i omega I - A)^-1``. All spectra are symmetrized and normalized
so a vacuum quadrature gives 1/2. Frequencies are in rad/s.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import BlindSensorError, ParameterError, SingularResponseError
from .model import LinearModel, require_stable
from .params import HBAR, TWO_PI, PhysicalParams

log = logging.getLogger(__name__)

RESIDUAL_TOL = 1e-10
CONDITION_WARN = 1e12


@dataclass(frozen=True)
class FrequencyGrid:
    """Strictly increasing positive Fourier frequencies (rad/s)."""

    points: np.ndarray
    scale: str = "logarithmic"

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 1 or pts.size < 2:
            raise ParameterError("frequency grid needs at least 2 points")
        if not np.all(pts > 0):
            raise ParameterError("frequency grid points must be > 0")
        if not np.all(np.diff(pts) > 0):
            raise ParameterError("frequency grid must be strictly increasing")
        if self.scale not in ("linear", "logarithmic"):
            raise ParameterError(f"unknown grid scale {self.scale!r}")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @classmethod
    def from_hz(cls, f_min: float, f_max: float, n: int = 400, scale: str = "logarithmic"):
        if not 0 < f_min < f_max:
            raise ParameterError("need 0 < f_min < f_max")
        if scale == "logarithmic":
            f = np.logspace(math.log10(f_min), math.log10(f_max), n)
        else:
            f = np.linspace(f_min, f_max, n)
        return cls(TWO_PI * f, scale)

    @classmethod
    def default(cls):
        return cls.from_hz(10.0, 1e7, 400)

    @property
    def hz(self) -> np.ndarray:
        return self.points / TWO_PI

    def __len__(self):
        return len(self.points)


def _as_omegas(omega):
    arr = np.atleast_1d(np.asarray(omega, dtype=float))
    return np.ascontiguousarray(arr), np.ndim(omega) == 0


def _unwrap(values, scalar):
    return values[0] if scalar else values


def mechanical_susceptibility(omega, omega_m: float, gamma_m: float):
    """Bare mechanical susceptibility Omega_m / (Omega_m^2 - omega^2 - i omega Gamma_m)."""
    omega = np.asarray(omega, dtype=float)
    return omega_m / (omega_m**2 - omega**2 - 1j * omega * gamma_m)


def susceptibility(model: LinearModel, omega: float) -> np.ndarray:
    """Response matrix chi(omega) = (-i omega I - A)^-1 of a stable model."""
    require_stable(model)
    m = -1j * omega * np.eye(4) - model.drift
    cond = np.linalg.cond(m)
    if not np.isfinite(cond):
        raise SingularResponseError(f"-i*omega - A is singular at omega = {omega:.6g} rad/s")
    if cond > CONDITION_WARN:
        log.warning("ill-conditioned response at omega = %.6g rad/s (cond %.3g)", omega, cond)
    chi = np.linalg.solve(m, np.eye(4))
    residual = np.linalg.norm(m @ chi - np.eye(4))
    if residual > RESIDUAL_TOL:
        raise SingularResponseError(
            f"inversion residual {residual:.3g} exceeds {RESIDUAL_TOL:g} at omega = {omega:.6g} rad/s"
        )
    return chi


def _run_output(model: LinearModel, omegas: np.ndarray):
    spec, trans, bad = kernels.output_batch(
        model.drift,
        omegas,
        model.output,
        model.feedthrough,
        model.noise_input,
        model.noise,
        model.signal_input,
    )
    if bad >= 0:
        raise SingularResponseError(
            f"-i*omega - A is singular at omega = {omegas[bad]:.6g} rad/s"
        )
    return spec, trans


@dataclass(frozen=True)
class OutputSpectra:
    """Output quadrature spectra and signal transfer on a set of frequencies."""

    omega: np.ndarray
    s_qq: np.ndarray
    s_pp: np.ndarray
    s_qp: np.ndarray
    s_qp_imag: np.ndarray
    transfer: np.ndarray = field(repr=False)

    def quadrature(self, phi_lo):
        return homodyne_spectrum(self.s_qq, self.s_pp, self.s_qp, phi_lo)

    def response(self, phi_lo):
        t = self.transfer[:, 0] * np.cos(phi_lo) + self.transfer[:, 1] * np.sin(phi_lo)
        return np.abs(t) ** 2

    def optimal_angle(self):
        return optimal_angle(self.s_qq, self.s_pp, self.s_qp)


def compute_output(model: LinearModel, omega) -> OutputSpectra:
    """Evaluate the output kernel for one model on scalar or array ``omega``."""
    require_stable(model)
    omegas, _ = _as_omegas(omega)
    spec, trans = _run_output(model, omegas)
    return OutputSpectra(omegas, spec[:, 0], spec[:, 1], spec[:, 2], spec[:, 3], trans)


def output_spectra(model: LinearModel, omega):
    """Symmetrized ``(S_qq, S_pp, S_qp)`` of the transmitted field.

    The output quadratures follow from ``a_out = sqrt(eta_c kappa) a - a_in``,
    so the reflected input noise interferes with the intracavity field.
    ``S_qp`` is the real (symmetrized) part of the cross spectrum.
    """
    omegas, scalar = _as_omegas(omega)
    out = compute_output(model, omegas)
    return tuple(_unwrap(v, scalar) for v in (out.s_qq, out.s_pp, out.s_qp))


def cavity_spectra(model: LinearModel, omega) -> np.ndarray:
    """Diagonal of the intracavity spectral matrix chi D chi^dagger, shape ``(n, 4)``."""
    require_stable(model)
    omegas, scalar = _as_omegas(omega)
    diag, bad = kernels.cavity_batch(model.drift, model.diffusion, omegas)
    if bad >= 0:
        raise SingularResponseError(f"-i*omega - A is singular at omega = {omegas[bad]:.6g} rad/s")
    return diag[0] if scalar else diag


def homodyne_spectrum(s_qq, s_pp, s_qp, phi_lo):
    """Spectrum of the rotated quadrature q cos(phi) + p sin(phi)."""
    c, s = np.cos(phi_lo), np.sin(phi_lo)
    return s_qq * c**2 + s_pp * s**2 + 2.0 * s_qp * s * c


def optimal_angle(s_qq, s_pp, s_qp):
    """Homodyne angle in [0, pi) minimizing the detected spectrum, and that minimum.

    Closed-form diagonalization of the 2x2 quadratic form.
    """
    s_qq, s_pp, s_qp = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (s_qq, s_pp, s_qp)))
    mean = 0.5 * (s_qq + s_pp)
    radius = np.hypot(0.5 * (s_qq - s_pp), s_qp)
    # major axis at 0.5*atan2(2 s_qp, s_qq - s_pp); the minimum is perpendicular
    angle = np.mod(0.5 * np.arctan2(2.0 * s_qp, s_qq - s_pp) + 0.5 * np.pi, np.pi)
    return angle, mean - radius


def resolve_angle(out: OutputSpectra, phi_lo):
    """Per-frequency angle array; ``"optimal"`` minimizes this output's noise."""
    if isinstance(phi_lo, str):
        if phi_lo != "optimal":
            raise ParameterError(f"phi_lo must be a number or 'optimal', got {phi_lo!r}")
        return out.optimal_angle()[0]
    return np.broadcast_to(np.asarray(phi_lo, dtype=float), out.omega.shape)


def mechanical_response(model: LinearModel, omega, phi_lo):
    """|d q_out^phi / d f_sig|^2 for the force entering the mechanical momentum."""
    omegas, scalar = _as_omegas(omega)
    out = compute_output(model, omegas)
    return _unwrap(out.response(resolve_angle(out, phi_lo)), scalar)


def added_noise_from(out: OutputSpectra, phi, bath_occupancy: float):
    """Added noise quanta S_II / R_m - n_bath; raises if the response vanishes."""
    s_ii = out.quadrature(phi)
    r_m = out.response(phi)
    if np.any(~(r_m > 0)):
        raise BlindSensorError("mechanical response is zero: the force does not reach this quadrature")
    return s_ii / r_m - bath_occupancy


def added_noise(model: LinearModel, omega, phi_lo):
    """Force-referred added noise in phonon units (bath occupancy removed)."""
    omegas, scalar = _as_omegas(omega)
    out = compute_output(model, omegas)
    return _unwrap(added_noise_from(out, resolve_angle(out, phi_lo), model.bath_occupancy), scalar)


def analytic_added_noise(g, omega, kappa: float, gamma_m: float, omega_m: float):
    """Shot plus back-action noise of a resonant, static, phase-quadrature readout (kappa >> omega)."""
    g2 = np.asarray(g, dtype=float) ** 2
    chi2 = np.abs(mechanical_susceptibility(omega, omega_m, gamma_m)) ** 2
    return g2 / (kappa * gamma_m) + kappa / (16.0 * g2 * gamma_m * chi2)


def optimal_coupling(omega, kappa: float, gamma_m: float, omega_m: float):
    """Coupling minimizing :func:`analytic_added_noise`: g^2 = kappa / (4 |chi_m|)."""
    chi = np.abs(mechanical_susceptibility(omega, omega_m, gamma_m))
    return np.sqrt(kappa / (4.0 * chi))


def sql(params: PhysicalParams, omega):
    """Standard-quantum-limit added noise 1 / (2 Gamma_m |chi_m(omega)|)."""
    chi = mechanical_susceptibility(omega, params.omega_m, params.gamma_m)
    return 1.0 / (2.0 * params.gamma_m * np.abs(chi))


def force_noise_spectrum(params: PhysicalParams, n_bath, n_add):
    """Force noise 2 hbar m Gamma_m Omega_m (n_bath + n_add) in N^2/Hz."""
    return 2.0 * HBAR * params.mass * params.gamma_m * params.omega_m * (np.asarray(n_bath) + np.asarray(n_add))


def squeeze_db(s_qz):
    """Degree of squeezing -log10(2 S); positive when below vacuum."""
    return -np.log10(2.0 * np.asarray(s_qz))


def squeezing_spectrum(model: LinearModel, omega, phi_lo):
    """``(S_qz, degree)`` of the rotated output quadrature; ``phi_lo`` may be ``"optimal"``."""
    omegas, scalar = _as_omegas(omega)
    out = compute_output(model, omegas)
    s = out.quadrature(resolve_angle(out, phi_lo))
    return _unwrap(s, scalar), _unwrap(squeeze_db(s), scalar)


@dataclass(frozen=True)
class SpectrumRecord:
    """Per-frequency spectra of one configuration; every field is an array over ``omega``."""

    omega: np.ndarray
    phi_lo: np.ndarray
    s_qq: np.ndarray
    s_pp: np.ndarray
    s_qp: np.ndarray
    s_ii: np.ndarray
    r_m: np.ndarray
    n_add: np.ndarray
    n_sql: np.ndarray
    s_ff: np.ndarray
    s_qz: np.ndarray
    squeeze_db: np.ndarray
    bath_occupancy: float = 0.0

    COLUMNS = ("omega_hz", "s_qq", "s_pp", "s_qp", "r_m", "n_add", "n_sql", "s_ff", "s_qz", "squeeze_db", "phi_lo")

    def rows(self):
        cols = (self.omega / TWO_PI, self.s_qq, self.s_pp, self.s_qp, self.r_m, self.n_add,
                self.n_sql, self.s_ff, self.s_qz, self.squeeze_db, self.phi_lo)
        return np.column_stack(cols)


def spectrum_record(model: LinearModel, params: PhysicalParams, omega, phi_lo, angle_from=None) -> SpectrumRecord:
    """Full per-frequency record.

    ``angle_from`` supplies the :class:`OutputSpectra` whose optimal angle
    is used when ``phi_lo == "optimal"`` (for comparing directions at the
    same detector setting); by default this model's own optimum.
    """
    omegas, _ = _as_omegas(omega)
    out = compute_output(model, omegas)
    phi = resolve_angle(angle_from if angle_from is not None else out, phi_lo)
    s_ii = out.quadrature(phi)
    r_m = out.response(phi)
    with np.errstate(divide="ignore", invalid="ignore"):
        n_add = np.where(r_m > 0, s_ii / np.where(r_m > 0, r_m, 1.0) - model.bath_occupancy, np.inf)
    return SpectrumRecord(
        omega=omegas,
        phi_lo=np.array(phi, dtype=float),
        s_qq=out.s_qq,
        s_pp=out.s_pp,
        s_qp=out.s_qp,
        s_ii=s_ii,
        r_m=r_m,
        n_add=n_add,
        n_sql=sql(params, omegas),
        s_ff=force_noise_spectrum(params, model.bath_occupancy, n_add),
        s_qz=s_ii,
        squeeze_db=squeeze_db(s_ii),
        bath_occupancy=model.bath_occupancy,
    )
