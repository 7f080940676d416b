"""Directional comparisons: nonreciprocity ratio, enhancement factor, quantum advantage."""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import ParameterError
from .model import linearize
from .params import BACKWARD, FORWARD, DriveConfig, PhysicalParams
from .spectra import SpectrumRecord, compute_output, force_noise_spectrum, spectrum_record, sql


def evaluate(params: PhysicalParams, drive: DriveConfig, omega, phi_lo=None, angle_from=None) -> SpectrumRecord:
    """Spectrum record of one configuration. Raises ``InstabilityError`` if unstable."""
    _, model = linearize(params, drive)
    phi = drive.phi_lo if phi_lo is None else phi_lo
    return spectrum_record(model, params, omega, phi, angle_from=angle_from)


@dataclass(frozen=True)
class DirectionalPair:
    forward: SpectrumRecord
    backward: SpectrumRecord

    def __post_init__(self):
        if not np.array_equal(self.forward.omega, self.backward.omega):
            raise ParameterError("directional pair evaluated on different frequencies")
        if not np.array_equal(self.forward.phi_lo, self.backward.phi_lo):
            raise ParameterError("directional pair evaluated at different homodyne angles")

    def swapped(self) -> "DirectionalPair":
        return DirectionalPair(self.backward, self.forward)


def directional_pair(params: PhysicalParams, drive: DriveConfig, omega, phi_lo=None) -> DirectionalPair:
    """Forward and backward records at the same rotation rate and detector angle.

    With ``phi_lo == "optimal"`` both directions use the angle that minimizes
    the forward output noise.
    """
    phi = drive.phi_lo if phi_lo is None else phi_lo
    fwd_drive = replace(drive, direction=FORWARD)
    bwd_drive = replace(drive, direction=BACKWARD)
    _, fwd_model = linearize(params, fwd_drive)
    angle_source = compute_output(fwd_model, omega)
    forward = spectrum_record(fwd_model, params, omega, phi, angle_from=angle_source)
    _, bwd_model = linearize(params, bwd_drive)
    backward = spectrum_record(bwd_model, params, omega, forward.phi_lo)
    return DirectionalPair(forward, backward)


def qnr_from(s_forward, s_backward):
    s_forward = np.asarray(s_forward, dtype=float)
    s_backward = np.asarray(s_backward, dtype=float)
    if np.any(~(s_forward > 0)) or np.any(~(s_backward > 0)):
        raise ParameterError("squeezing spectra must be positive")
    # difference of logs keeps the ratio exactly antisymmetric under swap
    return np.log10(2.0 * s_backward) - np.log10(2.0 * s_forward)


def qnr(pair: DirectionalPair):
    """Quantum nonreciprocity ratio -log10[2 S_qz(forward) / 2 S_qz(backward)]."""
    return qnr_from(pair.forward.s_qz, pair.backward.s_qz)


def enhancement_factor(static_sff, spinning_sff) -> float:
    """Ratio of the minimum static force noise to the minimum spinning force noise.

    Minima are taken over the frequencies where both scans are finite.
    """
    static_sff = np.asarray(static_sff, dtype=float)
    spinning_sff = np.asarray(spinning_sff, dtype=float)
    if static_sff.size == 0 or spinning_sff.size == 0:
        raise ParameterError("enhancement factor needs nonempty scans")
    if static_sff.shape != spinning_sff.shape:
        raise ParameterError("scans must share the frequency grid")
    common = np.isfinite(static_sff) & np.isfinite(spinning_sff)
    if not common.any():
        raise ParameterError("scans have no common finite frequency")
    return float(static_sff[common].min() / spinning_sff[common].min())


def static_sql_force_noise(params: PhysicalParams, omega, bath_occupancy=None):
    """Force noise of a static sensor operating exactly at the SQL."""
    if bath_occupancy is None:
        _, model = linearize(params, DriveConfig(FORWARD, 0.0))
        bath_occupancy = model.bath_occupancy
    return force_noise_spectrum(params, bath_occupancy, sql(params, omega))


def quantum_advantage(spinning_sff, static_sql_sff):
    """10 log10 sqrt(S_FF^SQL(static) / S_FF(spinning)) in dB."""
    ratio = np.asarray(static_sql_sff, dtype=float) / np.asarray(spinning_sff, dtype=float)
    return 10.0 * np.log10(np.sqrt(ratio))


def record_advantage(record: SpectrumRecord, params: PhysicalParams):
    return quantum_advantage(record.s_ff, static_sql_force_noise(params, record.omega, record.bath_occupancy))
