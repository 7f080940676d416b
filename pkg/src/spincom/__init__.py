"""Linearized noise model of a spinning optomechanical force sensor.

Computes the Sagnac-shifted working point, output quadrature spectra,
one-way squeezing, force-referred added noise against the standard quantum
limit, and the stationary Gaussian state.
"""
from .errors import (
    BlindSensorError,
    InstabilityError,
    ParameterError,
    ProfileError,
    SingularResponseError,
    SpincomError,
)
from .gaussian import (
    CovarianceMatrix,
    WignerProjection,
    quadrature_squeezing_witness,
    solve_lyapunov,
    wigner_function,
    wigner_projection,
)
from .kernels import BACKEND
from .metrics import (
    DirectionalPair,
    directional_pair,
    enhancement_factor,
    evaluate,
    qnr,
    quantum_advantage,
)
from .model import (
    LinearModel,
    SteadyState,
    build_linear_model,
    linearize,
    sagnac_shift,
    stability_check,
    steady_state,
    thermal_occupancy,
)
from .params import BACKWARD, FORWARD, DriveConfig, PhysicalParams
from .spectra import (
    FrequencyGrid,
    SpectrumRecord,
    added_noise,
    analytic_added_noise,
    force_noise_spectrum,
    homodyne_spectrum,
    mechanical_response,
    mechanical_susceptibility,
    output_spectra,
    sql,
    squeezing_spectrum,
    susceptibility,
)
from .sweep import SweepResult, optimize, sweep

__version__ = "0.1.0"
