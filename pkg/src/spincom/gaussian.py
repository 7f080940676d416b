"""Stationary Gaussian state of the linearized dynamics.

The covariance ``V_ij = <{x_i, x_j}>/2`` solves the Lyapunov equation
``A V + V A^T + D = 0``; vacuum is ``V = I/2``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InstabilityError, ParameterError
from .model import VACUUM, LinearModel, require_stable

LYAPUNOV_RTOL = 1e-10
PHYSICAL_TOL = 1e-9
SQUEEZE_TOL = 1e-9

#: index pairs of the two-dimensional marginals
PAIRS = {
    "optical": (0, 1),
    "mechanical": (2, 3),
    "cross": (0, 2),
}

#: symplectic form, one [[0, 1], [-1, 0]] block per mode
SYMPLECTIC = np.kron(np.eye(2), np.array([[0.0, 1.0], [-1.0, 0.0]]))


@dataclass(frozen=True, eq=False)
class CovarianceMatrix:
    V: np.ndarray

    @property
    def optical(self) -> np.ndarray:
        return self.V[:2, :2]

    @property
    def mechanical(self) -> np.ndarray:
        return self.V[2:, 2:]

    def heisenberg_eigenvalues(self) -> np.ndarray:
        """Eigenvalues of V + i Sigma / 2 (all >= 0 for a physical state)."""
        return np.linalg.eigvalsh(self.V + 0.5j * SYMPLECTIC)

    def is_physical(self, tol: float = PHYSICAL_TOL) -> bool:
        return bool(self.heisenberg_eigenvalues().min() > -tol)


def lyapunov_residual(model: LinearModel, V: np.ndarray) -> float:
    """Relative Frobenius residual ||A V + V A^T + D|| / ||D||."""
    A, D = model.drift, model.diffusion
    return float(np.linalg.norm(A @ V + V @ A.T + D) / np.linalg.norm(D))


def solve_lyapunov(model: LinearModel) -> CovarianceMatrix:
    """Stationary covariance by direct solution of the vectorized Lyapunov system."""
    require_stable(model)
    A, D = model.drift, model.diffusion
    n = A.shape[0]
    eye = np.eye(n)
    # row-major vec: vec(A V) = (A kron I) vec V, vec(V A^T) = (I kron A) vec V
    op = np.kron(A, eye) + np.kron(eye, A)
    V = np.linalg.solve(op, -D.reshape(-1)).reshape(n, n)
    V = 0.5 * (V + V.T)
    residual = lyapunov_residual(model, V)
    if not residual < LYAPUNOV_RTOL:
        raise InstabilityError(f"Lyapunov residual {residual:.3g} exceeds {LYAPUNOV_RTOL:g}")
    V.setflags(write=False)
    return CovarianceMatrix(V)


@dataclass(frozen=True)
class WignerProjection:
    """Two-dimensional marginal and its 1/e contour ellipse (semi-axes major, minor)."""

    pair: str
    V2: np.ndarray
    ellipse_axes: tuple[float, float]
    ellipse_angle: float

    def contour(self, n: int = 181) -> np.ndarray:
        """Points on the 1/e contour, shape ``(n, 2)``."""
        t = np.linspace(0.0, 2.0 * math.pi, n)
        a, b = self.ellipse_axes
        c, s = math.cos(self.ellipse_angle), math.sin(self.ellipse_angle)
        x = a * np.cos(t) * c - b * np.sin(t) * s
        y = a * np.cos(t) * s + b * np.sin(t) * c
        return np.column_stack([x, y])


def marginal(V, pair: str) -> np.ndarray:
    V = V.V if isinstance(V, CovarianceMatrix) else np.asarray(V, dtype=float)
    try:
        i, j = PAIRS[pair]
    except KeyError:
        raise ParameterError(f"unknown pair {pair!r}; choose from {sorted(PAIRS)}") from None
    return V[np.ix_([i, j], [i, j])]


def ellipse(V2) -> tuple[tuple[float, float], float]:
    """Semi-axes sqrt(2 lambda) and major-axis angle in [0, pi) of the 1/e contour."""
    V2 = np.asarray(V2, dtype=float)
    evals, evecs = np.linalg.eigh(V2)
    if evals.min() < -PHYSICAL_TOL:
        raise ParameterError("marginal covariance is not positive semidefinite")
    evals = np.clip(evals, 0.0, None)
    major = evecs[:, 1]
    if np.isclose(evals[0], evals[1], rtol=1e-12, atol=0.0):
        angle = 0.0
    else:
        angle = math.atan2(major[1], major[0]) % math.pi
    return (math.sqrt(2.0 * evals[1]), math.sqrt(2.0 * evals[0])), angle


def wigner_projection(V, pair: str = "optical") -> WignerProjection:
    V2 = marginal(V, pair)
    axes, angle = ellipse(V2)
    V2 = V2.copy()
    V2.setflags(write=False)
    return WignerProjection(pair, V2, axes, angle)


def wigner_function(V, points) -> np.ndarray:
    """Gaussian Wigner density with covariance ``V`` at ``points`` (shape ``(..., d)``).

    Normalized to unit integral; for the full state d = 4, for a marginal d = 2.
    """
    V = V.V if isinstance(V, CovarianceMatrix) else np.asarray(V, dtype=float)
    d = V.shape[0]
    x = np.asarray(points, dtype=float)
    quad = np.einsum("...i,ij,...j->...", x, np.linalg.inv(V), x)
    norm = (2.0 * math.pi) ** (d / 2) * math.sqrt(np.linalg.det(V))
    return np.exp(-0.5 * quad) / norm


def quadrature_squeezing_witness(V) -> tuple[float, bool]:
    """Smallest optical quadrature variance and whether it is below vacuum."""
    block = marginal(V, "optical")
    vmin = float(np.linalg.eigvalsh(block)[0])
    return vmin, vmin < VACUUM - SQUEEZE_TOL
