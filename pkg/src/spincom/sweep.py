"""Grid sweeps over configuration axes and optimum refinement."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, replace
from typing import Callable, Mapping, Sequence

import numpy as np

from .errors import InstabilityError, ParameterError
from .metrics import qnr_from, quantum_advantage, static_sql_force_noise
from .model import linearize, stability_check
from .params import BACKWARD, FORWARD, TWO_PI, DriveConfig, PhysicalParams
from .spectra import compute_output, force_noise_spectrum, sql

AXES = ("nu_rot_hz", "omega_hz", "phi_lo", "power_w", "g0_hz")
METRICS = ("n_add", "n_add_ratio", "s_qz", "squeeze_db", "qnr", "advantage_db", "s_ff")
MAXIMIZE = {"squeeze_db": True, "qnr": True, "advantage_db": True}


@dataclass(frozen=True)
class Optimum:
    index: tuple
    coords: dict
    value: float


@dataclass(frozen=True, eq=False)
class SweepResult:
    """Metric values on the product grid of ``axes`` (C order); masked where unstable."""

    axes: tuple
    metric: str
    values: np.ndarray
    mask: np.ndarray

    @property
    def names(self):
        return tuple(name for name, _ in self.axes)

    def _pick(self, index):
        index = tuple(int(i) for i in index)
        coords = {name: float(grid[i]) for (name, grid), i in zip(self.axes, index)}
        return Optimum(index, coords, float(self.values[index]))

    def argmin(self) -> Optimum:
        if self.mask.all():
            raise InstabilityError("every sweep point is masked")
        # nanargmin returns the first (lowest flat index) minimum
        return self._pick(np.unravel_index(np.nanargmin(self.values), self.values.shape))

    def argmax(self) -> Optimum:
        if self.mask.all():
            raise InstabilityError("every sweep point is masked")
        return self._pick(np.unravel_index(np.nanargmax(self.values), self.values.shape))

    def best(self) -> Optimum:
        return self.argmax() if MAXIMIZE.get(self.metric, False) else self.argmin()

    def rows(self):
        """Yield ``(coords..., value, masked)`` in C order."""
        grids = [grid for _, grid in self.axes]
        for index in itertools.product(*(range(len(g)) for g in grids)):
            coords = [g[i] for g, i in zip(grids, index)]
            yield (*coords, self.values[index], bool(self.mask[index]))


def _configure(params, drive, point):
    p_changes, d_changes = {}, {}
    if "power_w" in point:
        p_changes["power"] = point["power_w"]
    if "g0_hz" in point:
        p_changes["g0"] = TWO_PI * point["g0_hz"]
    if "nu_rot_hz" in point:
        d_changes["nu_rot"] = point["nu_rot_hz"]
    if p_changes:
        params = replace(params, **p_changes)
    if d_changes:
        drive = replace(drive, **d_changes)
    return params, drive


def _stable_output(params, drive, omegas):
    _, model = linearize(params, drive)
    if not stability_check(model)[0]:
        return None, model
    return compute_output(model, omegas), model


def metric_block(metric, params, drive, omegas, phis):
    """Metric on the (phi, omega) block for one configuration; ``None`` if unstable.

    ``phis`` is a sequence of angles, or ``None`` to use ``drive.phi_lo``
    (which may be ``"optimal"``, resolved from the forward/own output).
    """
    if metric not in METRICS:
        raise ParameterError(f"unknown metric {metric!r}; choose from {METRICS}")
    if metric == "qnr":
        fwd, _ = _stable_output(params, replace(drive, direction=FORWARD), omegas)
        bwd, _ = _stable_output(params, replace(drive, direction=BACKWARD), omegas)
        if fwd is None or bwd is None:
            return None
        angles = _angles(fwd, drive, phis)
        return np.array([qnr_from(fwd.quadrature(a), bwd.quadrature(a)) for a in angles])
    out, model = _stable_output(params, drive, omegas)
    if out is None:
        return None
    angles = _angles(out, drive, phis)
    rows = []
    n_sql = sql(params, omegas)
    for a in angles:
        s = out.quadrature(a)
        if metric == "s_qz":
            rows.append(s)
            continue
        if metric == "squeeze_db":
            rows.append(-np.log10(2.0 * s))
            continue
        r = out.response(a)
        with np.errstate(divide="ignore", invalid="ignore"):
            n_add = np.where(r > 0, s / r - model.bath_occupancy, np.inf)
        if metric == "n_add":
            rows.append(n_add)
        elif metric == "n_add_ratio":
            rows.append(n_add / n_sql)
        else:
            s_ff = force_noise_spectrum(params, model.bath_occupancy, n_add)
            if metric == "s_ff":
                rows.append(s_ff)
            else:
                ref = static_sql_force_noise(params, omegas, model.bath_occupancy)
                rows.append(quantum_advantage(s_ff, ref))
    return np.array(rows)


def _angles(out, drive, phis):
    if phis is not None:
        return [float(p) for p in phis]
    if isinstance(drive.phi_lo, str):
        return [out.optimal_angle()[0]]
    return [float(drive.phi_lo)]


def sweep(params: PhysicalParams, drive: DriveConfig, axes: Mapping[str, Sequence[float]],
          metric: str, omega_hz: float = 1e3) -> SweepResult:
    """Evaluate ``metric`` on the product grid of ``axes`` (an ordered mapping).

    Axes not listed keep their value from ``params``/``drive``; the Fourier
    frequency defaults to ``omega_hz``. Unstable points are masked (NaN).
    """
    if not axes:
        raise ParameterError("sweep needs at least one axis")
    for name in axes:
        if name not in AXES:
            raise ParameterError(f"unknown sweep axis {name!r}; choose from {AXES}")
    grids = {name: np.asarray(list(values), dtype=float) for name, values in axes.items()}
    for name, grid in grids.items():
        if grid.size == 0:
            raise ParameterError(f"axis {name!r} is empty")
    omegas = TWO_PI * grids.get("omega_hz", np.array([omega_hz]))
    phis = grids.get("phi_lo")
    outer = [n for n in grids if n not in ("omega_hz", "phi_lo")]
    n_phi = 1 if phis is None else len(phis)
    shape_outer = tuple(len(grids[n]) for n in outer)
    block = np.full(shape_outer + (n_phi, len(omegas)), np.nan)
    for index in itertools.product(*(range(s) for s in shape_outer)):
        point = {n: float(grids[n][i]) for n, i in zip(outer, index)}
        p, d = _configure(params, drive, point)
        values = metric_block(metric, p, d, omegas, phis)
        if values is not None:
            block[index] = values
    # canonical layout (outer..., phi, omega) -> requested axis order
    canonical = outer + ["phi_lo", "omega_hz"]
    if phis is None:
        block = block.take(0, axis=len(outer))
        canonical.remove("phi_lo")
    if "omega_hz" not in grids:
        block = block.take(0, axis=-1)
        canonical.remove("omega_hz")
    order = [canonical.index(n) for n in grids]
    values = np.transpose(block, order).copy()
    mask = ~np.isfinite(values)
    if mask.all():
        raise InstabilityError("all sweep points are unstable")
    return SweepResult(tuple((n, grids[n]) for n in grids), metric, values, mask)


INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def _finite(value):
    value = float(value)
    return value if math.isfinite(value) else math.inf


def golden_section(f: Callable[[float], float], a: float, b: float, tol: float):
    """Minimize a unimodal ``f`` on [a, b] to bracket width ``tol``; returns ``(x, f(x))``."""
    a, b = min(a, b), max(a, b)
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = _finite(f(c)), _finite(f(d))
    while b - a > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = _finite(f(c))
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = _finite(f(d))
    return (c, fc) if fc <= fd else (d, fd)


def optimize(metric: Callable, bounds, tolerance, grid_points: int = 21, maximize: bool = False,
             max_rounds: int = 50):
    """Coarse grid scan refined by golden-section (1-D) or coordinate descent (2-D).

    ``metric`` takes one float per dimension and may return NaN where it is
    undefined (treated as worst). ``bounds`` is ``[(lo, hi), ...]``; returns
    ``(argument, value)`` with ``argument`` a float (1-D) or tuple (2-D).
    """
    bounds = [tuple(map(float, b)) for b in bounds]
    if len(bounds) not in (1, 2):
        raise ParameterError("optimize supports one or two dimensions")
    tols = np.broadcast_to(np.asarray(tolerance, dtype=float), (len(bounds),))
    sign = -1.0 if maximize else 1.0

    def cost(*x):
        value = float(metric(*x))
        return sign * value if math.isfinite(value) else math.inf

    grids = [np.linspace(lo, hi, grid_points) for lo, hi in bounds]
    best_index, best = None, math.inf
    for index in itertools.product(range(grid_points), repeat=len(bounds)):
        value = cost(*(g[i] for g, i in zip(grids, index)))
        if value < best:
            best_index, best = index, value
    if best_index is None:
        raise InstabilityError("metric undefined at every coarse grid point")
    step = [(hi - lo) / (grid_points - 1) for lo, hi in bounds]
    x = [g[i] for g, i in zip(grids, best_index)]
    brackets = [(max(lo, xi - s), min(hi, xi + s)) for (lo, hi), xi, s in zip(bounds, x, step)]
    if len(bounds) == 1:
        xs, val = golden_section(lambda t: cost(t), *brackets[0], tols[0])
        if val > best:
            xs, val = x[0], best
        return xs, sign * val
    val = best
    for _ in range(max_rounds):
        moved = False
        for k in range(2):
            def along(t, k=k):
                y = list(x)
                y[k] = t
                return cost(*y)
            xk, vk = golden_section(along, *brackets[k], tols[k])
            if vk < val:
                if abs(xk - x[k]) > tols[k]:
                    moved = True
                x[k], val = xk, vk
        if not moved:
            break
    return tuple(x), sign * val


def point_metric(metric: str, params: PhysicalParams, drive: DriveConfig, names: Sequence[str],
                 omega_hz: float = 1e3):
    """Scalar metric as a function of the named axes, NaN where unstable."""
    for name in names:
        if name not in AXES:
            raise ParameterError(f"unknown axis {name!r}")

    def f(*x):
        point = dict(zip(names, x))
        omega = TWO_PI * point.pop("omega_hz", omega_hz)
        phi = point.pop("phi_lo", None)
        p, d = _configure(params, drive, point)
        block = metric_block(metric, p, d, np.array([omega]), None if phi is None else [phi])
        return math.nan if block is None else float(block[0, 0])

    return f
