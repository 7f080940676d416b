"""Command line interface: ``spincom <subcommand> [options]``.

Every subcommand reads a profile (``--profile``, default built in), applies
flag overrides and writes one CSV per result into ``--output``. Exit codes:
0 success, 2 invalid input, 3 unstable dynamics, 4 file errors.
"""
from __future__ import annotations

import argparse
import csv
import logging
import math
import os
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import kernels
from .errors import InstabilityError, ParameterError, SpincomError
from .gaussian import quadrature_squeezing_witness, solve_lyapunov, wigner_projection
from .metrics import (
    directional_pair,
    enhancement_factor,
    evaluate,
    qnr,
    record_advantage,
)
from .model import linearize, stability_check
from .params import BACKWARD, FORWARD, TWO_PI, DriveConfig
from .profile import default_profile, load_profile
from .spectra import SpectrumRecord
from .sweep import AXES, MAXIMIZE, METRICS, metric_block, optimize, point_metric, sweep

log = logging.getLogger("spincom")

EXIT_OK, EXIT_INVALID, EXIT_UNSTABLE, EXIT_IO = 0, 2, 3, 4

ALIASES = {"nu_rot": "nu_rot_hz", "omega": "omega_hz", "power": "power_w", "g0": "g0_hz", "phi": "phi_lo"}

# reference figures quoted for the published device
PUBLISHED_ADVANTAGE_DB = 15.0
PUBLISHED_ENHANCEMENT = 1e3


def fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, str):
        return value
    return "%.17g" % float(value)


def write_csv(path: Path, header, rows) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])
    return path


def _phi_arg(text):
    if text.strip().lower() == "optimal":
        return "optimal"
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected radians or 'optimal', got {text!r}") from None
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError("phi-lo must be finite")
    return value


def _axes_arg(text):
    names = [ALIASES.get(t.strip(), t.strip()) for t in text.split(",") if t.strip()]
    for name in names:
        if name not in AXES:
            raise argparse.ArgumentTypeError(f"unknown axis {name!r}; choose from {', '.join(AXES)}")
    if len(set(names)) != len(names):
        raise argparse.ArgumentTypeError("axes must be distinct")
    return names


def _grid_arg(text):
    try:
        name, spec = text.split("=", 1)
        parts = spec.split(":")
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
        scale = parts[3] if len(parts) > 3 else "lin"
    except (ValueError, IndexError):
        raise argparse.ArgumentTypeError(f"expected NAME=LO:HI:N[:log], got {text!r}") from None
    name = ALIASES.get(name, name)
    if name not in AXES or n < 1 or scale not in ("lin", "log"):
        raise argparse.ArgumentTypeError(f"bad grid {text!r}")
    if scale == "log":
        if lo <= 0 or hi <= 0:
            raise argparse.ArgumentTypeError("log grid needs positive bounds")
        return name, np.logspace(math.log10(lo), math.log10(hi), n)
    return name, np.linspace(lo, hi, n)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--profile", type=Path, help="profile file (default: built-in profile)")
    common.add_argument("--output", type=Path, default=Path("."), help="directory for CSV output")
    common.add_argument("--direction", choices=(FORWARD, BACKWARD))
    common.add_argument("--nu-rot-hz", type=float, help="rotation rate in Hz")
    common.add_argument("--phi-lo", type=_phi_arg, help="homodyne angle in radians, or 'optimal'")
    common.add_argument("--probe-omega-hz", type=float, help="Fourier frequency for rotation scans (Hz)")
    common.add_argument("--omega-min-hz", type=float)
    common.add_argument("--omega-max-hz", type=float)
    common.add_argument("--omega-points", type=int)
    common.add_argument("--nu-rot-min-hz", type=float)
    common.add_argument("--nu-rot-max-hz", type=float)
    common.add_argument("--nu-rot-points", type=int)
    common.add_argument("--phi-lo-points", type=int)
    common.add_argument("--backend", choices=("auto", "cython", "numpy"), default="auto")
    common.add_argument("-q", "--quiet", action="store_true", help="suppress informational messages")

    parser = argparse.ArgumentParser(prog="spincom", description="Noise model of a spinning optomechanical force sensor.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("validate", parents=[common], help="check the profile and print derived quantities")
    sub.add_parser("spectrum", parents=[common], help="noise spectra over the frequency grid")
    sub.add_parser("squeeze", parents=[common], help="degree of squeezing versus rotation rate")
    p = sub.add_parser("wigner", parents=[common], help="optical covariance ellipses per direction")
    p.add_argument("--pair", choices=("optical", "mechanical", "cross"), default="optical")
    p = sub.add_parser("qnr", parents=[common], help="quantum nonreciprocity ratio")
    p.add_argument("--sweep", type=_axes_arg, help="comma-separated axes, e.g. nu_rot,phi_lo")
    sub.add_parser("advantage", parents=[common], help="quantum advantage and enhancement factor")
    p = sub.add_parser("sweep", parents=[common], help="metric on a product grid")
    p.add_argument("--axes", type=_axes_arg, required=True)
    p.add_argument("--metric", choices=METRICS, required=True)
    p.add_argument("--grid", type=_grid_arg, action="append", default=[], help="NAME=LO:HI:N[:log]")
    p = sub.add_parser("optimize", parents=[common], help="refine the optimum of a metric")
    p.add_argument("--metric", choices=METRICS, required=True)
    p.add_argument("--over", type=_axes_arg, required=True, help="one or two axes")
    p.add_argument("--grid", type=_grid_arg, action="append", default=[], help="bounds as NAME=LO:HI:N")
    p.add_argument("--tolerance", type=float, default=None)
    return parser


def _profile(args):
    profile = load_profile(args.profile) if args.profile else default_profile()
    drive = profile.drive
    changes = {}
    if args.direction:
        changes["direction"] = args.direction
    if args.nu_rot_hz is not None:
        changes["nu_rot"] = args.nu_rot_hz
    if args.phi_lo is not None:
        changes["phi_lo"] = args.phi_lo
    if changes:
        drive = replace(drive, **changes)
    grid_changes = {
        key: getattr(args, key)
        for key in ("probe_omega_hz", "omega_min_hz", "omega_max_hz", "omega_points",
                    "nu_rot_min_hz", "nu_rot_max_hz", "nu_rot_points", "phi_lo_points")
        if getattr(args, key) is not None
    }
    grids = replace(profile.grids, **grid_changes)
    grids.frequency_grid()
    return replace(profile, drive=drive, grids=grids)


def cmd_validate(args, profile):
    params, drive = profile.params, profile.drive
    print(f"profile: {profile.name}")
    print(f"kernel_backend: {kernels.BACKEND}")
    print(f"omega_m_hz: {fmt(params.omega_m / TWO_PI)}")
    print(f"kappa_hz: {fmt(params.kappa / TWO_PI)}")
    print(f"nu_rot_hz: {fmt(drive.nu_rot)}")
    for direction in (FORWARD, BACKWARD):
        steady, model = linearize(params, replace(drive, direction=direction))
        stable, abscissa = stability_check(model)
        print(f"[{direction}]")
        print(f"  sagnac_shift_hz: {fmt(steady.sagnac_shift / TWO_PI)}")
        print(f"  photon_number: {fmt(steady.photon_number)}")
        print(f"  coupling_g_hz: {fmt(steady.enhanced_coupling / TWO_PI)}")
        print(f"  cavity_phase: {fmt(steady.cavity_phase)}")
        print(f"  thermal_occupancy: {fmt(steady.thermal_occupancy)}")
        print(f"  bath_occupancy_used: {fmt(model.bath_occupancy)}")
        print(f"  spectral_abscissa_rads: {fmt(abscissa)}")
        print(f"  stable: {'yes' if stable else 'no'}")
    profile.check_stable()
    return EXIT_OK


def cmd_spectrum(args, profile):
    profile.check_stable()
    record = evaluate(profile.params, profile.drive, profile.grids.frequency_grid().points)
    path = write_csv(args.output / "spectrum.csv", SpectrumRecord.COLUMNS, record.rows())
    ratio = record.n_add / record.n_sql
    i = int(np.nanargmin(ratio))
    log.info("wrote %s; min n_add/n_sql = %.6g at %.6g Hz", path, ratio[i], record.omega[i] / TWO_PI)
    return EXIT_OK


def _pair_or_none(params, drive, omega):
    try:
        return directional_pair(params, drive, omega)
    except InstabilityError:
        return None


def _stable(params, drive):
    return stability_check(linearize(params, drive)[1])[0]


def cmd_squeeze(args, profile):
    params, grids = profile.params, profile.grids
    omega = np.array([TWO_PI * grids.probe_omega_hz])
    rows = []
    for nu in grids.nu_rot_grid():
        drive = replace(profile.drive, nu_rot=float(nu))
        fwd_ok = _stable(params, replace(drive, direction=FORWARD))
        bwd_ok = _stable(params, replace(drive, direction=BACKWARD))
        fwd = bwd = phi = math.nan
        if fwd_ok:
            fwd_rec = evaluate(params, replace(drive, direction=FORWARD), omega)
            phi, fwd = fwd_rec.phi_lo[0], fwd_rec.squeeze_db[0]
            if bwd_ok:
                bwd = evaluate(params, replace(drive, direction=BACKWARD), omega, phi_lo=phi).squeeze_db[0]
        rows.append((nu, phi, fwd, bwd, fwd_ok, bwd_ok))
    static = evaluate(params, DriveConfig(FORWARD, 0.0), omega, phi_lo=0.0)
    write_csv(args.output / "squeeze.csv",
              ("nu_rot_hz", "phi_lo", "squeeze_db_forward", "squeeze_db_backward", "stable_forward", "stable_backward"),
              rows)
    log.info("static device, amplitude quadrature: squeeze_db = %.3g", static.squeeze_db[0])
    return EXIT_OK


def cmd_wigner(args, profile):
    params, drive = profile.params, profile.drive
    cases = [("forward", replace(drive, direction=FORWARD)),
             ("backward", replace(drive, direction=BACKWARD)),
             ("static", DriveConfig(FORWARD, 0.0, drive.phi_lo))]
    rows, contour_rows = [], []
    for name, d in cases:
        _, model = linearize(params, d)
        if not stability_check(model)[0]:
            log.warning("%s drive is unstable; no stationary state", name)
            continue
        cov = solve_lyapunov(model)
        proj = wigner_projection(cov, args.pair)
        vmin, squeezed = quadrature_squeezing_witness(cov)
        v = proj.V2
        rows.append((name, args.pair, v[0, 0], v[0, 1], v[1, 1], *proj.ellipse_axes, proj.ellipse_angle, vmin, squeezed))
        contour_rows.extend((name, x, y) for x, y in proj.contour())
    vacuum = math.sqrt(2.0 * 0.5)
    contour_rows.extend(("vacuum", vacuum * math.cos(t), vacuum * math.sin(t)) for t in np.linspace(0, 2 * math.pi, 181))
    write_csv(args.output / "wigner.csv",
              ("case", "pair", "v_11", "v_12", "v_22", "semi_major", "semi_minor", "angle", "min_variance", "squeezed"),
              rows)
    write_csv(args.output / "wigner_contour.csv", ("case", "x", "y"), contour_rows)
    if not rows:
        raise InstabilityError("no stable case to reconstruct")
    return EXIT_OK


def cmd_qnr(args, profile):
    params, grids = profile.params, profile.grids
    if args.sweep:
        axes = {name: _default_grid(name, profile) for name in args.sweep}
        result = sweep(params, profile.drive, axes, "qnr", grids.probe_omega_hz)
        write_csv(args.output / "qnr_sweep.csv", (*result.names, "qnr", "masked"), result.rows())
        best = result.argmax()
        log.info("grid maximum QNR = %.6g at %s", best.value, _coords(best.coords))
        return EXIT_OK
    omega = np.array([TWO_PI * grids.probe_omega_hz])
    rows = []
    for nu in grids.nu_rot_grid():
        pair = _pair_or_none(params, replace(profile.drive, nu_rot=float(nu)), omega)
        if pair is None:
            rows.append((nu, math.nan, math.nan, math.nan, math.nan, math.nan, True))
            continue
        rows.append((nu, pair.forward.phi_lo[0], qnr(pair)[0], pair.forward.n_add[0],
                     pair.backward.n_add[0], pair.forward.n_sql[0], False))
    write_csv(args.output / "qnr.csv",
              ("nu_rot_hz", "phi_lo", "qnr", "n_add_forward", "n_add_backward", "n_sql", "masked"), rows)
    return EXIT_OK


def _coords(coords):
    return ", ".join(f"{k}={v:.6g}" for k, v in coords.items())


def _default_grid(name, profile, overrides=None):
    if overrides and name in overrides:
        return overrides[name]
    grids = profile.grids
    if name == "nu_rot_hz":
        return grids.nu_rot_grid()
    if name == "omega_hz":
        return grids.frequency_grid().hz
    if name == "phi_lo":
        return grids.phi_grid()
    raise ParameterError(f"axis {name!r} needs an explicit --grid {name}=LO:HI:N")


def advantage_scan(profile):
    """Rows of (nu, adv_forward, adv_backward, ratio_forward, ratio_backward) at the probe frequency."""
    params, grids = profile.params, profile.grids
    omega = np.array([TWO_PI * grids.probe_omega_hz])
    phi = profile.drive.phi_lo
    rows = []
    for nu in grids.nu_rot_grid():
        row = [nu]
        ratios = []
        for direction in (FORWARD, BACKWARD):
            d = replace(profile.drive, nu_rot=float(nu), direction=direction)
            if not _stable(params, d):
                row.append(math.nan)
                ratios.append(math.nan)
                continue
            rec = evaluate(params, d, omega, phi_lo=phi)
            row.append(record_advantage(rec, params)[0])
            ratios.append(rec.n_add[0] / rec.n_sql[0])
        rows.append((*row, *ratios))
    return rows


def cmd_advantage(args, profile):
    params = profile.params
    rows = advantage_scan(profile)
    write_csv(args.output / "advantage.csv",
              ("nu_rot_hz", "advantage_forward_db", "advantage_backward_db", "n_add_ratio_forward",
               "n_add_ratio_backward"), rows)
    table = np.array(rows, dtype=float)
    i = int(np.nanargmax(table[:, 1]))
    best_nu = table[i, 0]
    omegas = profile.grids.frequency_grid().points
    static = evaluate(params, DriveConfig(FORWARD, 0.0, profile.drive.phi_lo), omegas)
    summary = [("max_advantage_forward_db", table[i, 1]), ("at_nu_rot_hz", best_nu),
               ("published_advantage_db", PUBLISHED_ADVANTAGE_DB)]
    for label, nu in (("configured", profile.drive.nu_rot), ("best", best_nu)):
        try:
            spin = evaluate(params, replace(profile.drive, direction=FORWARD, nu_rot=float(nu)), omegas)
            summary.append((f"enhancement_factor_{label}_nu", enhancement_factor(static.s_ff, spin.s_ff)))
        except InstabilityError:
            summary.append((f"enhancement_factor_{label}_nu", math.nan))
    summary.append(("published_enhancement_factor", PUBLISHED_ENHANCEMENT))
    write_csv(args.output / "advantage_summary.csv", ("quantity", "value"), summary)
    for key, value in summary:
        print(f"{key}: {fmt(value)}")
    return EXIT_OK


def cmd_sweep(args, profile):
    overrides = dict(args.grid)
    axes = {name: _default_grid(name, profile, overrides) for name in args.axes}
    result = sweep(profile.params, profile.drive, axes, args.metric, profile.grids.probe_omega_hz)
    write_csv(args.output / "sweep.csv", (*result.names, args.metric, "masked"), result.rows())
    best = result.best()
    log.info("grid optimum %s = %.6g at %s (%d masked)", args.metric, best.value, _coords(best.coords),
             int(result.mask.sum()))
    return EXIT_OK


def cmd_optimize(args, profile):
    if len(args.over) not in (1, 2):
        raise ParameterError("--over takes one or two axes")
    overrides = dict(args.grid)
    bounds = []
    for name in args.over:
        grid = _default_grid(name, profile, overrides)
        bounds.append((float(np.min(grid)), float(np.max(grid))))
    tol = args.tolerance
    if tol is None:
        tol = [1e-4 * (hi - lo) if hi > lo else 1e-12 for lo, hi in bounds]
    fn = point_metric(args.metric, profile.params, profile.drive, args.over, profile.grids.probe_omega_hz)
    x, value = optimize(fn, bounds, tol, maximize=MAXIMIZE.get(args.metric, False))
    x = x if isinstance(x, tuple) else (x,)
    write_csv(args.output / "optimize.csv", ("metric", *args.over, "value"), [(args.metric, *x, value)])
    print(f"{args.metric}: {fmt(value)} at " + ", ".join(f"{n}={fmt(v)}" for n, v in zip(args.over, x)))
    return EXIT_OK


COMMANDS = {
    "validate": cmd_validate,
    "spectrum": cmd_spectrum,
    "squeeze": cmd_squeeze,
    "wigner": cmd_wigner,
    "qnr": cmd_qnr,
    "advantage": cmd_advantage,
    "sweep": cmd_sweep,
    "optimize": cmd_optimize,
}


class _Formatter(logging.Formatter):
    COLORS = {logging.ERROR: "\033[31m", logging.WARNING: "\033[33m"}

    def __init__(self, color):
        super().__init__("%(levelname)s: %(message)s")
        self.color = color

    def format(self, record):
        text = super().format(record)
        code = self.COLORS.get(record.levelno) if self.color else None
        return f"{code}{text}\033[0m" if code else text


def _setup_logging(quiet):
    color = sys.stderr.isatty() and not os.environ.get("NO_COLOR")
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(_Formatter(color))
    root = logging.getLogger("spincom")
    root.handlers[:] = [handler]
    root.setLevel(logging.WARNING if quiet else logging.INFO)
    root.propagate = False


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _setup_logging(args.quiet)
    try:
        if args.backend != "auto":
            kernels.use_backend(args.backend)
        profile = _profile(args)
        return COMMANDS[args.command](args, profile)
    except InstabilityError as exc:
        log.error("%s", exc)
        return EXIT_UNSTABLE
    except (ParameterError, SpincomError, ValueError) as exc:
        log.error("%s", exc)
        return EXIT_INVALID
    except OSError as exc:
        log.error("%s", exc)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
