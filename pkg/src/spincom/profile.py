"""Profile files: ``key = value`` lines grouped under ``[section]`` headers.

Dimensional keys carry a unit suffix (``_hz`` is a cyclic frequency and is
multiplied by 2*pi, ``_rads`` is taken literally, ``_m``, ``_kg``, ``_w``,
``_k``, ``_per_m``). Unknown keys are errors; missing keys take the default
profile value.
"""
from __future__ import annotations

import configparser
import logging
import math
import re
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .errors import InstabilityError, ParameterError, ProfileError
from .model import linearize, stability_check
from .params import TWO_PI, DriveConfig, PhysicalParams
from .spectra import FrequencyGrid

log = logging.getLogger(__name__)

SECTIONS = ("profile", "resonator", "mechanics", "drive", "bath", "grids")


@dataclass(frozen=True)
class GridSpec:
    omega_min_hz: float = 10.0
    omega_max_hz: float = 1e7
    omega_points: int = 400
    omega_scale: str = "logarithmic"
    nu_rot_min_hz: float = 0.0
    nu_rot_max_hz: float = 12e3
    nu_rot_points: int = 100
    phi_lo_points: int = 90
    probe_omega_hz: float = 1e3

    def frequency_grid(self) -> FrequencyGrid:
        return FrequencyGrid.from_hz(self.omega_min_hz, self.omega_max_hz, self.omega_points, self.omega_scale)

    def nu_rot_grid(self) -> np.ndarray:
        return np.linspace(self.nu_rot_min_hz, self.nu_rot_max_hz, self.nu_rot_points)

    def phi_grid(self) -> np.ndarray:
        return np.linspace(0.0, math.pi, self.phi_lo_points, endpoint=False)


@dataclass(frozen=True)
class Profile:
    name: str = "default"
    params: PhysicalParams = field(default_factory=PhysicalParams)
    drive: DriveConfig = field(default_factory=lambda: DriveConfig("forward", 5690.0, math.pi / 2))
    grids: GridSpec = field(default_factory=GridSpec)
    note: str = (
        "Resonator Q, kappa, mass, Q_m and Gamma_m follow the published device. "
        "n, R, lambda, g0, P_in and T are chosen defaults, not published values."
    )
    allow_unstable: bool = False

    def check_stable(self, drive: DriveConfig | None = None) -> float:
        """Spectral abscissa of the configured drive; raises unless ``allow_unstable``."""
        _, model = linearize(self.params, drive or self.drive)
        stable, abscissa = stability_check(model)
        if not stable and not self.allow_unstable:
            raise InstabilityError(
                f"profile {self.name!r} is unstable (spectral abscissa {abscissa:.6g} rad/s); "
                "set allow_unstable = true under [profile] to sweep through it"
            )
        return abscissa


def default_profile() -> Profile:
    return Profile()


# key -> (target, attribute, kind); kind is the conversion applied to the text
_RATE = "rate"
KEYS = {
    "profile": {
        "name": ("profile", "name", "str"),
        "note": ("profile", "note", "str"),
        "allow_unstable": ("profile", "allow_unstable", "bool"),
    },
    "resonator": {
        "refractive_index": ("params", "refractive_index", "float"),
        "radius_m": ("params", "radius", "float"),
        "wavelength_m": ("params", "wavelength", "float"),
        "dispersion_per_m": ("params", "dispersion", "float"),
        "optical_q": ("params", "optical_q", "float"),
        "kappa": ("params", "kappa", _RATE),
        "eta_c": ("params", "eta_c", "float"),
    },
    "mechanics": {
        "mass_kg": ("params", "mass", "float"),
        "mechanical_q": ("params", "mechanical_q", "float"),
        "gamma_m": ("params", "gamma_m", _RATE),
        "omega_m": ("params", "omega_m", _RATE),
        "g0": ("params", "g0", _RATE),
    },
    "drive": {
        "power_w": ("params", "power", "float"),
        "detuning_mode": ("params", "detuning_mode", "str"),
        "direction": ("drive", "direction", "str"),
        "nu_rot_hz": ("drive", "nu_rot", "float"),
        "phi_lo": ("drive", "phi_lo", "angle"),
    },
    "bath": {
        "temperature_k": ("params", "temperature", "float"),
        "subtract_thermal": ("params", "subtract_thermal", "bool"),
    },
    "grids": {
        "omega_min_hz": ("grids", "omega_min_hz", "float"),
        "omega_max_hz": ("grids", "omega_max_hz", "float"),
        "omega_points": ("grids", "omega_points", "int"),
        "omega_scale": ("grids", "omega_scale", "str"),
        "nu_rot_min_hz": ("grids", "nu_rot_min_hz", "float"),
        "nu_rot_max_hz": ("grids", "nu_rot_max_hz", "float"),
        "nu_rot_points": ("grids", "nu_rot_points", "int"),
        "phi_lo_points": ("grids", "phi_lo_points", "int"),
        "probe_omega_hz": ("grids", "probe_omega_hz", "float"),
    },
}

# bare names that need a unit suffix, with the accepted spellings
_DIMENSIONAL = {}
for _section, _keys in KEYS.items():
    for _key, (_, _, _kind) in _keys.items():
        if _kind == _RATE:
            _DIMENSIONAL[_key] = (f"{_key}_hz", f"{_key}_rads")
        else:
            m = re.fullmatch(r"(.+?)_(hz|rads|m|kg|w|k|per_m)", _key)
            if m:
                _DIMENSIONAL[m.group(1)] = (_key,)

_BOOL = {"true": True, "yes": True, "1": True, "false": False, "no": False, "0": False}


def _line_of(text: str, section: str, key: str):
    current = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1].strip()
        elif current == section and re.match(rf"{re.escape(key)}\s*[=:]", line):
            return lineno
    return None


def _convert(kind, raw):
    if kind == "str":
        return raw
    if kind == "bool":
        try:
            return _BOOL[raw.lower()]
        except KeyError:
            raise ValueError(f"expected true/false, got {raw!r}") from None
    if kind == "int":
        return int(raw)
    if kind == "angle" and raw.strip().lower() == "optimal":
        return "optimal"
    value = float(raw)
    if not math.isfinite(value):
        raise ValueError(f"non-finite value {raw!r}")
    return value


def parse_profile(text: str, path=None) -> Profile:
    parser = configparser.ConfigParser(
        interpolation=None, inline_comment_prefixes=("#", ";"), strict=True, empty_lines_in_values=False
    )
    parser.optionxform = str
    try:
        parser.read_string(text, source=str(path or "<profile>"))
    except configparser.MissingSectionHeaderError as exc:
        raise ProfileError("expected a [section] header before the first key", exc.lineno, path) from None
    except configparser.ParsingError as exc:
        lineno = exc.errors[0][0] if exc.errors else None
        raise ProfileError("cannot parse line (expected 'key = value')", lineno, path) from None
    except (configparser.DuplicateOptionError, configparser.DuplicateSectionError) as exc:
        raise ProfileError(exc.message.split(": ", 1)[-1], getattr(exc, "lineno", None), path) from None

    values = {"profile": {}, "params": {}, "drive": {}, "grids": {}}
    seen = set()
    for section in parser.sections():
        if section not in KEYS:
            raise ProfileError(f"unknown section [{section}]; expected one of {', '.join(SECTIONS)}",
                               _line_of_section(text, section), path)
        table = KEYS[section]
        for key, raw in parser.items(section):
            lineno = _line_of(text, section, key)
            base, unit = key, None
            if key not in table:
                m = re.fullmatch(r"(.+)_(hz|rads)", key)
                if m and table.get(m.group(1), (None, None, None))[2] == _RATE:
                    base, unit = m.group(1), m.group(2)
                elif key in _DIMENSIONAL:
                    raise ProfileError(
                        f"unit suffix missing on '{key}' (write {' or '.join(_DIMENSIONAL[key])})", lineno, path
                    )
                else:
                    raise ProfileError(f"unknown key '{key}' in [{section}]", lineno, path)
            elif table[key][2] == _RATE:
                raise ProfileError(f"unit suffix missing on '{key}' (write {key}_hz or {key}_rads)", lineno, path)
            target, attr, kind = table[base]
            if (section, base) in seen:
                raise ProfileError(f"'{base}' given more than once in [{section}]", lineno, path)
            seen.add((section, base))
            try:
                if kind == _RATE:
                    value = float(raw)
                    if not math.isfinite(value):
                        raise ValueError(f"non-finite value {raw!r}")
                    value = TWO_PI * value if unit == "hz" else value
                else:
                    value = _convert(kind, raw)
            except ValueError as exc:
                raise ProfileError(f"bad value for '{key}': {exc}", lineno, path) from None
            values[target][attr] = value

    expected = {(s, k) for s, table in KEYS.items() for k in table}
    missing = sorted(f"[{s}] {k}" for s, k in expected - seen if not (s, k) == ("mechanics", "omega_m"))
    if len(missing) == len(expected) - 1:
        log.info("profile sets no keys; using the default profile")
    elif missing:
        log.info("using defaults for %d unset keys: %s", len(missing), ", ".join(missing))

    base = default_profile()
    try:
        params_kwargs = values["params"]
        if "omega_m" not in params_kwargs and ("gamma_m" in params_kwargs or "mechanical_q" in params_kwargs):
            params_kwargs["omega_m"] = None
        params = replace(base.params, **params_kwargs) if params_kwargs else base.params
        drive = replace(base.drive, **values["drive"])
        grids = replace(base.grids, **values["grids"])
        grids.frequency_grid()
        if grids.nu_rot_points < 1 or grids.phi_lo_points < 1:
            raise ParameterError("grid point counts must be >= 1")
        if grids.nu_rot_min_hz < 0 or grids.nu_rot_max_hz < grids.nu_rot_min_hz:
            raise ParameterError("need 0 <= nu_rot_min_hz <= nu_rot_max_hz")
    except ParameterError as exc:
        raise ParameterError(f"{path or '<profile>'}: {exc}") from None
    return replace(base, params=params, drive=drive, grids=grids, **values["profile"])


def _line_of_section(text, section):
    for lineno, raw in enumerate(text.splitlines(), 1):
        if raw.strip() == f"[{section}]":
            return lineno
    return None


def load_profile(path) -> Profile:
    """Read and validate a profile file; raises ``ProfileError``/``ParameterError``."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    return parse_profile(text, path)


def dump_profile(profile: Profile) -> str:
    """Serialize every key; rates are written in rad/s so loading is bit-exact."""
    sources = {"profile": profile, "params": profile.params, "drive": profile.drive, "grids": profile.grids}
    lines = []
    for section, table in KEYS.items():
        lines.append(f"[{section}]")
        for key, (target, attr, kind) in table.items():
            value = getattr(sources[target], attr)
            if kind == _RATE:
                lines.append(f"{key}_rads = {float(value)!r}")
            elif kind == "bool":
                lines.append(f"{key} = {'true' if value else 'false'}")
            elif isinstance(value, float):
                lines.append(f"{key} = {value!r}")
            else:
                text = str(value)
                if "\n" in text or "#" in text or ";" in text:
                    raise ParameterError(f"{key} cannot contain newlines or comment characters")
                lines.append(f"{key} = {text}")
        lines.append("")
    return "\n".join(lines)
