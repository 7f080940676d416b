import math
from dataclasses import replace
from importlib.resources import files

import pytest

from spincom.errors import InstabilityError, ParameterError, ProfileError
from spincom.params import DriveConfig, hz
from spincom.profile import default_profile, dump_profile, load_profile, parse_profile

SHIPPED = files("spincom") / "profiles" / "default.ini"


def test_shipped_profile_is_default():
    assert load_profile(SHIPPED) == default_profile()


def test_empty_profile_is_default():
    assert parse_profile("") == default_profile()


def test_round_trip_is_exact():
    prof = default_profile()
    prof = replace(prof, params=replace(prof.params, eta_c=0.37, g0=hz(123.456)),
                   drive=DriveConfig("backward", 1234.5, "optimal"))
    assert parse_profile(dump_profile(prof)) == prof


def test_hz_and_rads_agree():
    a = parse_profile("[mechanics]\ng0_hz = 250\n")
    b = parse_profile(f"[mechanics]\ng0_rads = {2 * math.pi * 250!r}\n")
    assert a.params.g0 == b.params.g0 == hz(250)


def test_gamma_without_omega_recomputes_resonance():
    prof = parse_profile("[mechanics]\ngamma_m_hz = 1e3\n")
    assert prof.params.omega_m == pytest.approx(prof.params.mechanical_q * hz(1e3))


@pytest.mark.parametrize(
    "text, line, fragment",
    [
        ("[resonator]\nkappa = 1e6\n", 2, "unit suffix missing"),
        ("[resonator]\nradius = 1e-4\n", 2, "radius_m"),
        ("[drive]\n\npower_w = 1\nspeed = 3\n", 4, "unknown key"),
        ("[bath]\ntemperature_k = 1\ntemperature_k = 2\n", 3, None),
        ("[laser]\npower_w = 1\n", 1, "unknown section"),
        ("power_w = 1\n", 1, "section"),
        ("[drive]\npower_w = lots\n", 2, "bad value"),
        ("[bath]\nsubtract_thermal = maybe\n", 2, "true/false"),
    ],
)
def test_errors_carry_line_numbers(text, line, fragment):
    with pytest.raises(ProfileError) as info:
        parse_profile(text, "p.ini")
    assert info.value.lineno == line
    if fragment:
        assert fragment in str(info.value)


@pytest.mark.parametrize(
    "text",
    [
        "[resonator]\neta_c = 2\n",
        "[grids]\nomega_min_hz = 100\nomega_max_hz = 10\n",
        "[grids]\nnu_rot_points = 0\n",
        "[drive]\ndirection = up\n",
    ],
)
def test_invalid_values_rejected(text):
    with pytest.raises(ParameterError):
        parse_profile(text)


def test_missing_file_is_os_error(tmp_path):
    with pytest.raises(OSError):
        load_profile(tmp_path / "absent.ini")


def test_unstable_profile_needs_opt_in():
    text = "[drive]\ndirection = backward\nnu_rot_hz = 9000\n"
    with pytest.raises(InstabilityError, match="allow_unstable"):
        parse_profile(text).check_stable()
    prof = parse_profile("[profile]\nallow_unstable = true\n" + text)
    assert prof.check_stable() > 0


def test_grids():
    g = default_profile().grids
    assert len(g.frequency_grid()) == 400
    assert g.nu_rot_grid()[-1] == 12e3
    assert len(g.phi_grid()) == 90 and g.phi_grid()[-1] < math.pi
