from dataclasses import replace

import numpy as np
import pytest

from spincom.model import linearize, stability_check
from spincom.params import BACKWARD, FORWARD, DriveConfig, PhysicalParams, hz

OMEGA0 = PhysicalParams().omega0


@pytest.fixture
def params():
    return PhysicalParams()


@pytest.fixture
def spinning():
    return DriveConfig(FORWARD, 5690.0, np.pi / 2)


def random_profile(rng, require_both=True):
    """Draw a physically sensible profile; both directions stable when ``require_both``."""
    while True:
        kappa_hz = 10 ** rng.uniform(6, 7.5)
        p = PhysicalParams(
            radius=10 ** rng.uniform(-5, -3.5),
            kappa=hz(kappa_hz),
            optical_q=OMEGA0 / hz(kappa_hz),
            eta_c=rng.uniform(0.2, 1.0),
            power=10 ** rng.uniform(-5, -2),
            g0=hz(10 ** rng.uniform(1, 2.5)),
            temperature=rng.uniform(0.01, 4.0),
            subtract_thermal=bool(rng.integers(2)),
        )
        drive = DriveConfig(FORWARD, rng.uniform(0.0, 8000.0), rng.uniform(0, np.pi))
        directions = (FORWARD, BACKWARD) if require_both else (FORWARD,)
        if all(stability_check(linearize(p, replace(drive, direction=d))[1])[0]
               for d in directions):
            return p, drive
