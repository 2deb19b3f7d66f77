"""Seeded random parameter draws shared by the verification harness and tests."""

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .channels import ChannelParams
from .measurements import MeasurementStrengths
from .states import InitialState, make_initial

P_CAP = 1.0 - 1e-6


@dataclass(frozen=True)
class Draw:
    state: InitialState
    params: ChannelParams
    strengths: MeasurementStrengths


def random_state(rng):
    """alpha|00> + beta|11> with uniform |alpha| and independent uniform phases."""
    mag = rng.uniform(0.0, 1.0)
    phase_a, phase_b = rng.uniform(0.0, 2.0 * math.pi, size=2)
    return make_initial(
        mag * cmath.exp(1j * phase_a),
        math.sqrt(1.0 - mag * mag) * cmath.exp(1j * phase_b),
    )


def random_draws(seed, count):
    """``count`` reproducible draws of (state, gamma, eta, p, q).

    gamma and eta are uniform on [0, 1]; p and q are uniform on [0, P_CAP] so
    the post-selection never vanishes identically.
    """
    rng = np.random.default_rng(seed)
    draws = []
    for _ in range(count):
        s = random_state(rng)
        gamma, eta = rng.uniform(0.0, 1.0, size=2)
        p, q = rng.uniform(0.0, P_CAP, size=2)
        draws.append(Draw(s, ChannelParams(gamma, eta), MeasurementStrengths(p, q)))
    return draws
