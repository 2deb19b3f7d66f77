"""Amplitude-damping channels in Kraus form and their closed-form action.

The correlated channel is the convex mixture

    (1 - eta) * (AD x AD) + eta * FCAD

stored as one Kraus family whose operators carry the square roots of the
mixture weights.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import NotPhysicalError, ParamRangeError, ShapeError
from .linalg import adjoint, as_matrix, multiply, tensor
from .states import XStateElements

CPTP_TOL = 1e-12


def check_unit_interval(name, value):
    value = float(value)
    if not 0.0 <= value <= 1.0:
        raise ParamRangeError(f"{name} must lie in [0, 1], got {value!r}")
    return value


@dataclass(frozen=True)
class ChannelParams:
    gamma: float
    eta: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "gamma", check_unit_interval("gamma", self.gamma))
        object.__setattr__(self, "eta", check_unit_interval("eta", self.eta))


@dataclass(frozen=True)
class KrausChannel:
    dim: int
    operators: tuple
    label: str = ""

    def __post_init__(self):
        ops = tuple(as_matrix(k) for k in self.operators)
        for k in ops:
            if k.shape != (self.dim, self.dim):
                raise ShapeError(f"Kraus operator of shape {k.shape} in a dim-{self.dim} channel")
        object.__setattr__(self, "operators", ops)

    def __len__(self):
        return len(self.operators)


def validate_cptp(channel):
    """Max entrywise deviation of sum_k K^H K from the identity."""
    total = sum(k.conj().T @ k for k in channel.operators)
    return float(np.max(np.abs(total - np.eye(channel.dim))))


def _checked(channel):
    dev = validate_cptp(channel)
    if dev > CPTP_TOL:
        raise NotPhysicalError(f"{channel.label or 'channel'} is not trace preserving (deviation {dev:.3e})")
    return channel


def _ad_ops(gamma):
    e0 = np.array([[1.0, 0.0], [0.0, math.sqrt(1.0 - gamma)]])
    e1 = np.array([[0.0, math.sqrt(gamma)], [0.0, 0.0]])
    return e0, e1


def _fcad_ops(gamma):
    a0 = np.diag([1.0, 1.0, 1.0, math.sqrt(1.0 - gamma)])
    a1 = np.zeros((4, 4))
    a1[0, 3] = math.sqrt(gamma)
    return a0, a1


def ad_single(gamma):
    gamma = check_unit_interval("gamma", gamma)
    return _checked(KrausChannel(2, _ad_ops(gamma), "AD"))


def ad_two_qubit(gamma):
    """Memoryless damping: the same single-qubit channel on both qubits."""
    gamma = check_unit_interval("gamma", gamma)
    ops = _ad_ops(gamma)
    return _checked(KrausChannel(4, tuple(tensor(a, b) for a in ops for b in ops), "AD x AD"))


def fcad(gamma):
    """Fully correlated damping: only the joint |11> -> |00> jump."""
    gamma = check_unit_interval("gamma", gamma)
    return _checked(KrausChannel(4, _fcad_ops(gamma), "FCAD"))


def cad(params):
    g, eta = params.gamma, params.eta
    ops = _ad_ops(g)
    memoryless = [math.sqrt(1.0 - eta) * tensor(a, b) for a in ops for b in ops]
    correlated = [math.sqrt(eta) * a for a in _fcad_ops(g)]
    return _checked(KrausChannel(4, tuple(memoryless + correlated), "CAD"))


def apply(channel, rho):
    """sum_k K rho K^H."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (channel.dim, channel.dim):
        raise ShapeError(f"state of shape {rho.shape} into a dim-{channel.dim} channel")
    out = np.zeros_like(rho)
    for k in channel.operators:
        out += multiply(multiply(k, rho), adjoint(k))
    return as_matrix(out)


def analytic_cad_elements(s, params):
    """Closed-form X-state entries after the correlated channel."""
    g, eta = params.gamma, params.eta
    gb, etab = 1.0 - g, 1.0 - eta
    a2, b2 = abs(s.alpha) ** 2, abs(s.beta) ** 2
    r11 = a2 + (etab * g * g + eta * g) * b2
    r22 = etab * g * gb * b2
    r44 = (etab * gb * gb + eta * gb) * b2
    r14 = (etab * gb + eta * math.sqrt(gb)) * s.alpha * s.beta.conjugate()
    return XStateElements(r11, r22, r22, r44, complex(r14))
