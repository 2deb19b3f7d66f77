"""Weak measurement before the channel, measurement reversal after it.

Two independent routes to the final state:

* :func:`run_protocol` multiplies out WM -> CAD -> QMR on the density matrix;
* :func:`analytic_qmr_elements` evaluates the closed-form X-state entries.

They share no code beyond parameter validation, so each checks the other.
"""

import math
from dataclasses import dataclass

import numpy as np

from .channels import apply, cad, check_unit_interval
from .errors import NullPostselectionError
from .linalg import adjoint, as_matrix, multiply
from .states import XStateElements, check_density, to_density

NULL_PROB = 1e-14


@dataclass(frozen=True)
class MeasurementStrengths:
    p: float = 0.0
    q: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "p", check_unit_interval("p", self.p))
        object.__setattr__(self, "q", check_unit_interval("q", self.q))


@dataclass(frozen=True)
class ProtocolOutcome:
    state: np.ndarray
    success_probability: float
    unnormalized_trace: float


@dataclass(frozen=True)
class AnalyticQmrTerms:
    U: float
    V: float
    W: float
    X: complex
    N: float


def wm_operator(p):
    """Weak measurement of strength ``p`` on both qubits (null outcome kept)."""
    p = check_unit_interval("p", p)
    k = math.sqrt(1.0 - p)
    return as_matrix(np.diag([1.0, k, k, k * k]))


def qmr_operator(q):
    """Reversal of strength ``q``: the weak measurement with |0> and |1> swapped."""
    q = check_unit_interval("q", q)
    k = math.sqrt(1.0 - q)
    return as_matrix(np.diag([k * k, k, k, 1.0]))


def apply_nonunitary(op, rho):
    """Return ``(op rho op^H, trace)``; the trace is the branch probability."""
    out = multiply(multiply(op, rho), adjoint(op))
    tr = np.trace(out)
    if abs(tr.imag) > 1e-12:
        raise ValueError(f"trace has imaginary part {tr.imag:.3e}")
    return out, float(tr.real)


def run_protocol(s, params, strengths):
    rho = to_density(s)
    rho, _ = apply_nonunitary(wm_operator(strengths.p), rho)
    rho = apply(cad(params), rho)
    rho, prob = apply_nonunitary(qmr_operator(strengths.q), rho)
    if prob <= NULL_PROB:
        raise NullPostselectionError(
            f"post-selection probability {prob:.3e} vanishes (p={strengths.p}, q={strengths.q})"
        )
    state = check_density(rho / prob)
    return ProtocolOutcome(state, prob, prob)


def qmr_terms(s, params, p):
    """U, V, W, X of the closed form; independent of the reversal strength."""
    g, eta = params.gamma, params.eta
    gb, etab, pb = 1.0 - g, 1.0 - eta, 1.0 - p
    a2, b2 = abs(s.alpha) ** 2, abs(s.beta) ** 2
    u = a2 + pb * pb * (etab * g * g + eta * g) * b2
    v = pb * pb * etab * g * gb * b2
    w = pb * pb * (etab * gb * gb + eta * gb) * b2
    x = pb * (etab * gb + eta * math.sqrt(gb)) * s.alpha * s.beta.conjugate()
    return u, v, w, complex(x)


def analytic_qmr_elements(s, params, strengths):
    """Closed-form normalized X-state entries after WM -> CAD -> QMR.

    Returns the elements and the :class:`AnalyticQmrTerms` used to build
    them. ``N * (|alpha|^2 + (1-p)^2 |beta|^2)`` is the success probability.
    """
    p, q = strengths.p, strengths.q
    qb, pb = 1.0 - q, 1.0 - p
    u, v, w, x = qmr_terms(s, params, p)
    wm_norm = abs(s.alpha) ** 2 + pb * pb * abs(s.beta) ** 2
    total = qb * qb * u + 2.0 * qb * v + w
    if wm_norm <= NULL_PROB or total <= NULL_PROB:
        raise NullPostselectionError(f"normalization {total:.3e} vanishes (p={p}, q={q})")
    n = total / wm_norm
    denom = n * wm_norm
    elements = XStateElements(
        qb * qb * u / denom,
        qb * v / denom,
        qb * v / denom,
        w / denom,
        qb * x / denom,
    )
    return elements, AnalyticQmrTerms(u, v, w, x, n)


def success_probability(s, params, strengths):
    """Closed-form joint post-selection probability of WM and QMR."""
    u, v, w, _ = qmr_terms(s, params, strengths.p)
    qb = 1.0 - strengths.q
    return qb * qb * u + 2.0 * qb * v + w
