"""Concurrence, the optimal reversal strength, and sudden-death criteria.

Closed forms keep the sign conventions they are usually quoted with: the
channel-only ``delta_cad`` excludes the factor 2 (``C = 2 max(0, delta)``),
while the post-reversal ``delta_qmr`` and ``delta_opt`` include it
(``C = max(0, delta)``).
"""

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .channels import ChannelParams
from .errors import DegenerateStateError, NotPSDError, NullPostselectionError, NumericBreakdownError, ParamRangeError
from .linalg import PSD_TOL, SIGMA_Y, hermitian_eigensystem, tensor
from .measurements import NULL_PROB, qmr_terms
from .optimize import bisect, scan_roots

NUMERIC_WOOTTERS = "numeric_wootters"
CLOSED_FORM_CAD = "closed_form_cad"
CLOSED_FORM_QMR = "closed_form_qmr"

YY = tensor(SIGMA_Y, SIGMA_Y)
BREAKDOWN_TOL = 1e-8


@dataclass(frozen=True)
class ConcurrenceReport:
    concurrence: float
    delta: float
    sqrt_eigenvalues: Tuple[float, float, float, float]
    method: str

    @property
    def esd(self):
        return self.concurrence == 0.0


@dataclass(frozen=True)
class CriticalParams:
    eta_c: Optional[float] = None
    p_c: Optional[float] = None
    esd_interval: Optional[Tuple[float, float]] = None


def wootters_concurrence(rho):
    """Concurrence of a two-qubit density matrix from its spin-flip spectrum.

    With rho = B B^H (B = V diag(sqrt(mu)) from the eigen-decomposition), the
    eigenvalues of rho * rho_tilde are the squared singular values of
    T = B^H (Y x Y) B^*. The singular values are read off the Hermitian
    dilation [[0, T], [T^H, 0]], whose spectrum is {+sigma_i, -sigma_i}, so
    no square root of a near-zero eigenvalue is ever taken.
    """
    rho = np.asarray(rho, dtype=complex)
    mu, vecs = hermitian_eigensystem(rho)
    if mu[-1] < -PSD_TOL:
        raise NotPSDError(f"density matrix has eigenvalue {mu[-1]:.3e}")
    b = vecs * np.sqrt(np.clip(mu, 0.0, None))
    t = b.conj().T @ YY @ b.conj()
    n = t.shape[0]
    dilation = np.zeros((2 * n, 2 * n), dtype=complex)
    dilation[:n, n:] = t
    dilation[n:, :n] = t.conj().T
    spectrum, _ = hermitian_eigensystem(dilation)
    asymmetry = np.max(np.abs(spectrum + spectrum[::-1]))
    if asymmetry > BREAKDOWN_TOL:
        raise NumericBreakdownError(f"singular-value spectrum is not symmetric ({asymmetry:.3e})")
    roots = tuple(float(x) for x in np.clip(spectrum[:n], 0.0, None))
    delta = roots[0] - roots[1] - roots[2] - roots[3]
    return ConcurrenceReport(max(0.0, delta), delta, roots, NUMERIC_WOOTTERS)


def _x_state_roots(r11, r22, r33, r44, r14):
    a = math.sqrt(max(r11 * r44, 0.0))
    b = math.sqrt(max(r22 * r33, 0.0))
    c = abs(r14)
    return tuple(sorted((a + c, abs(a - c), b, b), reverse=True))


def _coherence_factor(gamma, eta):
    return (1.0 - eta) * (1.0 - gamma) + eta * math.sqrt(1.0 - gamma)


def delta_cad(s, params):
    g, eta = params.gamma, params.eta
    b = abs(s.beta)
    return _coherence_factor(g, eta) * abs(s.alpha) * b - (1.0 - eta) * g * (1.0 - g) * b * b


def concurrence_cad_closed(s, params):
    g, eta = params.gamma, params.eta
    gb, etab = 1.0 - g, 1.0 - eta
    b2 = abs(s.beta) ** 2
    d = delta_cad(s, params)
    roots = _x_state_roots(
        abs(s.alpha) ** 2 + (etab * g * g + eta * g) * b2,
        etab * g * gb * b2,
        etab * g * gb * b2,
        (etab * gb * gb + eta * gb) * b2,
        _coherence_factor(g, eta) * abs(s.alpha * s.beta),
    )
    return ConcurrenceReport(2.0 * max(0.0, d), d, roots, CLOSED_FORM_CAD)


def delta_qmr(s, params, strengths):
    qb = 1.0 - strengths.q
    u, v, w, x = qmr_terms(s, params, strengths.p)
    denom = qb * qb * u + 2.0 * qb * v + w
    if denom <= NULL_PROB:
        raise NullPostselectionError(f"normalization {denom:.3e} vanishes")
    return 2.0 * qb * (abs(x) - v) / denom


def concurrence_qmr_closed(s, params, strengths):
    qb = 1.0 - strengths.q
    u, v, w, x = qmr_terms(s, params, strengths.p)
    denom = qb * qb * u + 2.0 * qb * v + w
    if denom <= NULL_PROB:
        raise NullPostselectionError(f"normalization {denom:.3e} vanishes")
    d = 2.0 * qb * (abs(x) - v) / denom
    roots = _x_state_roots(qb * qb * u / denom, qb * v / denom, qb * v / denom, w / denom, qb * x / denom)
    return ConcurrenceReport(max(0.0, d), d, roots, CLOSED_FORM_QMR)


def optimal_q(s, params, p):
    """Reversal strength q = 1 - sqrt(W/U), clamped to [0, 1]."""
    if s.alpha == 0:
        raise DegenerateStateError("optimal reversal is undefined for alpha = 0")
    u, _, w, _ = qmr_terms(s, params, p)
    return min(1.0, max(0.0, 1.0 - math.sqrt(w / u)))


def delta_opt(s, params, p):
    """Upper bound on ``delta_qmr`` over q, attained at :func:`optimal_q`.

    When W > U the unconstrained optimum lies at q < 0 and this value is not
    reachable with a physical reversal.
    """
    g, eta = params.gamma, params.eta
    gb, etab, pb = 1.0 - g, 1.0 - eta, 1.0 - p
    a, b = abs(s.alpha), abs(s.beta)
    lost = pb * etab * g * gb * b
    num = _coherence_factor(g, eta) * a - lost
    den = lost + math.sqrt((a * a + pb * pb * (etab * g * g + eta * g) * b * b) * (etab * gb * gb + eta * gb))
    if den <= 0.0:
        # only at gamma = 1 or alpha = 0, where the numerator vanishes too
        return 0.0
    return num / den


def optimal_concurrence(s, params, p):
    d = delta_opt(s, params, p)
    u, v, w, x = qmr_terms(s, params, p)
    qb = math.sqrt(w / u) if u > 0.0 else 0.0
    total = qb * qb * u + 2.0 * qb * v + w
    if total > 0.0:
        roots = _x_state_roots(qb * qb * u / total, qb * v / total, qb * v / total, w / total, qb * x / total)
    else:
        roots = (0.0,) * 4
    return ConcurrenceReport(max(0.0, d), d, roots, CLOSED_FORM_QMR)


def limit_delta_opt(params):
    """p -> 1 limit of :func:`delta_opt`; the same for every entangled input."""
    g, eta = params.gamma, params.eta
    den = math.sqrt((1.0 - eta) * (1.0 - g) + eta)
    if den == 0.0:
        raise DegenerateStateError("limit is undefined at gamma = 1, eta = 0")
    return ((1.0 - eta) * math.sqrt(1.0 - g) + eta) / den


def esd_boundary_ratio(gamma, eta, p=0.0):
    """|alpha/beta| below which the state loses all entanglement."""
    sg = math.sqrt(1.0 - gamma)
    den = (1.0 - eta) * sg + eta
    if den == 0.0:
        return 0.0
    return (1.0 - p) * (1.0 - eta) * gamma * sg / den


def _ratio(s):
    if s.beta == 0:
        raise DegenerateStateError("beta = 0: |alpha/beta| is undefined")
    return s.ratio


def esd_condition_cad(s, params):
    return _ratio(s) < esd_boundary_ratio(params.gamma, params.eta)


def esd_condition_qmr(s, params, p):
    return _ratio(s) < esd_boundary_ratio(params.gamma, params.eta, p)


def critical_eta(s, gamma):
    """Memory strength above which the channel alone never kills entanglement."""
    r = _ratio(s)
    sg = math.sqrt(1.0 - gamma)
    den = r * (1.0 - sg) + gamma * sg
    if den <= 0.0:
        raise ParamRangeError(f"critical eta undefined at gamma={gamma}, |alpha/beta|={r}")
    return min(1.0, max(0.0, (gamma * sg - r * sg) / den))


def critical_eta_by_bisection(s, gamma, tol=1e-10):
    """Root of ``delta_cad`` in eta; 0 if there is no sudden death at eta = 0."""
    f = lambda eta: delta_cad(s, ChannelParams(gamma, eta))
    if f(0.0) >= 0.0:
        return 0.0
    if f(1.0) < 0.0:
        return 1.0
    return bisect(f, 0.0, 1.0, tol=tol)


def critical_p(s, params):
    """Weak-measurement strength above which optimal reversal avoids sudden death."""
    g, eta = params.gamma, params.eta
    if eta >= 1.0:
        return 0.0
    if not 0.0 < g < 1.0:
        raise DegenerateStateError(f"critical p undefined at gamma={g}")
    r = _ratio(s)
    sg = math.sqrt(1.0 - g)
    pc = 1.0 - r * ((1.0 - eta) * sg + eta) / ((1.0 - eta) * g * sg)
    return min(1.0, max(0.0, pc))


def printed_critical_p(s, params):
    """The alternative p_c expression r * (1 - (eta'sqrt(g')+eta)/(eta' g sqrt(g'))).

    Kept for diagnostics only: it does not zero ``delta_opt``.
    """
    g, eta = params.gamma, params.eta
    sg = math.sqrt(1.0 - g)
    return _ratio(s) * (1.0 - ((1.0 - eta) * sg + eta) / ((1.0 - eta) * g * sg))


def critical_p_by_bisection(s, params, tol=1e-10):
    """Root of the numerator of ``delta_opt`` in p."""
    g, eta = params.gamma, params.eta
    a, b = abs(s.alpha), abs(s.beta)
    f = lambda p: _coherence_factor(g, eta) * a - (1.0 - p) * (1.0 - eta) * g * (1.0 - g) * b
    if f(0.0) > 0.0:
        return 0.0
    return bisect(f, 0.0, 1.0, tol=tol)


def esd_gamma_interval(s, eta, points=2048, tol=1e-10):
    """Range of gamma over which the channel alone leaves zero concurrence."""
    _ratio(s)
    roots = scan_roots(lambda g: delta_cad(s, ChannelParams(g, eta)), 0.0, 1.0, points=points, tol=tol)
    if not roots:
        return CriticalParams()
    high = roots[1] if len(roots) > 1 else 1.0
    return CriticalParams(esd_interval=(roots[0], high))
