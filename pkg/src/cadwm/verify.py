"""Self-validation suite behind ``cadwm verify``.

Each check compares two independent routes (Kraus sums vs closed forms,
numeric Wootters vs closed-form concurrence, searched vs closed-form
optimum) and reports the worst deviation against a fixed tolerance.
"""

import math
from dataclasses import dataclass

import numpy as np

from .channels import (
    ChannelParams,
    KrausChannel,
    ad_single,
    ad_two_qubit,
    analytic_cad_elements,
    apply,
    cad,
    fcad,
    validate_cptp,
)
from .entanglement import (
    concurrence_cad_closed,
    concurrence_qmr_closed,
    delta_cad,
    delta_opt,
    esd_condition_cad,
    esd_condition_qmr,
    wootters_concurrence,
)
from .measurements import analytic_qmr_elements, run_protocol
from .sampling import random_draws
from .states import extract_x_elements, from_alpha, to_density
from .sweep import check_q_optimum

DEFAULT_SEED = 20140601
DEFAULT_SAMPLES = 1000


@dataclass(frozen=True)
class CheckResult:
    name: str
    value: float
    tolerance: float

    @property
    def passed(self):
        return bool(self.value <= self.tolerance)


def _broken_ad(gamma):
    e0 = np.diag([1.0, math.sqrt(1.0 - gamma)])
    return KrausChannel(2, (e0, np.zeros((2, 2))), "AD without jump")


def check_cptp(grid=21, corrupt=False):
    worst = 0.0
    values = np.linspace(0.0, 1.0, grid)
    for g in values:
        worst = max(worst, validate_cptp(ad_single(g)), validate_cptp(ad_two_qubit(g)), validate_cptp(fcad(g)))
        for eta in values:
            worst = max(worst, validate_cptp(cad(ChannelParams(g, eta))))
    if corrupt:
        worst = max(worst, validate_cptp(_broken_ad(0.5)))
    return CheckResult("cptp_completeness", worst, 1e-12)


def check_convexity(seed, samples=100):
    worst = 0.0
    for d in random_draws(seed, samples):
        rho = to_density(d.state)
        g, eta = d.params.gamma, d.params.eta
        mixed = (1.0 - eta) * apply(ad_two_qubit(g), rho) + eta * apply(fcad(g), rho)
        worst = max(worst, float(np.max(np.abs(apply(cad(d.params), rho) - mixed))))
    return CheckResult("cad_convexity", worst, 1e-12)


def check_closed_forms(draws):
    worst = 0.0
    for d in draws:
        numeric = extract_x_elements(apply(cad(d.params), to_density(d.state)))
        worst = max(worst, analytic_cad_elements(d.state, d.params).max_deviation(numeric))
        elements, _ = analytic_qmr_elements(d.state, d.params, d.strengths)
        chained = extract_x_elements(run_protocol(d.state, d.params, d.strengths).state)
        worst = max(worst, elements.max_deviation(chained))
    return CheckResult("closed_form_elements", worst, 1e-11)


def check_concurrence(draws):
    worst = 0.0
    for d in draws:
        cad_state = apply(cad(d.params), to_density(d.state))
        worst = max(
            worst,
            abs(wootters_concurrence(cad_state).concurrence - concurrence_cad_closed(d.state, d.params).concurrence),
        )
        out = run_protocol(d.state, d.params, d.strengths)
        worst = max(
            worst,
            abs(
                wootters_concurrence(out.state).concurrence
                - concurrence_qmr_closed(d.state, d.params, d.strengths).concurrence
            ),
        )
    return CheckResult("wootters_vs_closed_form", worst, 1e-9)


def check_esd_boundary(alpha=1.0 / 3.0, grid=50, p_values=(0.0, 0.25, 0.5, 0.75, 0.95), band=1e-12):
    """Number of grid points where the ratio criterion and the sign of delta disagree."""
    s = from_alpha(alpha)
    mismatches = 0
    values = np.linspace(0.0, 1.0, grid)
    for p in p_values:
        for g in values:
            for eta in values:
                params = ChannelParams(g, eta)
                if p == 0.0:
                    d = delta_cad(s, params)
                    flag = esd_condition_cad(s, params)
                else:
                    d = delta_opt(s, params, p)
                    flag = esd_condition_qmr(s, params, p)
                if abs(d) <= band:
                    continue
                if flag != (d < 0.0):
                    mismatches += 1
    return CheckResult("esd_boundary_consistency", float(mismatches), 0.0)


def run_checks(seed=DEFAULT_SEED, samples=DEFAULT_SAMPLES, corrupt=False):
    if samples < 1:
        raise ValueError("samples must be at least 1")
    draws = random_draws(seed, samples)
    q_check = check_q_optimum(min(samples, 200), seed)
    return [
        check_cptp(corrupt=corrupt),
        check_convexity(seed, min(samples, 100)),
        check_closed_forms(draws),
        check_concurrence(draws),
        CheckResult("optimal_q_search", q_check.max_q_error, 1e-4),
        CheckResult("optimal_q_bound", max(0.0, q_check.max_excess_over_bound), 1e-9),
        check_esd_boundary(),
    ]
