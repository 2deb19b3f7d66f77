import cmath
import logging
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cadwm.channels import ChannelParams, apply, cad
from cadwm.entanglement import (
    CLOSED_FORM_CAD,
    NUMERIC_WOOTTERS,
    concurrence_cad_closed,
    concurrence_qmr_closed,
    critical_eta,
    critical_eta_by_bisection,
    critical_p,
    critical_p_by_bisection,
    delta_cad,
    delta_opt,
    esd_boundary_ratio,
    esd_condition_cad,
    esd_condition_qmr,
    esd_gamma_interval,
    limit_delta_opt,
    optimal_concurrence,
    optimal_q,
    printed_critical_p,
    wootters_concurrence,
)
from cadwm.errors import DegenerateStateError, NotPSDError, NullPostselectionError
from cadwm.linalg import SIGMA_Y
from cadwm.measurements import MeasurementStrengths, qmr_terms, run_protocol
from cadwm.sampling import random_draws
from cadwm.states import from_alpha, from_ratio, make_initial, to_density
from cadwm.sweep import search_q

log = logging.getLogger(__name__)

BELL = from_alpha(1 / math.sqrt(2))
ONE_THIRD = from_alpha(1 / 3)
RATIO = 1 / math.sqrt(8)


def numpy_wootters(rho):
    """Reference route: eigenvalues of the non-Hermitian rho * rho_tilde."""
    yy = np.kron(SIGMA_Y, SIGMA_Y)
    lam = np.linalg.eigvals(rho @ yy @ rho.conj() @ yy)
    roots = np.sort(np.sqrt(np.abs(lam.real)))[::-1]
    return max(0.0, roots[0] - roots[1] - roots[2] - roots[3])


def test_wootters_examples():
    assert wootters_concurrence(to_density(BELL)).concurrence == pytest.approx(1.0, abs=1e-12)
    assert wootters_concurrence(np.diag([1.0, 0, 0, 0])).concurrence == 0.0
    report = wootters_concurrence(apply(cad(ChannelParams(0.5, 0.5)), to_density(BELL)))
    assert report.method == NUMERIC_WOOTTERS
    assert report.concurrence == pytest.approx(2 * ((0.25 + 0.5 * math.sqrt(0.5)) * 0.5 - 0.0625), abs=1e-10)
    assert report.concurrence == pytest.approx(0.47855, abs=5e-6)


def test_wootters_matches_numpy_on_generic_states():
    rng = np.random.default_rng(31)
    for _ in range(200):
        rank = rng.integers(2, 5)
        b = rng.normal(size=(4, rank)) + 1j * rng.normal(size=(4, rank))
        rho = b @ b.conj().T
        rho /= np.trace(rho).real
        assert wootters_concurrence(rho).concurrence == pytest.approx(numpy_wootters(rho), abs=1e-7)


def test_wootters_on_werner_states():
    # p |Bell><Bell| + (1-p) I/4 has C = max(0, (3p - 1) / 2)
    for p in np.linspace(0, 1, 21):
        rho = p * np.asarray(to_density(BELL)) + (1 - p) * np.eye(4) / 4
        assert wootters_concurrence(rho).concurrence == pytest.approx(max(0.0, (3 * p - 1) / 2), abs=1e-12)


def test_wootters_report_invariants():
    rho = apply(cad(ChannelParams(0.3, 0.6)), to_density(from_alpha(0.4)))
    r = wootters_concurrence(rho)
    assert list(r.sqrt_eigenvalues) == sorted(r.sqrt_eigenvalues, reverse=True)
    assert r.concurrence == pytest.approx(max(0.0, r.delta), abs=1e-12)


def test_wootters_rejects_non_psd():
    with pytest.raises(NotPSDError):
        wootters_concurrence(np.diag([1.2, -0.2, 0, 0]))


def test_initial_concurrence():
    r = concurrence_cad_closed(ONE_THIRD, ChannelParams(0, 0.4))
    assert r.concurrence == pytest.approx(4 * math.sqrt(2) / 9, abs=1e-15)
    assert r.concurrence == pytest.approx(0.6285, abs=5e-5)
    assert r.method == CLOSED_FORM_CAD
    assert r.concurrence == pytest.approx(max(0.0, 2 * r.delta), abs=1e-12)


@pytest.mark.parametrize("gamma", np.linspace(0, 1, 21))
def test_memoryless_reduction(gamma):
    for s in (ONE_THIRD, BELL, from_alpha(0.8)):
        a, b = abs(s.alpha), abs(s.beta)
        expected = 2 * max(0.0, (1 - gamma) * b * (a - gamma * b))
        assert concurrence_cad_closed(s, ChannelParams(gamma, 0)).concurrence == pytest.approx(expected, abs=1e-12)


def test_running_example_inside_esd():
    r = concurrence_cad_closed(ONE_THIRD, ChannelParams(0.6, 0.2))
    assert r.delta == pytest.approx(-0.0303, abs=5e-5)
    assert r.concurrence == 0.0


def test_qmr_closed_examples():
    for d in random_draws(41, 20):
        params = d.params
        no_meas = concurrence_qmr_closed(d.state, params, MeasurementStrengths(0, 0))
        assert no_meas.concurrence == pytest.approx(concurrence_cad_closed(d.state, params).concurrence, abs=1e-12)
        assert concurrence_qmr_closed(d.state, params, MeasurementStrengths(0.3, 1.0)).concurrence == 0.0


def test_qmr_closed_bell_at_optimum():
    params = ChannelParams(0.5, 0.0)
    q = optimal_q(BELL, params, 0.0)
    closed = concurrence_qmr_closed(BELL, params, MeasurementStrengths(0, q))
    numeric = wootters_concurrence(run_protocol(BELL, params, MeasurementStrengths(0, q)).state)
    u, v, w, x = qmr_terms(BELL, params, 0.0)
    bound = (abs(x) - v) / (v + math.sqrt(u * w))
    assert closed.concurrence == pytest.approx(numeric.concurrence, abs=1e-12)
    assert closed.concurrence == pytest.approx(bound, abs=1e-12)


def test_qmr_closed_null_postselection():
    with pytest.raises(NullPostselectionError):
        concurrence_qmr_closed(BELL, ChannelParams(0.3, 0.2), MeasurementStrengths(1.0, 1.0))


def test_optimal_q_examples():
    assert optimal_q(ONE_THIRD, ChannelParams(0.6, 0.2), 1.0) == 1.0
    assert optimal_q(BELL, ChannelParams(0.5, 0.0), 0.0) == pytest.approx(1 - math.sqrt(0.2), abs=1e-15)
    assert optimal_q(BELL, ChannelParams(0.5, 0.0), 0.0) == pytest.approx(0.55279, abs=5e-6)
    for eta in (0.0, 0.5, 1.0):
        assert optimal_q(BELL, ChannelParams(0.0, eta), 0.0) == 0.0


def test_optimal_q_by_search():
    q, _ = search_q(BELL, ChannelParams(0.5, 0.0), 0.0)
    assert q == pytest.approx(0.55279, abs=1e-5)


def test_optimal_q_degenerate():
    with pytest.raises(DegenerateStateError):
        optimal_q(from_alpha(0.0), ChannelParams(0.5, 0.5), 0.2)


def test_optimal_concurrence_equals_closed_form_at_optimal_q():
    checked = 0
    for d in random_draws(42, 300):
        u, _, w, _ = qmr_terms(d.state, d.params, d.strengths.p)
        if w > u:  # optimum lies at q < 0, clamped away
            continue
        q = optimal_q(d.state, d.params, d.strengths.p)
        at_q = concurrence_qmr_closed(d.state, d.params, MeasurementStrengths(d.strengths.p, q))
        assert optimal_concurrence(d.state, d.params, d.strengths.p).delta == pytest.approx(at_q.delta, abs=1e-12)
        checked += 1
    assert checked > 100


@pytest.mark.parametrize("gamma", [0.1, 0.3, 0.6, 0.9])
def test_limit_memoryless_is_one(gamma):
    assert delta_opt(ONE_THIRD, ChannelParams(gamma, 0.0), 1 - 1e-9) == pytest.approx(1.0, abs=1e-6)


def test_limit_intermediate_memory():
    params = ChannelParams(0.6, 0.5)
    expected = (0.5 * math.sqrt(0.4) + 0.5) / math.sqrt(0.5 * 0.4 + 0.5)
    assert limit_delta_opt(params) == pytest.approx(expected, abs=1e-15)
    assert limit_delta_opt(params) == pytest.approx(0.97558, abs=5e-6)
    assert delta_opt(ONE_THIRD, params, 1 - 1e-8) == pytest.approx(expected, abs=1e-6)


def test_delta_opt_zero_at_critical_p():
    params = ChannelParams(0.6, 0.2)
    assert delta_opt(ONE_THIRD, params, critical_p(ONE_THIRD, params)) == pytest.approx(0.0, abs=1e-12)


def test_delta_opt_nondecreasing_in_p():
    for d in random_draws(43, 100):
        vals = [delta_opt(d.state, d.params, p) for p in np.linspace(0, 1 - 1e-6, 100)]
        assert np.all(np.diff(vals) >= -1e-12)


@settings(max_examples=60)
@given(st.floats(0.01, 0.99), st.floats(0, 1), st.floats(0, 1), st.floats(0, 0.99), st.floats(0, 0.99),
       st.floats(0, 2 * math.pi))
def test_phase_invariance(mag, gamma, eta, p, q, phi):
    base = make_initial(mag, math.sqrt(1 - mag * mag))
    rotated = make_initial(mag * cmath.exp(1j * phi), math.sqrt(1 - mag * mag))
    params, strengths = ChannelParams(gamma, eta), MeasurementStrengths(p, q)
    assert concurrence_cad_closed(rotated, params).concurrence == pytest.approx(
        concurrence_cad_closed(base, params).concurrence, abs=1e-12)
    assert concurrence_qmr_closed(rotated, params, strengths).concurrence == pytest.approx(
        concurrence_qmr_closed(base, params, strengths).concurrence, abs=1e-12)
    assert wootters_concurrence(run_protocol(rotated, params, strengths).state).concurrence == pytest.approx(
        wootters_concurrence(run_protocol(base, params, strengths).state).concurrence, abs=1e-10)


def test_wootters_matches_closed_forms_on_draws():
    for d in random_draws(44, 300):
        out = run_protocol(d.state, d.params, d.strengths)
        assert wootters_concurrence(out.state).concurrence == pytest.approx(
            concurrence_qmr_closed(d.state, d.params, d.strengths).concurrence, abs=1e-9)


def test_esd_cad_examples():
    grid = np.linspace(0, 1, 30)
    assert not any(esd_condition_cad(from_ratio(r), ChannelParams(g, 1.0)) for g in grid for r in grid)
    assert not esd_condition_cad(ONE_THIRD, ChannelParams(0.0, 0.3))
    expected = 0.8 * 0.6 * math.sqrt(0.4) / (0.8 * math.sqrt(0.4) + 0.2)
    assert esd_boundary_ratio(0.6, 0.2) == pytest.approx(expected, abs=1e-15)
    assert esd_boundary_ratio(0.6, 0.2) == pytest.approx(0.43002, abs=5e-6)
    assert esd_condition_cad(ONE_THIRD, ChannelParams(0.6, 0.2))


def test_esd_cad_degenerate():
    with pytest.raises(DegenerateStateError):
        esd_condition_cad(from_alpha(1.0), ChannelParams(0.5, 0.2))


def test_esd_qmr_examples():
    for d in random_draws(45, 50):
        try:
            plain = esd_condition_cad(d.state, d.params)
        except DegenerateStateError:
            continue
        assert esd_condition_qmr(d.state, d.params, 0.0) == plain
        assert not esd_condition_qmr(d.state, d.params, 1.0)
    assert esd_boundary_ratio(0.6, 0.2, 0.1) == pytest.approx(0.9 * esd_boundary_ratio(0.6, 0.2), abs=1e-15)
    assert esd_condition_qmr(ONE_THIRD, ChannelParams(0.6, 0.2), 0.1)


def test_esd_predicate_tracks_sign_of_delta():
    grid = np.linspace(0, 1, 50)
    for s in (ONE_THIRD, BELL, from_alpha(0.2)):
        for g in grid:
            for eta in grid:
                params = ChannelParams(g, eta)
                d = delta_cad(s, params)
                r = concurrence_cad_closed(s, params)
                if esd_condition_cad(s, params):
                    assert d < -1e-14 and r.concurrence == 0.0
                elif abs(d) > 1e-12:
                    assert d > 0


def test_critical_eta():
    assert critical_eta(BELL, 0.5) == 0.0  # |alpha/beta| = 1 >= gamma
    eta_c = critical_eta(ONE_THIRD, 0.6)
    assert eta_c == pytest.approx(0.30598, abs=1e-4)
    assert eta_c == pytest.approx(critical_eta_by_bisection(ONE_THIRD, 0.6), abs=1e-9)
    assert critical_eta(ONE_THIRD, 1.0) == 0.0
    assert not esd_condition_cad(ONE_THIRD, ChannelParams(0.6, eta_c + 1e-9))
    assert esd_condition_cad(ONE_THIRD, ChannelParams(0.6, eta_c - 1e-6))


def test_critical_p():
    assert critical_p(ONE_THIRD, ChannelParams(0.6, 1.0)) == 0.0
    assert critical_p(BELL, ChannelParams(0.6, 0.2)) == 0.0
    params = ChannelParams(0.6, 0.2)
    pc = critical_p(ONE_THIRD, params)
    assert pc == pytest.approx(0.1778, abs=1e-4)
    assert pc == pytest.approx(critical_p_by_bisection(ONE_THIRD, params), abs=1e-9)
    assert esd_condition_qmr(ONE_THIRD, params, pc - 1e-6)
    assert not esd_condition_qmr(ONE_THIRD, params, pc + 1e-6)


def test_alternative_critical_p_form_does_not_zero_delta():
    params = ChannelParams(0.6, 0.2)
    alt = printed_critical_p(ONE_THIRD, params)
    log.info("alternative p_c form gives %.6f, derived form %.6f", alt, critical_p(ONE_THIRD, params))
    assert alt == pytest.approx(-0.46863, abs=1e-5)


def test_esd_gamma_interval():
    assert esd_gamma_interval(ONE_THIRD, 1.0).esd_interval is None
    low, high = esd_gamma_interval(ONE_THIRD, 0.0).esd_interval
    assert low == pytest.approx(RATIO, abs=1e-9)
    assert high == 1.0
    low, high = esd_gamma_interval(ONE_THIRD, 0.2).esd_interval
    assert delta_cad(ONE_THIRD, ChannelParams(low, 0.2)) == pytest.approx(0.0, abs=1e-10)
    assert delta_cad(ONE_THIRD, ChannelParams(high, 0.2)) == pytest.approx(0.0, abs=1e-10)
    assert 0.4 < low < high < 1.0
