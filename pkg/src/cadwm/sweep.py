"""Parameter grids, sudden-death maps and the reversal-strength search check."""

import math
from dataclasses import dataclass, field
from typing import Dict, Tuple

import numpy as np

from .channels import ChannelParams
from .entanglement import (
    concurrence_cad_closed,
    concurrence_qmr_closed,
    delta_opt,
    delta_qmr,
    esd_boundary_ratio,
    esd_condition_qmr,
    optimal_q,
)
from .errors import BadSpecError, CadError
from .measurements import NULL_PROB, MeasurementStrengths, qmr_terms, success_probability
from .optimize import golden_section_max
from .sampling import P_CAP, random_draws
from .states import from_alpha, from_ratio

PARAMETERS = ("alpha", "alpha_ratio", "gamma", "eta", "p", "q")
OUTPUTS = ("concurrence_cad", "concurrence_qmr", "success_prob", "esd_flag", "delta")
Q_MODES = ("explicit", "optimal")
Q_OUTPUTS = ("concurrence_qmr", "success_prob", "delta")

BOUNDARY_POINTS = 512
SEARCH_TOL = 1e-8
SEARCH_MAX_ITER = 200


@dataclass(frozen=True)
class Axis:
    name: str
    start: float
    stop: float
    count: int

    def values(self):
        return np.linspace(self.start, self.stop, self.count)


@dataclass(frozen=True)
class SweepSpec:
    """What to evaluate and over which grid.

    ``varying`` holds one or two :class:`Axis`; the first one is the outer
    (slowest) loop. ``fixed`` binds the remaining parameters. The state is
    given either as ``alpha`` (real, beta = sqrt(1 - alpha^2)) or as
    ``alpha_ratio`` = |alpha/beta|. ``p`` and ``q`` default to 0.
    """

    varying: Tuple[Axis, ...]
    fixed: Dict[str, float] = field(default_factory=dict)
    q_mode: str = "explicit"
    outputs: Tuple[str, ...] = ("concurrence_cad",)

    def __post_init__(self):
        object.__setattr__(self, "varying", tuple(self.varying))
        object.__setattr__(self, "outputs", tuple(self.outputs))
        object.__setattr__(self, "fixed", dict(self.fixed))
        validate_spec(self)

    @property
    def state_key(self):
        return "alpha" if "alpha" in self.bound_names else "alpha_ratio"

    @property
    def bound_names(self):
        return [a.name for a in self.varying] + list(self.fixed)

    def columns(self):
        uses_q = self.q_mode == "optimal" or bool(set(self.outputs) & set(Q_OUTPUTS))
        names = [a.name for a in self.varying]
        for name in PARAMETERS:
            if name in names:
                continue
            if name in self.fixed or name == "p" or name == self.state_key or (name == "q" and uses_q):
                names.append(name)
        return tuple(names) + self.outputs


def _legal(name, value):
    if not math.isfinite(value):
        return False
    if name == "alpha_ratio":
        return value >= 0.0
    return 0.0 <= value <= 1.0


def validate_spec(spec):
    if len(spec.varying) not in (1, 2):
        raise BadSpecError("varying", f"need one or two axes, got {len(spec.varying)}")
    names = [a.name for a in spec.varying]
    if len(set(names)) != len(names):
        raise BadSpecError("varying", f"duplicate axis in {names}")
    for axis in spec.varying:
        if axis.name not in PARAMETERS:
            raise BadSpecError("varying", f"unknown parameter {axis.name!r}")
        if axis.name in spec.fixed:
            raise BadSpecError("fixed", f"{axis.name!r} is both varied and fixed")
        if int(axis.count) != axis.count or axis.count < 2:
            raise BadSpecError("varying", f"{axis.name}: count must be an integer >= 2")
        if axis.start == axis.stop:
            raise BadSpecError("varying", f"{axis.name}: zero-width range")
        for v in (axis.start, axis.stop):
            if not _legal(axis.name, v):
                raise BadSpecError("varying", f"{axis.name}: {v} outside its legal range")
    for name, v in spec.fixed.items():
        if name not in PARAMETERS:
            raise BadSpecError("fixed", f"unknown parameter {name!r}")
        if not _legal(name, v):
            raise BadSpecError("fixed", f"{name}: {v} outside its legal range")
    bound = set(names) | set(spec.fixed)
    if ("alpha" in bound) == ("alpha_ratio" in bound):
        raise BadSpecError("fixed", "bind exactly one of alpha, alpha_ratio")
    for name in ("gamma", "eta"):
        if name not in bound:
            raise BadSpecError("fixed", f"{name} is not bound")
    if spec.q_mode not in Q_MODES:
        raise BadSpecError("q_mode", f"expected one of {Q_MODES}, got {spec.q_mode!r}")
    if spec.q_mode == "optimal":
        if "q" in bound:
            raise BadSpecError("fixed", "q cannot be bound when q_mode is optimal")
        p_max = max([a.start for a in spec.varying if a.name == "p"]
                    + [a.stop for a in spec.varying if a.name == "p"]
                    + [spec.fixed.get("p", 0.0)])
        if p_max > P_CAP:
            raise BadSpecError("p", f"optimal reversal needs p <= {P_CAP}")
    if not spec.outputs:
        raise BadSpecError("outputs", "no outputs requested")
    for out in spec.outputs:
        if out not in OUTPUTS:
            raise BadSpecError("outputs", f"unknown output {out!r}")
    if len(set(spec.outputs)) != len(spec.outputs):
        raise BadSpecError("outputs", "duplicate output")


def reversal_strength(s, params, p):
    """Optimal reversal strength, or 0 where no reversal can help.

    With alpha = 0, beta = 0, or (almost) nothing left in |11>, the closed-form
    optimum is undefined or discards the whole state, while the concurrence
    is 0 for every q < 1 anyway.
    """
    if s.alpha == 0 or s.beta == 0:
        return 0.0
    q = optimal_q(s, params, p)
    u, v, w, _ = qmr_terms(s, params, p)
    qb = 1.0 - q
    if qb * qb * u + 2.0 * qb * v + w <= NULL_PROB:
        return 0.0
    return q


def evaluate_point(values, q_mode, outputs):
    """Evaluate the requested outputs at one parameter binding.

    ``values`` maps parameter names to floats and is updated in place with
    the reversal strength actually used.
    """
    if "alpha" in values:
        s = from_alpha(values["alpha"])
    else:
        s = from_ratio(values["alpha_ratio"])
    params = ChannelParams(values["gamma"], values["eta"])
    p = values.setdefault("p", 0.0)
    if q_mode == "optimal":
        values["q"] = reversal_strength(s, params, p)
    q = values.setdefault("q", 0.0)
    strengths = MeasurementStrengths(p, q)

    row = {}
    for out in outputs:
        if out == "concurrence_cad":
            row[out] = concurrence_cad_closed(s, params).concurrence
        elif out == "concurrence_qmr":
            row[out] = concurrence_qmr_closed(s, params, strengths).concurrence
        elif out == "success_prob":
            row[out] = success_probability(s, params, strengths)
        elif out == "esd_flag":
            row[out] = 0.0 if s.beta == 0 else float(esd_condition_qmr(s, params, p))
        elif out == "delta":
            row[out] = delta_qmr(s, params, strengths)
    return row


def run_sweep(spec):
    """Evaluate ``spec`` on its grid; rows come out row-major, first axis outermost."""
    axes = [a.values() for a in spec.varying]
    columns = spec.columns()
    rows = []
    for point in np.array(np.meshgrid(*axes, indexing="ij")).reshape(len(axes), -1).T:
        values = dict(spec.fixed)
        values.update({a.name: float(v) for a, v in zip(spec.varying, point)})
        outs = evaluate_point(values, spec.q_mode, spec.outputs)
        values.update(outs)
        rows.append({c: float(values[c]) for c in columns})
    return rows


def classify_esd_region(spec):
    """Sudden-death map over (alpha_ratio, gamma) at fixed eta and optional p."""
    if sorted(a.name for a in spec.varying) != ["alpha_ratio", "gamma"]:
        raise BadSpecError("varying", "an ESD map varies exactly alpha_ratio and gamma")
    if "eta" not in spec.fixed:
        raise BadSpecError("fixed", "an ESD map needs a fixed eta")
    if "esd_flag" not in spec.outputs:
        spec = SweepSpec(spec.varying, spec.fixed, spec.q_mode, spec.outputs + ("esd_flag",))
    return run_sweep(spec)


def trace_boundary(eta, p=0.0, points=BOUNDARY_POINTS):
    """(gamma, |alpha/beta|) pairs on the sudden-death boundary."""
    return [(float(g), esd_boundary_ratio(float(g), eta, p)) for g in np.linspace(0.0, 1.0, points)]


def search_q(s, params, p, tol=SEARCH_TOL, max_iter=SEARCH_MAX_ITER):
    """Golden-section search for the reversal strength maximizing concurrence."""
    f = lambda q: concurrence_qmr_closed(s, params, MeasurementStrengths(p, q)).concurrence
    return golden_section_max(f, 0.0, 1.0, tol=tol, max_iter=max_iter)


@dataclass(frozen=True)
class QOptimumCheck:
    samples: int
    max_q_error: float
    max_excess_over_bound: float


def check_q_optimum(samples, seed):
    """Compare searched and closed-form optimal reversal strengths.

    Draws whose best achievable concurrence is zero have no unique optimum
    and are skipped; sampling continues until ``samples`` draws are used.
    """
    if samples < 1:
        raise BadSpecError("samples", "need at least one sample")
    used, q_err, excess = 0, 0.0, -math.inf
    batch = 0
    while used < samples:
        for d in random_draws(seed + 7919 * batch, samples):
            s, params, p = d.state, d.params, d.strengths.p
            try:
                bound = delta_opt(s, params, p)
                q_eq = optimal_q(s, params, p)
            except CadError:
                continue
            if bound <= 1e-12:
                continue
            q_found, c_found = search_q(s, params, p)
            q_err = max(q_err, abs(q_found - q_eq))
            excess = max(excess, c_found - bound)
            used += 1
            if used == samples:
                break
        batch += 1
    return QOptimumCheck(used, q_err, excess)


def verify_q_optimum(samples, seed):
    """Largest gap between searched and closed-form optimal q over ``samples`` draws."""
    return check_q_optimum(samples, seed).max_q_error
