"""Command-line interface.

Exit codes: 0 on success, 2 for usage or validation errors, 3 when a
physicality or verification check fails.
"""

import argparse
import io
import logging
import sys

from . import verify as verify_mod
from .channels import ChannelParams
from .entanglement import (
    concurrence_cad_closed,
    concurrence_qmr_closed,
    critical_eta,
    critical_p,
    critical_p_by_bisection,
    esd_condition_cad,
    esd_condition_qmr,
    esd_gamma_interval,
    limit_delta_opt,
    optimal_concurrence,
    printed_critical_p,
    wootters_concurrence,
)
from .errors import BadSpecError, CadError, NotPhysicalError
from .measurements import MeasurementStrengths, analytic_qmr_elements, run_protocol, success_probability
from .sampling import P_CAP
from .states import extract_x_elements, from_alpha
from .sweep import OUTPUTS, PARAMETERS, Axis, SweepSpec, classify_esd_region, reversal_strength, run_sweep, search_q

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_PHYSICAL = 3

GRID_MIN, GRID_MAX = 2, 4096
DEFAULT_OUTPUTS = ("concurrence_cad", "concurrence_qmr", "success_prob", "esd_flag")

log = logging.getLogger("cadwm")


class UsageError(Exception):
    pass


def fmt_csv(x):
    """Up to 12 significant digits, scientific only below 1e-4 in magnitude."""
    if isinstance(x, bool):
        return "1" if x else "0"
    if x == 0:
        return "0"
    return format(float(x), ".12g")


def fmt_text(x):
    if isinstance(x, bool):
        return "true" if x else "false"
    if x is None:
        return "undefined"
    if isinstance(x, complex):
        return f"{fmt_text(x.real)}{'+' if x.imag >= 0 else '-'}{fmt_text(abs(x.imag))}j"
    if x == 0:
        return "0"
    return format(float(x), "#.12g")


def unit_float(name):
    def parse(text):
        try:
            v = float(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not a number: {text!r}")
        if not 0.0 <= v <= 1.0:
            raise argparse.ArgumentTypeError(f"{v} outside [0, 1]")
        return v

    return parse


def q_value(text):
    if text == "auto":
        return "auto"
    return unit_float("q")(text)


def grid_value(text):
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"--grid: not an integer: {text!r}")
    if not GRID_MIN <= n <= GRID_MAX:
        raise argparse.ArgumentTypeError(f"--grid: {n} outside [{GRID_MIN}, {GRID_MAX}]")
    return n


def vary_value(text):
    parts = text.split(":")
    if len(parts) != 4:
        raise argparse.ArgumentTypeError(f"--vary expects name:start:stop:count, got {text!r}")
    name, start, stop, count = parts
    if name not in PARAMETERS:
        raise argparse.ArgumentTypeError(f"--vary: unknown parameter {name!r}")
    try:
        axis = Axis(name, float(start), float(stop), int(count))
    except ValueError:
        raise argparse.ArgumentTypeError(f"--vary: bad numbers in {text!r}")
    if not GRID_MIN <= axis.count <= GRID_MAX:
        raise argparse.ArgumentTypeError(f"--vary: count {axis.count} outside [{GRID_MIN}, {GRID_MAX}]")
    return axis


def _state(args):
    alpha = complex(args.alpha, args.alpha_im)
    if abs(alpha) > 1.0:
        raise UsageError(f"--alpha: |alpha| = {abs(alpha)} exceeds 1")
    return from_alpha(alpha, args.beta_phase)


def _resolve_q(s, params, p, q):
    """Numeric q, or the optimal reversal for ``auto``."""
    if q != "auto":
        return q
    return reversal_strength(s, params, p)


def _emit(args, pairs):
    if args.format == "csv":
        args.out.write(",".join(k for k, _ in pairs) + "\n")
        args.out.write(",".join("nan" if v is None else fmt_csv(v) for _, v in pairs) + "\n")
    else:
        width = max(len(k) for k, _ in pairs)
        for k, v in pairs:
            args.out.write(f"{k:<{width}}  {fmt_text(v)}\n")


def cmd_evolve(args):
    s = _state(args)
    params = ChannelParams(args.gamma, args.eta)
    q = _resolve_q(s, params, args.p, args.q)
    strengths = MeasurementStrengths(args.p, q)
    outcome = run_protocol(s, params, strengths)
    numeric = extract_x_elements(outcome.state)
    closed, terms = analytic_qmr_elements(s, params, strengths)
    deviation = numeric.max_deviation(closed)
    pairs = [("p", args.p), ("q", q)]
    for label, el in (("numeric", numeric), ("closed", closed)):
        pairs += [
            (f"{label}_r11", el.r11),
            (f"{label}_r22", el.r22),
            (f"{label}_r33", el.r33),
            (f"{label}_r44", el.r44),
            (f"{label}_r14_re", el.r14.real),
            (f"{label}_r14_im", el.r14.imag),
        ]
    pairs += [
        ("success_probability", outcome.success_probability),
        ("closed_success_probability", terms.N * (abs(s.alpha) ** 2 + (1 - args.p) ** 2 * abs(s.beta) ** 2)),
        ("concurrence", wootters_concurrence(outcome.state).concurrence),
        ("max_deviation", deviation),
    ]
    _emit(args, pairs)
    if deviation > 1e-9:
        raise NotPhysicalError(f"numeric and closed-form states differ by {deviation:.3e}")
    return EXIT_OK


def cmd_concurrence(args):
    s = _state(args)
    params = ChannelParams(args.gamma, args.eta)
    q = _resolve_q(s, params, args.p, args.q)
    strengths = MeasurementStrengths(args.p, q)
    cad_report = concurrence_cad_closed(s, params)
    qmr_report = concurrence_qmr_closed(s, params, strengths)
    numeric = wootters_concurrence(run_protocol(s, params, strengths).state)
    measured = args.p > 0.0 or q > 0.0
    if s.beta == 0:
        esd = False
    elif measured:
        esd = esd_condition_qmr(s, params, args.p)
    else:
        esd = esd_condition_cad(s, params)
    pairs = [
        ("p", args.p),
        ("q", q),
        ("concurrence_cad", cad_report.concurrence),
        ("delta_cad", cad_report.delta),
        ("concurrence_qmr", qmr_report.concurrence),
        ("delta_qmr", qmr_report.delta),
        ("concurrence_numeric", numeric.concurrence),
        ("delta_numeric", numeric.delta),
        ("esd", esd),
    ]
    _emit(args, pairs)
    return EXIT_OK


def _maybe(fn, *a):
    try:
        return fn(*a)
    except CadError:
        return None


def cmd_optimize(args):
    s = _state(args)
    params = ChannelParams(args.gamma, args.eta)
    if args.p > P_CAP:
        raise UsageError(f"--p: optimal reversal needs p <= {P_CAP}")
    q_star = _resolve_q(s, params, args.p, "auto")
    report = optimal_concurrence(s, params, args.p)
    q_search, c_search = search_q(s, params, args.p)
    strengths = MeasurementStrengths(args.p, q_star)
    interval = _maybe(esd_gamma_interval, s, args.eta)
    pairs = [
        ("q_opt", q_star),
        ("concurrence_opt", report.concurrence),
        ("delta_opt", report.delta),
        ("concurrence_at_q_opt", concurrence_qmr_closed(s, params, strengths).concurrence),
        ("q_search", q_search),
        ("concurrence_search", c_search),
        ("success_probability", success_probability(s, params, strengths)),
        ("p_c", _maybe(critical_p, s, params)),
        ("p_c_bisection", _maybe(critical_p_by_bisection, s, params) if s.beta != 0 else None),
        ("p_c_alternative_form", _maybe(printed_critical_p, s, params) if 0 < args.gamma < 1 and args.eta < 1 else None),
        ("eta_c", _maybe(critical_eta, s, args.gamma)),
        ("delta_limit_p1", _maybe(limit_delta_opt, params)),
    ]
    if interval is not None and interval.esd_interval is not None:
        pairs += [("esd_gamma_low", interval.esd_interval[0]), ("esd_gamma_high", interval.esd_interval[1])]
    _emit(args, pairs)
    return EXIT_OK


def write_csv(out, columns, rows):
    buf = io.StringIO(newline="")
    buf.write(",".join(columns) + "\n")
    for row in rows:
        buf.write(",".join(fmt_csv(row[c]) for c in columns) + "\n")
    out.write(buf.getvalue())


def write_table(out, columns, rows):
    width = max(len(c) for c in columns)
    width = max(width, 18)
    out.write(" ".join(f"{c:>{width}}" for c in columns) + "\n")
    for row in rows:
        out.write(" ".join(f"{fmt_text(row[c]):>{width}}" for c in columns) + "\n")


def _write_rows(args, spec, rows):
    writer = write_csv if args.format == "csv" else write_table
    writer(args.out, spec.columns(), rows)


def cmd_esd_map(args):
    fixed = {"eta": args.eta, "p": args.p}
    spec = SweepSpec(
        (Axis("gamma", 0.0, 1.0, args.grid), Axis("alpha_ratio", 0.0, args.ratio_max, args.grid)),
        fixed,
        "explicit",
        ("esd_flag",),
    )
    _write_rows(args, spec, classify_esd_region(spec))
    return EXIT_OK


def cmd_sweep(args):
    if not args.vary:
        raise UsageError("--vary is required")
    fixed = {}
    for name in PARAMETERS:
        value = getattr(args, name, None)
        if value is None or (name == "q" and value == "auto"):
            continue
        fixed[name] = value
    outputs = tuple(o.strip() for o in args.outputs.split(",") if o.strip())
    q_mode = "optimal" if args.q == "auto" else "explicit"
    spec = SweepSpec(tuple(args.vary), fixed, q_mode, outputs)
    _write_rows(args, spec, run_sweep(spec))
    return EXIT_OK


def cmd_verify(args):
    if args.samples < 1:
        raise UsageError("--samples must be at least 1")
    results = verify_mod.run_checks(args.seed, args.samples, corrupt=args.corrupt)
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        args.out.write(f"{status}  {r.name:<28} worst={fmt_text(r.value)} tol={r.tolerance:.0e}\n")
    failed = [r.name for r in results if not r.passed]
    args.out.write(f"{len(results) - len(failed)}/{len(results)} checks passed\n")
    return EXIT_PHYSICAL if failed else EXIT_OK


def _add_state_flags(p, required=True):
    p.add_argument("--alpha", type=float, required=required, help="amplitude of |00> (real part)")
    p.add_argument("--alpha-im", type=float, default=0.0, help="imaginary part of alpha")
    p.add_argument("--beta-phase", type=float, default=0.0, help="phase of beta in radians")


def _add_output_flags(p, default_format):
    p.add_argument("--output", "-o", default=None, help="write to this file instead of stdout")
    p.add_argument("--format", choices=("csv", "text"), default=default_format)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="cadwm",
        description="Correlated amplitude damping with weak measurement and reversal.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("evolve", help="final X-state entries from both pipelines")
    _add_state_flags(p)
    p.add_argument("--gamma", type=unit_float("gamma"), required=True)
    p.add_argument("--eta", type=unit_float("eta"), required=True)
    p.add_argument("--p", type=unit_float("p"), default=0.0)
    p.add_argument("--q", type=q_value, default=0.0, help="reversal strength or 'auto'")
    _add_output_flags(p, "text")
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("concurrence", help="closed-form and numeric concurrence")
    _add_state_flags(p)
    p.add_argument("--gamma", type=unit_float("gamma"), required=True)
    p.add_argument("--eta", type=unit_float("eta"), required=True)
    p.add_argument("--p", type=unit_float("p"), default=0.0)
    p.add_argument("--q", type=q_value, default=0.0)
    _add_output_flags(p, "text")
    p.set_defaults(func=cmd_concurrence)

    p = sub.add_parser("optimize", help="optimal reversal strength and critical values")
    _add_state_flags(p)
    p.add_argument("--gamma", type=unit_float("gamma"), required=True)
    p.add_argument("--eta", type=unit_float("eta"), required=True)
    p.add_argument("--p", type=unit_float("p"), default=0.0)
    _add_output_flags(p, "text")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("esd-map", help="sudden-death map over (gamma, |alpha/beta|)")
    p.add_argument("--eta", type=unit_float("eta"), required=True)
    p.add_argument("--p", type=unit_float("p"), default=0.0)
    p.add_argument("--grid", type=grid_value, default=128)
    p.add_argument("--ratio-max", type=float, default=1.0)
    _add_output_flags(p, "csv")
    p.set_defaults(func=cmd_esd_map)

    p = sub.add_parser("sweep", help="evaluate outputs on a one- or two-parameter grid")
    p.add_argument("--vary", type=vary_value, action="append", help="name:start:stop:count (repeatable)")
    p.add_argument("--alpha", type=float)
    p.add_argument("--alpha-ratio", dest="alpha_ratio", type=float)
    p.add_argument("--gamma", type=float)
    p.add_argument("--eta", type=float)
    p.add_argument("--p", type=float)
    p.add_argument("--q", type=q_value)
    p.add_argument("--outputs", default=",".join(DEFAULT_OUTPUTS), help=f"comma list from {','.join(OUTPUTS)}")
    _add_output_flags(p, "csv")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", help="run the cross-validation suite")
    p.add_argument("--seed", type=int, default=verify_mod.DEFAULT_SEED)
    p.add_argument("--samples", type=int, default=verify_mod.DEFAULT_SAMPLES)
    p.add_argument("--corrupt", action="store_true", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_verify, output=None, format="text")
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # --help or a usage error
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")

    if args.output:
        try:
            out = open(args.output, "w", encoding="utf-8", newline="\n")
        except OSError as exc:
            print(f"cadwm: cannot write {args.output}: {exc}", file=sys.stderr)
            return EXIT_USAGE
    else:
        out = sys.stdout
    args.out = out
    try:
        return args.func(args)
    except NotPhysicalError as exc:
        print(f"cadwm: physicality check failed: {exc}", file=sys.stderr)
        return EXIT_PHYSICAL
    except BadSpecError as exc:
        print(f"cadwm: bad sweep spec: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (CadError, UsageError) as exc:
        print(f"cadwm: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"cadwm: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # exit codes are restricted to 0/2/3
        log.exception("unexpected failure")
        print(f"cadwm: internal error: {exc}", file=sys.stderr)
        return EXIT_PHYSICAL
    finally:
        if out is not sys.stdout:
            out.close()


def run():
    sys.exit(main())
