"""Scalar search: golden-section maximization and bracketed bisection."""

import math

import numpy as np

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section_max(f, lo, hi, tol=1e-8, max_iter=200):
    """Maximize a unimodal ``f`` on ``[lo, hi]``.

    Returns ``(x, f(x))``. The endpoints are compared against the interior
    estimate at the end so that a maximum on the boundary is returned exactly.
    """
    a, b = float(lo), float(hi)
    x1 = b - INV_PHI * (b - a)
    x2 = a + INV_PHI * (b - a)
    f1, f2 = f(x1), f(x2)
    for _ in range(max_iter):
        if b - a <= tol:
            break
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + INV_PHI * (b - a)
            f2 = f(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - INV_PHI * (b - a)
            f1 = f(x1)
    best_x, best_f = (x1, f1) if f1 >= f2 else (x2, f2)
    for edge in (float(lo), float(hi)):
        fe = f(edge)
        if fe > best_f:
            best_x, best_f = edge, fe
    return best_x, best_f


def bisect(f, lo, hi, tol=1e-10, max_iter=200):
    """Root of ``f`` in ``[lo, hi]``; ``f(lo)`` and ``f(hi)`` must differ in sign."""
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise ValueError(f"root not bracketed: f({lo})={flo:.3e}, f({hi})={fhi:.3e}")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0 or hi - lo <= tol:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def scan_roots(f, lo, hi, points=2048, tol=1e-10):
    """All sign changes of ``f`` on ``(lo, hi)`` found by a dense scan then bisection.

    Grid points where ``f`` is exactly zero are reported as roots only when
    the sign on either side differs.
    """
    xs = np.linspace(lo, hi, points)
    vals = np.array([f(x) for x in xs])
    signs = np.sign(vals)
    roots = []
    last_sign, last_x = signs[0], xs[0]
    for x, sg in zip(xs[1:], signs[1:]):
        if sg == 0:
            continue
        if last_sign != 0 and sg != last_sign:
            roots.append(bisect(f, last_x, x, tol=tol))
        last_sign, last_x = sg, x
    return roots
