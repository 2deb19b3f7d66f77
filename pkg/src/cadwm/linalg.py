"""Small dense complex linear algebra for 2x2 and 4x4 operators.

Matrices are plain ``numpy`` complex arrays. Every function returns a fresh,
read-only array so operators can be shared between workers without copies.

Basis order for two qubits is |00>, |01>, |10>, |11> with the first qubit
as the slow index, which is what :func:`tensor` produces.
"""

import numpy as np

from .errors import NoConvergenceError, NotHermitianError, NotPSDError, ShapeError

HERMITIAN_TOL = 1e-10
PSD_TOL = 1e-10
MAX_SWEEPS = 100
JACOBI_REL_TOL = 1e-14
# pivots below these are zeroed without a rotation
TINY = 1e-290
NEGLIGIBLE = 1e-18

SIGMA_Y = np.array([[0, -1j], [1j, 0]])


def _frozen(a):
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


def as_matrix(a):
    """Validate ``a`` as a finite 2-d complex matrix and return a frozen copy."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise ShapeError(f"expected a 2-d matrix, got ndim={m.ndim}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return _frozen(m)


def multiply(a, b):
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise ShapeError(f"cannot multiply {a.shape} by {b.shape}")
    return _frozen(a @ b)


def adjoint(a):
    return _frozen(np.conj(np.asarray(a, dtype=complex)).T)


def tensor(a, b):
    """Kronecker product, ``a`` on the slow (first-qubit) index."""
    return _frozen(np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex)))


def hermiticity_deviation(m):
    m = np.asarray(m, dtype=complex)
    return float(np.max(np.abs(m - m.conj().T)))


def _jacobi_rotation(a, k, l):
    """Unitary acting on the (k, l) plane that zeroes ``a[k, l]``."""
    c_kl = a[k, l]
    r = abs(c_kl)
    phase = c_kl / r
    diff = a[l, l].real - a[k, k].real
    if abs(diff) > 1e150 * r:
        t = r / diff
    else:
        zeta = diff / (2.0 * r)
        t = (1.0 if zeta >= 0 else -1.0) / (abs(zeta) + np.hypot(1.0, zeta))
    c = 1.0 / np.sqrt(1.0 + t * t)
    s = t * c
    # diag(1, conj(phase)) makes the pivot real, then a plain Givens rotation
    j = np.eye(a.shape[0], dtype=complex)
    j[k, k] = c
    j[k, l] = s
    j[l, k] = -s * np.conj(phase)
    j[l, l] = c * np.conj(phase)
    return j


def hermitian_eigensystem(m, tol=HERMITIAN_TOL):
    """Eigen-decomposition of a Hermitian matrix by cyclic complex Jacobi sweeps.

    Returns ``(eigenvalues, vectors)`` with eigenvalues sorted in descending
    order and the matching eigenvectors as the columns of ``vectors``, so
    that ``m == vectors @ diag(eigenvalues) @ vectors^H``.

    Raises :class:`NotHermitianError` if ``m`` deviates from its adjoint by
    more than ``tol`` and :class:`NoConvergenceError` if the off-diagonal
    norm is still above threshold after ``MAX_SWEEPS`` sweeps.
    """
    a = np.array(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ShapeError(f"eigensystem needs a square matrix, got {a.shape}")
    if hermiticity_deviation(a) > tol:
        raise NotHermitianError(
            f"max |m - m^H| = {hermiticity_deviation(a):.3e} exceeds {tol:.1e}"
        )
    n = a.shape[0]
    a = 0.5 * (a + a.conj().T)
    v = np.eye(n, dtype=complex)

    mask = ~np.eye(n, dtype=bool)

    def off_norm(x):
        return np.linalg.norm(x[mask])

    for _ in range(MAX_SWEEPS):
        if off_norm(a) <= JACOBI_REL_TOL * np.linalg.norm(np.diag(a)):
            break
        for k in range(n - 1):
            for l in range(k + 1, n):
                r = abs(a[k, l])
                if r < TINY or r <= NEGLIGIBLE * (abs(a[k, k]) + abs(a[l, l])):
                    a[k, l] = a[l, k] = 0.0
                    continue
                j = _jacobi_rotation(a, k, l)
                a = j.conj().T @ a @ j
                a[k, l] = a[l, k] = 0.0
                v = v @ j
    else:
        if off_norm(a) > JACOBI_REL_TOL * np.linalg.norm(np.diag(a)):
            raise NoConvergenceError(f"Jacobi did not converge in {MAX_SWEEPS} sweeps")

    evals = np.real(np.diag(a))
    order = np.argsort(-evals, kind="stable")
    vecs = v[:, order]
    vals = evals[order].copy()
    vals.setflags(write=False)
    return vals, _frozen(vecs)


def hermitian_sqrt(m, tol=PSD_TOL):
    """Principal square root of a positive semidefinite Hermitian matrix.

    Eigenvalues down to ``-tol`` are treated as zero; anything more negative
    raises :class:`NotPSDError`.
    """
    vals, vecs = hermitian_eigensystem(m)
    if vals.size and vals[-1] < -tol:
        raise NotPSDError(f"smallest eigenvalue {vals[-1]:.3e} is below -{tol:.0e}")
    roots = np.sqrt(np.clip(vals, 0.0, None))
    return _frozen((vecs * roots) @ vecs.conj().T)
