"""Two-qubit states: the alpha|00> + beta|11> family and X-shaped density matrices."""

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import NotPhysicalError, NotXStateError, NullStateError, ParamRangeError
from .linalg import as_matrix, hermitian_eigensystem, hermiticity_deviation

NORM_TOL = 1e-9
DENSITY_TOL = 1e-10

# positions that may be non-zero in an X state (|00>,|01>,|10>,|11> order)
X_MASK = np.array(
    [
        [1, 0, 0, 1],
        [0, 1, 0, 0],
        [0, 0, 1, 0],
        [1, 0, 0, 1],
    ],
    dtype=bool,
)


@dataclass(frozen=True)
class InitialState:
    """Pure state alpha|00> + beta|11> with unit norm."""

    alpha: complex
    beta: complex

    @property
    def ratio(self):
        """|alpha / beta|."""
        return abs(self.alpha) / abs(self.beta)


def make_initial(alpha, beta):
    """Build an :class:`InitialState`, absorbing rounding in the norm.

    Norm deviations up to ``NORM_TOL`` are renormalized away. Larger ones are
    rejected rather than silently rescaled.
    """
    alpha = complex(alpha)
    beta = complex(beta)
    if not (cmath.isfinite(alpha) and cmath.isfinite(beta)):
        raise ParamRangeError("amplitudes must be finite")
    norm2 = abs(alpha) ** 2 + abs(beta) ** 2
    if norm2 == 0.0:
        raise NullStateError("alpha and beta are both zero")
    if abs(norm2 - 1.0) > NORM_TOL:
        raise ParamRangeError(f"|alpha|^2 + |beta|^2 = {norm2:.12g}, expected 1")
    scale = 1.0 / math.sqrt(norm2)
    return InitialState(alpha * scale, beta * scale)


def from_alpha(alpha, beta_phase=0.0):
    """State with |beta| = sqrt(1 - |alpha|^2) and the given phase on beta."""
    a = complex(alpha)
    mag2 = abs(a) ** 2
    if mag2 > 1.0 + NORM_TOL:
        raise ParamRangeError(f"|alpha| = {abs(a):.12g} exceeds 1")
    b = math.sqrt(max(0.0, 1.0 - mag2)) * cmath.exp(1j * beta_phase)
    return make_initial(a, b)


def from_ratio(ratio):
    """State with real amplitudes and |alpha/beta| = ratio."""
    if not ratio >= 0.0 or not math.isfinite(ratio):
        raise ParamRangeError(f"ratio must be a finite non-negative number, got {ratio}")
    return make_initial(ratio / math.hypot(1.0, ratio), 1.0 / math.hypot(1.0, ratio))


def to_density(s):
    """Projector |psi><psi| in the fixed two-qubit basis."""
    psi = np.array([s.alpha, 0.0, 0.0, s.beta], dtype=complex)
    return as_matrix(np.outer(psi, psi.conj()))


def density_violation(m):
    """Largest violation of Hermiticity, unit trace and positivity."""
    m = np.asarray(m, dtype=complex)
    herm = hermiticity_deviation(m)
    trace = abs(np.trace(m) - 1.0)
    if herm > DENSITY_TOL:
        return max(herm, trace)
    vals, _ = hermitian_eigensystem(m)
    return max(herm, trace, max(0.0, -float(vals[-1])))


def check_density(m, tol=DENSITY_TOL):
    """Return ``m`` as a frozen matrix, raising if it is not a valid state."""
    m = as_matrix(m)
    if m.shape != (4, 4):
        raise NotPhysicalError(f"two-qubit density matrix must be 4x4, got {m.shape}")
    bad = density_violation(m)
    if bad > tol:
        raise NotPhysicalError(f"not a density matrix (violation {bad:.3e})")
    return m


@dataclass(frozen=True)
class XStateElements:
    """The five independent entries of an X state.

    ``r22`` and ``r33`` are the |01> and |10> populations; ``r14`` is the
    |00><11| coherence. The |01><10| coherence is zero for every state this
    package produces.
    """

    r11: float
    r22: float
    r33: float
    r44: float
    r14: complex

    def to_matrix(self):
        m = np.zeros((4, 4), dtype=complex)
        m[0, 0], m[1, 1], m[2, 2], m[3, 3] = self.r11, self.r22, self.r33, self.r44
        m[0, 3] = self.r14
        m[3, 0] = np.conj(self.r14)
        return as_matrix(m)

    def as_tuple(self):
        return (self.r11, self.r22, self.r33, self.r44, self.r14)

    def max_deviation(self, other):
        return max(abs(a - b) for a, b in zip(self.as_tuple(), other.as_tuple()))

    def violations(self):
        """Largest breach of normalization and X-block positivity."""
        pops = (self.r11, self.r22, self.r33, self.r44)
        return max(
            abs(sum(pops) - 1.0),
            max(0.0, -min(pops)),
            max(0.0, abs(self.r14) ** 2 - self.r11 * self.r44),
        )


def extract_x_elements(d, tol=DENSITY_TOL):
    """Read the X-pattern entries of ``d``; raise if anything else is non-zero."""
    m = np.asarray(d, dtype=complex)
    if m.shape != (4, 4):
        raise NotXStateError(f"expected 4x4, got {m.shape}")
    outside = np.abs(m[~X_MASK])
    if outside.size and outside.max() > tol:
        raise NotXStateError(f"entry outside the X pattern of size {outside.max():.3e}")
    return XStateElements(
        float(m[0, 0].real),
        float(m[1, 1].real),
        float(m[2, 2].real),
        float(m[3, 3].real),
        complex(m[0, 3]),
    )
