"""Exception hierarchy.

Every error carries a short ``code`` string so callers (and the CLI) can
branch on the failure kind without matching on messages.
"""


class CadError(ValueError):
    code = "error"


class ShapeError(CadError):
    code = "shape"


class NotHermitianError(CadError):
    code = "not_hermitian"


class NoConvergenceError(CadError):
    code = "no_convergence"


class NotPSDError(CadError):
    code = "not_psd"


class ParamRangeError(CadError):
    code = "param_range"


class NullStateError(CadError):
    code = "null_state"


class NotXStateError(CadError):
    code = "not_x_state"


class NullPostselectionError(CadError):
    code = "null_postselection"


class DegenerateStateError(CadError):
    code = "degenerate_state"


class NumericBreakdownError(CadError):
    code = "numeric_breakdown"


class NotPhysicalError(CadError):
    """Raised when a channel or state fails a physicality check."""

    code = "not_physical"


class BadSpecError(CadError):
    code = "bad_spec"

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field
