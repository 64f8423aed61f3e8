"""Exception types raised by the solver stack."""


class MeasureError(ValueError):
    """Invalid spectral measure data."""


class MeshError(ValueError):
    """Invalid mesh parameters."""


class CompatibilityError(ValueError):
    """Load data violate the solvability balance.

    The offending value is kept on ``defect`` so callers can report it.
    """

    def __init__(self, defect, tol):
        self.defect = defect
        self.tol = tol
        super().__init__(
            f"compatibility defect {defect:.6g} exceeds tolerance {tol:.3g}: "
            "a solution exists only if int_Omega f = -int_ext g - alpha * int_dOmega h"
        )


class SingularityError(RuntimeError):
    """A factorization broke down."""


class FinitenessError(ValueError):
    """A fractional perimeter is infinite for the requested order."""


class TailError(RuntimeError):
    """Exterior truncation leaves too much of an integral unresolved."""


class ConfigError(ValueError):
    """Malformed or semantically invalid run configuration."""
