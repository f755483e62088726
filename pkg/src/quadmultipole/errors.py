"""Exception hierarchy.

Every error carries a short machine-readable ``code`` and an optional
``witness`` payload so the command line front end can emit structured JSON.
"""


class QMError(Exception):
    """Base class for all domain errors raised by the package."""

    code = "error"

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness

    def to_dict(self):
        return {"code": self.code, "message": str(self), "witness": self.witness}


class PolynomialSyntaxError(QMError, ValueError):
    code = "syntax"

    def __init__(self, message, offset):
        super().__init__(f"{message} (at byte {offset})", witness={"offset": offset})
        self.offset = offset


class ParityError(QMError, ValueError):
    code = "parity"


class NotDivisible(QMError, ArithmeticError):
    code = "not_divisible"

    def __init__(self, message, residual):
        super().__init__(message, witness={"residual": float(residual)})
        self.residual = float(residual)


class Degenerate(QMError, ValueError):
    code = "degenerate"


class SolveFailure(QMError, ArithmeticError):
    code = "solve_failure"


class ZeroForm(QMError, ValueError):
    code = "zero_form"


class NoConvergence(QMError, ArithmeticError):
    code = "no_convergence"


class ExplosionGuard(QMError, OverflowError):
    code = "explosion_guard"


class NotConjugateClosed(QMError, ValueError):
    code = "not_conjugate_closed"


class DivisibleInput(QMError, ValueError):
    code = "divisible_input"


class ProbeDegenerate(QMError, ArithmeticError):
    code = "probe_degenerate"


class OffSurface(QMError, ValueError):
    code = "off_surface"


class NotHarmonic(QMError, ValueError):
    code = "not_harmonic"


class Mismatch(QMError, ArithmeticError):
    code = "mismatch"

    def __init__(self, message, distance):
        super().__init__(message, witness={"distance": float(distance)})
        self.distance = float(distance)


class RankIndeterminate(QMError, ArithmeticError):
    code = "rank_indeterminate"


class RankDeficiency(QMError, ArithmeticError):
    code = "rank_deficiency"


class CoincidentPoints(QMError, ValueError):
    code = "coincident_points"
