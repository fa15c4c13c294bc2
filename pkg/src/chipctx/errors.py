"""Exception types shared across the package."""


class CalibrationError(RuntimeError):
    """Phase calibration did not reach the requested residual.

    Attributes:
        residual: Best residual achieved before giving up.
    """

    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (residual={residual:.3e})")
        self.residual = float(residual)


class ConsistencyError(RuntimeError):
    """An internally assembled quantity violated one of its invariants.

    Raised for defects in assembled circuits (for example a non-unitary
    context matrix), never for bad user input.
    """
