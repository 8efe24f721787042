class AltchainError(Exception):
    """Base class; ``code`` is the machine-readable tag used by the CLI."""

    code = "error"


class NumericalBreakdown(AltchainError, ArithmeticError):
    code = "numerical-breakdown"


class TransferNonConvergence(AltchainError, ArithmeticError):
    code = "transfer-non-convergence"


class GroundStateNonConvergence(AltchainError):
    """Raised when the floor tau is reached without meeting the energy tolerance.

    The best state found so far is attached as ``result``.
    """

    code = "ground-state-non-convergence"

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result
