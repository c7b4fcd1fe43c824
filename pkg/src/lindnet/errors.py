"""Exception hierarchy shared by the library and the CLI.

The CLI maps these onto exit codes: configuration problems exit 1, numerical
failures exit 2 (I/O failures surface as ``OSError`` and exit 3).
"""


class LindnetError(Exception):
    pass


class InvalidSpecError(LindnetError, ValueError):
    """A network specification violates one of its invariants."""


class ConfigError(LindnetError, ValueError):
    """Syntax or schema error in an experiment configuration file."""


class NumericalError(LindnetError, ArithmeticError):
    pass


class EigenSolverError(NumericalError):
    pass


class SingularSystemError(NumericalError):
    """Raised when the stationary equations have no unique solution.

    ``eigenvalue`` holds the generator eigenvalue closest to zero when it
    could be computed.
    """

    def __init__(self, message, eigenvalue=None):
        super().__init__(message)
        self.eigenvalue = eigenvalue


class GeneratorSizeError(NumericalError, MemoryError):
    pass


class StepSizeError(NumericalError):
    pass


class NonFiniteError(NumericalError):
    def __init__(self, message, time=None):
        super().__init__(message)
        self.time = time


class DecayFitError(NumericalError):
    pass
