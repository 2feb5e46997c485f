"""Exception types raised by the solvers and the FE layer."""


class KerrwaveError(Exception):
    """Base class for all package errors."""


class SingularMassError(KerrwaveError):
    """A (possibly field-dependent) lumped mass has a nonpositive entry."""


class SolverDivergedError(KerrwaveError):
    """Fixed-point iteration did not reach the tolerance.

    The last successive-iterate change is kept in ``residual``.
    """

    def __init__(self, message, residual=float("nan"), iterations=0):
        super().__init__(f"{message} (last residual {residual:.3e} after {iterations} iterations)")
        self.residual = residual
        self.iterations = iterations


class ConfigError(KerrwaveError):
    """Invalid run configuration; ``line`` points into the source file when known."""

    def __init__(self, message, line=None, source=None):
        where = ""
        if source is not None and line is not None:
            where = f"{source}:{line}: "
        elif line is not None:
            where = f"line {line}: "
        super().__init__(where + message)
        self.line = line
        self.source = source
