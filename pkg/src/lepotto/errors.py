"""Exception hierarchy.

Every error raised on purpose by the package derives from :class:`LepOttoError`.
The three intermediate classes map onto CLI exit codes (config 2, numerics 3,
I/O 4).
"""


class LepOttoError(Exception):
    exit_code = 3


class NumericalError(LepOttoError):
    exit_code = 3


class ConfigError(LepOttoError):
    exit_code = 2


class OutputError(LepOttoError):
    exit_code = 4


# core linear algebra
class NonSquare(NumericalError, ValueError):
    pass


class DimensionTooLarge(NumericalError, ValueError):
    pass


class NoConvergence(NumericalError):
    pass


# liouvillian
class DeltaNotZero(NumericalError, ValueError):
    pass


class DegenerateParams(NumericalError, ValueError):
    pass


class NonUniqueSteadyState(NumericalError):
    pass


class ZeroGamma(NumericalError, ValueError):
    pass


class NoBracket(NumericalError):
    pass


# dynamics
class InvalidState(NumericalError, ValueError):
    pass


class Timeout(NumericalError):
    pass


# thermo
class MissingHamiltonian(NumericalError, ValueError):
    pass


class NoHeatAbsorbed(NumericalError):
    pass


class DegenerateDenominator(NumericalError):
    pass


class ZeroPopulation(NumericalError, ValueError):
    pass


# cli
class ParseError(ConfigError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"{message}{where}")


class ValidationError(ConfigError):
    def __init__(self, field, constraint):
        self.field = field
        self.constraint = constraint
        super().__init__(f"{field}: {constraint}")


class IoError(OutputError):
    pass
