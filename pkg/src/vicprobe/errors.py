"""Exception hierarchy.

ConfigError subclasses signal bad user input (CLI exit code 2);
SolverError subclasses signal numerical failures (CLI exit code 1).
"""


class VicprobeError(Exception):
    pass


class ConfigError(VicprobeError):
    pass


class MissingKey(ConfigError):
    pass


class UnknownKey(ConfigError):
    pass


class NonPositiveRate(ConfigError):
    pass


class InvalidSwitch(ConfigError):
    pass


class ConfigSyntaxError(ConfigError):
    pass


class SolverError(VicprobeError):
    pass


class StepSizeUnderflow(SolverError):
    pass


class SingularSystem(SolverError):
    pass


class DegenerateDetuning(SolverError):
    pass


class NotConverged(SolverError):
    pass


class PeaksNotFound(SolverError):
    pass


class RegimeViolation(SolverError):
    pass


class ZeroDenominator(SolverError):
    pass


class ZeroPump(SolverError):
    pass
