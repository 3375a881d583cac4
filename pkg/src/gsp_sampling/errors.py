"""Exception types raised by gsp_sampling."""


class GspError(Exception):
    """Base class for all library errors."""


class ParameterError(GspError, ValueError):
    """An argument is outside its admissible range."""


class ContractError(GspError, ValueError):
    """An input violates an operation's precondition."""


class GraphGenerationError(GspError, RuntimeError):
    """Random graph generation could not produce a connected graph."""


class SingularSystemError(GspError, ArithmeticError):
    """A linear system that must be solved is singular."""

    def __init__(self, message, condition=None):
        super().__init__(message)
        self.condition = condition


class ConfigError(GspError, ValueError):
    """An experiment configuration is malformed."""


class NumericalError(GspError, ArithmeticError):
    """A quantity that must be exact (e.g. an integer) drifted past tolerance."""
