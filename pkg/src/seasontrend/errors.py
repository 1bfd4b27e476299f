"""Exception hierarchy shared across the package."""


class SeasonTrendError(Exception):
    """Base class for all package errors."""


class DimensionError(SeasonTrendError, ValueError):
    """Array shapes are incompatible for the requested operation."""


class ConfigError(SeasonTrendError, ValueError):
    """A configuration value is invalid."""


class ParseError(SeasonTrendError, ValueError):
    """Input file could not be parsed."""


class InsufficientDataError(SeasonTrendError, ValueError):
    """Not enough timesteps for the requested window or split."""


class SimulationDivergenceError(SeasonTrendError, RuntimeError):
    """A stochastic simulation left the stable region."""


class ScheduleExhaustedError(SeasonTrendError, RuntimeError):
    """The optimizer was stepped past its configured schedule."""


class EvaluationError(SeasonTrendError, RuntimeError):
    """A function under evaluation returned a non-finite value."""


class NumericalError(SeasonTrendError, RuntimeError):
    """Non-finite values appeared during training or fitting."""


class SolverError(NumericalError):
    """A linear system could not be solved."""


class CheckpointError(SeasonTrendError, ValueError):
    """A checkpoint is malformed or incompatible with the target parameters."""
