"""Exception types shared across the package."""


class CsBoostError(Exception):
    """Base class for all csboost errors."""


class ConfigError(CsBoostError):
    """A configuration value violates its documented constraint."""


class ContractError(CsBoostError):
    """A call violated an API contract (shape, range, or state)."""


class DataLoadError(CsBoostError):
    """A data file is missing, unreadable, or malformed."""


class InfeasibleError(CsBoostError):
    """The data cannot support the requested split, fold, or evaluation."""


class DegenerateWeightsError(CsBoostError):
    """A weight update underflowed to an unusable distribution."""
