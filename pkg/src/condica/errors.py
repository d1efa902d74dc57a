"""Exception hierarchy shared by all condica modules.

Every error carries an ``exit_code`` so the CLI can map failures onto its
documented process exit codes: 2 configuration, 3 data/parse, 4 numerical.
"""


class CondicaError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 2


class ContractViolation(CondicaError):
    """An argument violates a documented precondition."""

    exit_code = 2


class ConfigError(CondicaError):
    """Invalid experiment or CLI configuration, detected before any compute."""

    exit_code = 2


class ParseError(CondicaError):
    """Malformed input file (CSV/BIN matrix, labels, model container)."""

    exit_code = 3


class MissingClassError(CondicaError):
    """A declared class has no samples, or an unknown class id was requested."""

    exit_code = 3


class InsufficientSamplesError(CondicaError):
    """A class has fewer samples than the operation requires."""

    exit_code = 3


class DegenerateMarginalError(CondicaError):
    """A source dimension is constant and cannot be quantile-mapped."""

    exit_code = 3


class DegenerateTestError(CondicaError):
    """A statistical test is undefined on the given inputs (zero variance)."""

    exit_code = 3


class NumericalFailure(CondicaError):
    """An iterative or factorization routine failed numerically."""

    exit_code = 4


class RankDeficiencyError(NumericalFailure):
    """Requested more components than the data supports."""

    def __init__(self, message, achievable=None):
        super().__init__(message)
        self.achievable = achievable


class DefinitenessError(NumericalFailure):
    """Cholesky factorization failed; ``pivot`` is the 0-based failing pivot."""

    def __init__(self, message, pivot=None):
        super().__init__(message)
        self.pivot = pivot
