"""Exception types shared across the package.

Each error carries a short machine-readable ``code`` that the command line
maps to exit statuses and JSON error payloads.
"""


class Markov3Error(Exception):
    code = "error"


class DomainError(Markov3Error, ValueError):
    code = "domain"


class EmptyWord(Markov3Error, ValueError):
    code = "empty_word"


class EmptyPeriod(Markov3Error, ValueError):
    code = "empty_period"


class DegenerateCut(Markov3Error, ValueError):
    code = "degenerate_cut"


class ConfigMismatch(Markov3Error, ValueError):
    code = "config_mismatch"


class ConfigError(Markov3Error, ValueError):
    code = "config"


class PrefixMismatch(Markov3Error, ValueError):
    code = "prefix_mismatch"


class NotReduced(Markov3Error, ValueError):
    code = "not_reduced"


class FieldMismatch(Markov3Error, ValueError):
    code = "field_mismatch"


class PrecisionExhausted(Markov3Error, ArithmeticError):
    code = "precision"


class ForbiddenConfiguration(Markov3Error):
    code = "forbidden"


class NonRenormalizable(Markov3Error):
    code = "non_renormalizable"


class MixedKernel(Markov3Error, ValueError):
    code = "mixed_kernel"


class NonPrimitive(Markov3Error, ValueError):
    code = "non_primitive"


class NoRoot(Markov3Error, ArithmeticError):
    code = "no_root"


class ParseError(Markov3Error, ValueError):
    code = "parse"

    def __init__(self, message, position=None):
        super().__init__(message if position is None else f"{message} (at {position})")
        self.position = position


class ResourceLimit(Markov3Error):
    """Raised when a search frontier outgrows its node budget.

    ``partial`` holds whatever the search had settled when it stopped so
    that callers can serialize it and resume.
    """

    code = "resource_limit"

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial
