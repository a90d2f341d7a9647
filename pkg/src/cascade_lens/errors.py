"""Exception hierarchy shared by all modules."""


class CascadeLensError(Exception):
    """Base class for toolkit errors."""


class ParseError(CascadeLensError):
    def __init__(self, message, line=None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class EmptyInputError(CascadeLensError):
    pass


class InsufficientDataError(CascadeLensError):
    pass


class DivergentFitError(CascadeLensError):
    pass


class UndefinedMetricError(CascadeLensError):
    pass


class DegenerateDistributionError(CascadeLensError):
    pass


class UnknownNodeError(CascadeLensError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class UnsortedLogError(CascadeLensError):
    pass


class NoDataError(CascadeLensError):
    pass


class MissingRoleError(CascadeLensError):
    pass


class ConfigError(CascadeLensError, ValueError):
    pass
