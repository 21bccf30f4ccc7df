"""Exception hierarchy.

Every error carries an ``exit_code`` so the CLI can map failures without
inspecting messages: 1 for configuration problems, 2 for data problems.
"""


class AuditError(Exception):
    exit_code = 3


class ConfigError(AuditError):
    exit_code = 1


class SchemaError(ConfigError):
    """Unknown attribute name or malformed schema."""


class RoleError(ConfigError):
    """Attribute used in a role it does not have."""


class ParameterError(ConfigError):
    """Generator or learner parameter out of range."""


class IntegralityError(ParameterError):
    """A count derived from rational parameters is not an integer."""


class DataError(AuditError):
    exit_code = 2


class EmptyInputError(DataError):
    pass


class ParseError(DataError):
    def __init__(self, message, line=None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


class ConversionError(DataError):
    pass


class AlignmentError(DataError):
    """Observed and predicted datasets cannot be paired row by row."""


class UndefinedMetricError(DataError):
    pass
