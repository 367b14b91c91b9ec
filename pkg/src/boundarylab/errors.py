"""Exception hierarchy shared by all modules.

Every error carries an ``exit_code`` used by the command line front end.
"""


class BoundaryLabError(Exception):
    exit_code = 1


class WordError(BoundaryLabError, ValueError):
    """Malformed syllable sequence or unparsable word string."""

    exit_code = 2


class ConfigError(BoundaryLabError, ValueError):
    """Configuration does not match the documented schema."""

    exit_code = 2

    def __init__(self, field, message):
        super().__init__(f"config field {field!r}: {message}")
        self.field = field


class EnumerationCapError(BoundaryLabError, RuntimeError):
    """A resource guard (radius or visited-word cap) was exceeded."""

    exit_code = 3

    def __init__(self, cap_name, cap_value):
        super().__init__(f"enumeration cap {cap_name}={cap_value} exceeded")
        self.cap_name = cap_name
        self.cap_value = cap_value


class CapabilityError(BoundaryLabError):
    """The requested computation is not supported for this input."""

    exit_code = 4


class InconclusiveWindow(BoundaryLabError):
    """A projection minimum was attained on the edge of an axis window."""

    exit_code = 5

    def __init__(self, message, axis=None, point=None):
        super().__init__(message)
        self.axis = axis
        self.point = point


class OrderError(BoundaryLabError):
    """Interval order inconsistent at the requested threshold."""

    exit_code = 6

    def __init__(self, message, triple=None):
        super().__init__(message)
        self.triple = triple


class SearchFailure(BoundaryLabError):
    """A constructive search exhausted its candidates."""

    exit_code = 7

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or []


class AdmissibilityError(BoundaryLabError):
    """A constructed path failed the admissibility conditions."""

    exit_code = 8

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report
