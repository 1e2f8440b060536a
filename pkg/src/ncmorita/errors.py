"""Exception hierarchy shared by all modules."""


class NCMoritaError(Exception):
    """Base class for every error raised by this package."""


class DimensionError(NCMoritaError, ValueError):
    """Shapes of matrices, tables or maps do not fit together."""


class MembershipError(NCMoritaError, ValueError):
    """A matrix does not lie in the span of an algebra basis."""


class PreconditionError(NCMoritaError, ValueError):
    """An operation was called on inputs violating its preconditions."""


class ArgumentError(NCMoritaError, ValueError):
    """Malformed argument (index out of range, mismatched actions, ...)."""


class ValidationError(NCMoritaError, ValueError):
    """An example file failed to parse or validate.

    ``field`` names the offending key and ``location`` the file (or the
    nested path inside it) where the problem was found.
    """

    def __init__(self, message, field=None, location=None):
        self.field = field
        self.location = location
        parts = [message]
        if field is not None:
            parts.append(f"field={field!r}")
        if location is not None:
            parts.append(f"at {location}")
        super().__init__(" ".join(parts))


class ActionRejected(NCMoritaError):
    """A model builder refused to produce a candidate; ``report`` says why."""

    def __init__(self, message, report=None):
        self.report = report
        super().__init__(message)
