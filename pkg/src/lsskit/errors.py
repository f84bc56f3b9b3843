"""Exception hierarchy shared by every module."""


class LssError(Exception):
    """Base class for all lsskit errors."""


class GroundMismatchError(LssError, ValueError):
    """Two operands live on different ground sets."""


class InvalidScaleError(LssError, ValueError):
    """A family was used as a scale but has an empty element or misses a point."""


class NotUniformlyBoundedError(LssError, ValueError):
    pass


class PreconditionError(LssError, ValueError):
    """An operation was called outside its documented preconditions."""


class OracleLimitExceeded(LssError):
    """An exhaustive subroutine was asked to work past its configured size limit."""

    def __init__(self, what: str, size: int, limit: int):
        super().__init__(f"oracle limit exceeded: {what} has size {size} > {limit}")
        self.what = what
        self.size = size
        self.limit = limit


class RouteDisagreement(LssError, AssertionError):
    """Two independent decision routes returned different verdicts (an implementation bug)."""


class DocumentError(LssError, ValueError):
    """A space, witness or certificate document is malformed."""

    def __init__(self, message: str, where: str | None = None):
        super().__init__(f"{where}: {message}" if where else message)
        self.where = where
