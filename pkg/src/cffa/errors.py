"""Exception hierarchy shared by every solver and the CLI."""


class CFFAError(Exception):
    """Base class for all errors raised by the package."""


class InstanceError(CFFAError, ValueError):
    """Malformed or invariant-violating instance.

    ``code`` is a short machine-readable tag (e.g. ``ETA_RANGE``) and
    ``pointer`` names the offending field, like ``utilities[1][3]``.
    """

    def __init__(self, code, message, pointer=None):
        self.code = code
        self.pointer = pointer
        where = f" at {pointer}" if pointer else ""
        super().__init__(f"{code}{where}: {message}")


class MalformedCertificateError(CFFAError, ValueError):
    """A certificate references agents or jobs that the instance does not have."""


class CapacityError(CFFAError):
    """The input exceeds a hard size limit or a configured search budget."""


class RoutingError(CFFAError):
    """A solver was asked to run on an instance outside its applicability class."""


class ClassViolationError(CFFAError):
    """A graph turned out not to belong to the class its profile declared."""


class InternalError(CFFAError, RuntimeError):
    """An internal consistency check failed; indicates a bug."""
