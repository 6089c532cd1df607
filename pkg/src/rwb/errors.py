"""Exception hierarchy shared by every module of the workbench."""


class RwbError(Exception):
    """Base class for all workbench errors."""


class SignatureMismatch(RwbError):
    pass


class MissingConstant(RwbError):
    pass


class OutOfRange(RwbError):
    pass


class ResourceLimit(RwbError):
    """A configured budget (nodes, models, subsets) was exhausted.

    ``stats`` carries whatever partial counters the caller had gathered.
    """

    def __init__(self, message, stats=None):
        super().__init__(message)
        self.stats = dict(stats or {})


class EmptyHom(RwbError):
    pass


class NotInvolution(RwbError):
    pass


class UnknownClass(RwbError):
    pass


class ApFailure(RwbError):
    pass


class FormatError(RwbError):
    """Malformed JSON input for a structure, class spec, palette or report."""
