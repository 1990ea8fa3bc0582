"""Exception hierarchy shared by every toporeg module."""


class ToporegError(ValueError):
    """Base class; the CLI reports ``type(err).__name__`` on failure."""


class DuplicatePointsError(ToporegError):
    pass


class AllCollinearError(ToporegError):
    pass


class NoCycleError(ToporegError):
    pass


class NotALoopError(ToporegError):
    pass


class TooFewPointsError(ToporegError):
    pass


class DegenerateCloudError(ToporegError):
    pass


class ShapeMismatchError(ToporegError):
    pass


class RankDeficientError(ToporegError):
    pass


class EmptyGraphError(ToporegError):
    pass


class LengthMismatchError(ToporegError):
    pass


class SingleLabelError(ToporegError):
    pass


class BadDimensionsError(ToporegError):
    pass


class FixtureMissingError(ToporegError):
    pass


class ConfigError(ToporegError):
    pass


class NonFiniteLossError(ToporegError):
    """Raised when the loss or gradient stops being finite.

    ``params`` and ``epoch`` hold the last state whose loss was finite, and
    ``trace`` the records gathered up to that point.
    """

    def __init__(self, message, params=None, epoch=None, trace=None):
        super().__init__(message)
        self.params = params
        self.epoch = epoch
        self.trace = trace
