class MppaError(Exception):
    """Base class for every error raised by the package."""


class DimensionError(MppaError, ValueError):
    pass


class OperatorError(MppaError, ValueError):
    pass


class ScheduleError(MppaError, ValueError):
    """A schedule leaves (0, 1) or breaks lambda + gamma < 1 at some index."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class ModuliError(MppaError, ValueError):
    pass


class ConfigError(MppaError):
    """Experiment file rejected; `errors` holds every located message."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


class PremiseError(MppaError):
    """Lemma hypotheses do not hold on the given instance."""
