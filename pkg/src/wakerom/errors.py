"""Exception hierarchy shared by every wakerom module."""


class WakeRomError(Exception):
    """Base class; ``exit_code`` is what the command line maps it to."""

    exit_code = 3


class InputError(WakeRomError, ValueError):
    exit_code = 2


class InvalidSeries(InputError):
    pass


class MalformedCSV(InputError):
    pass


class InvalidConfig(InputError):
    pass


class AnalysisError(WakeRomError):
    exit_code = 3


class SpanTooShort(AnalysisError):
    pass


class TooFewSamples(AnalysisError):
    pass


class NoDominantPeak(AnalysisError):
    pass


class MismatchedSampling(AnalysisError):
    pass


class MissingFundamental(AnalysisError):
    pass


class NotPeriodic(AnalysisError):
    pass


class NotSettled(AnalysisError):
    pass


class ZeroInitialState(AnalysisError):
    pass


class DegenerateSurface(AnalysisError):
    pass


class SingularFit(AnalysisError):
    pass


class Diverged(WakeRomError):
    """Raised when a flow field blows up; carries where it happened."""

    exit_code = 4

    def __init__(self, message, step=None, time=None, field_max=None):
        super().__init__(message)
        self.step = step
        self.time = time
        self.field_max = field_max
