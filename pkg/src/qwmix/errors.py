"""Exception types raised by qwmix."""


class QwmixError(Exception):
    pass


class DegenerateSpectrum(QwmixError):
    """A gap functional was requested on a spectrum with repeated eigenvalues."""

    def __init__(self, message, index=None, gap=None):
        super().__init__(message)
        self.index = index
        self.gap = gap


class SpectralConvergenceError(QwmixError):
    """The eigensolver failed to converge or its certificate is violated."""


class GridTooCoarse(QwmixError):
    pass


class InsufficientTrials(QwmixError):
    pass


class InsufficientData(QwmixError):
    pass
