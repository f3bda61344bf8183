"""Exception types raised across the package."""


class DaeplError(Exception):
    """Base class for all errors raised by :mod:`daepl`."""


class DimensionError(DaeplError, ValueError):
    """Operands do not have compatible dimensions."""


class SingularPencilError(DaeplError):
    """``zE + A`` is numerically singular at ``z``.

    The point ``z`` does not belong to the resolvent set at working
    precision.
    """

    def __init__(self, z, sigma_min, threshold=None):
        self.z = complex(z)
        self.sigma_min = float(sigma_min)
        self.threshold = None if threshold is None else float(threshold)
        msg = f"zE+A is numerically singular at z={self.z!r} (sigma_min={self.sigma_min:.3e}"
        if threshold is not None:
            msg += f" <= {self.threshold:.3e}"
        super().__init__(msg + ")")


class StabilizationError(DaeplError):
    """The Wong iteration did not stabilize within ``max_steps``."""


class ChainTooShortError(DaeplError):
    """A Wong chain does not reach the requested level."""


class InjectivityGapError(DaeplError):
    """``E`` is not certifiably injective on the consistent space."""

    def __init__(self, gap, threshold):
        self.gap = float(gap)
        self.threshold = float(threshold)
        super().__init__(
            f"injectivity gap {self.gap:.3e} <= threshold {self.threshold:.3e}; "
            "E is not certifiably injective on the consistent space"
        )


class DomainDefectError(DaeplError):
    """The generator domain ``V`` is a proper subspace of ``U``."""


class InconsistentInitialValueError(DaeplError):
    """The initial value does not lie in the consistent space."""

    def __init__(self, distance, sine):
        self.distance = float(distance)
        self.sine = float(sine)
        super().__init__(
            "initial value not consistent: only initial values in U admit mild "
            f"solutions (distance to U = {self.distance:.3e}, sine = {self.sine:.3e})"
        )


class ContourError(DaeplError):
    """A Bromwich contour passes through (or too close to) a singular point."""

    def __init__(self, z, message=None):
        self.z = complex(z)
        super().__init__(message or f"contour node z={self.z!r} is numerically singular")


class TruncationError(DaeplError):
    """The transform has not decayed enough at the contour truncation."""


class MatrixMarketError(DaeplError, ValueError):
    """A Matrix Market file could not be parsed."""

    def __init__(self, path, message, line=None):
        self.path = str(path)
        self.line = line
        where = f"{self.path}:{line}" if line is not None else self.path
        super().__init__(f"{where}: {message}")
