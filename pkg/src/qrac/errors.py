"""Exception types shared across the package."""


class QracError(Exception):
    """Base class for all package-specific errors."""


class NotAState(QracError):
    """Input does not describe a physical two-qubit state."""


class FrameError(QracError):
    """Operation requires the canonical diagonal frame; call canonicalize first."""


class SizeMismatch(QracError):
    """Encoding/decoding/strategy table sizes are inconsistent with the task."""


class DegenerateDecodings(QracError):
    """The two decoding directions coincide up to sign; the optimum is ill posed."""


class CoplanarDecodings(QracError):
    """The three decoding directions are coplanar; the closed form does not apply."""


class UnsupportedN(QracError):
    """Dataset length outside the supported range {2, 3}."""


class NotOrdered(QracError):
    """Correlation entries must satisfy |T1| >= |T2| >= |T3|."""


class ConfigError(QracError):
    """Invalid command-line or run configuration."""
