"""Exception types raised across the package."""


class BPDIError(Exception):
    """Base class; ``code`` is the machine-readable tag printed by the CLI."""

    code = "error"


class InvalidSizeError(BPDIError, ValueError):
    code = "invalid-size"


class InvalidTargetError(BPDIError, ValueError):
    code = "invalid-target"


class LengthMismatchError(BPDIError, ValueError):
    code = "length-mismatch"


class UnsupportedMethodError(BPDIError, ValueError):
    code = "unsupported-method"


class InsufficientDataError(BPDIError, ValueError):
    code = "insufficient-data"


class ZeroProfileError(BPDIError, ValueError):
    code = "zero-profile"


class TooLargeError(BPDIError, ValueError):
    code = "too-large"


class ConfigError(BPDIError, ValueError):
    code = "invalid-config"


class BridgeViolationError(BPDIError, RuntimeError):
    """A persisted run failed the bridge identity or reconstruction gate."""

    code = "bridge-violation"
