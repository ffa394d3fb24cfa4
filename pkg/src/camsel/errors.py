"""Exception types raised across the package."""


class CamselError(Exception):
    """Base class for every error raised by camsel."""


class InvalidParameterError(CamselError, ValueError):
    """A numeric parameter is outside its admissible range."""


class InvalidInputError(CamselError, ValueError):
    """Arguments are inconsistent with each other (lengths, ranges, budgets)."""


class CapacityError(CamselError):
    """The requested enumeration is too large to run exhaustively."""


class MissingSubsetError(CamselError, KeyError):
    """A strict quality table has no entry for the requested camera subset."""

    def __init__(self, mask: int, n: int | None = None):
        self.mask = mask
        ids = [i + 1 for i in range(mask.bit_length()) if mask >> i & 1]
        label = ",".join(map(str, ids)) or "<empty>"
        super().__init__(f"no quality entry for subset bitmask {mask:#x} (cameras {label})")

    def __str__(self) -> str:
        return self.args[0]


class UnderdeterminedError(CamselError, ValueError):
    """Fewer observations than free parameters in a model fit."""


class ConfigError(CamselError, ValueError):
    """A configuration file is unreadable or violates an invariant."""
