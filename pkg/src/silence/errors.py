"""Exception hierarchy for the silence stack."""


class SilenceError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(SilenceError):
    """Invalid parameter, mode id, scenario key or value."""


class SizeError(SilenceError):
    """Buffer or message has the wrong length for the requested operation."""


class InvalidPairError(SilenceError):
    """Manchester chip pair is (0,0) or (1,1); signals channel corruption."""

    def __init__(self, index: int):
        self.index = index
        super().__init__(f"invalid Manchester pair at index {index}")


class InvalidCodewordError(SilenceError):
    """4B6B sextet is not in the code table; signals channel corruption."""

    def __init__(self, index: int):
        self.index = index
        super().__init__(f"invalid 4B6B codeword at sextet {index}")


class UncorrectableError(SilenceError):
    """Reed-Solomon decoder found more errors than it can correct."""


class IntegrityError(SilenceError):
    """MAC frame CRC-32 mismatch or inconsistent header fields."""


class HeaderError(SilenceError):
    """PHY header failed its check sequence or names an unusable mode."""


class PsduError(SilenceError):
    """PSDU chips could not be decoded back to frame bytes."""


class TruncationError(SilenceError):
    """Sample stream ends before the frame it carries is complete."""


class BackpressureError(SilenceError):
    """Transmit queue is full; caller must slow down."""


class TransportError(SilenceError):
    """Medium could not be opened (bind/connect failure) or misbehaved."""
