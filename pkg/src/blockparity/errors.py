"""Exception hierarchy shared by the codec, the embedders and the CLI."""


class StegoError(Exception):
    """Base class for every error raised by this package."""


# -- PBM codec --

class PbmError(StegoError):
    pass


class BadMagic(PbmError):
    pass


class BadHeader(PbmError):
    pass


class Truncated(PbmError):
    pass


class BadDigit(PbmError):
    pass


# -- payload framing --

class PayloadError(StegoError):
    pass


class TooLong(PayloadError):
    pass


class Underflow(PayloadError):
    pass


class BadLength(PayloadError):
    pass


# -- block layout / capacity --

class ImageTooSmall(StegoError):
    pass


class CapacityExceeded(StegoError):
    def __init__(self, message, shortfall_bytes=None):
        super().__init__(message)
        self.shortfall_bytes = shortfall_bytes


class KeyListError(StegoError):
    pass


# -- embedding --

class UniformBlock(StegoError):
    pass


class EmptyDiff(StegoError):
    pass


class NoViableCandidate(StegoError):
    pass


class NotAStegoImage(StegoError):
    pass


# -- CPT baseline / metrics --

class DimensionMismatch(StegoError):
    pass


class InvalidConfig(StegoError):
    pass


class NoSolution(StegoError):
    pass
