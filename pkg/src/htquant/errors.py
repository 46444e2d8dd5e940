"""Exception types raised across the package."""


class HtqError(ValueError):
    """Base class for every error raised by htquant."""


class NonPowerOfTwo(HtqError):
    pass


class OrderTooLarge(HtqError):
    pass


class WidthTooSmall(HtqError):
    pass


class AlphaNegative(HtqError):
    pass


class ZeroGain(HtqError):
    pass


class EmptyDataset(HtqError):
    pass


class BitsOutOfRange(HtqError):
    pass


class CodeOverflow(HtqError):
    pass


class DimensionMismatch(HtqError):
    pass


class ImageTooSmall(HtqError):
    pass


class BackendBitsNegative(HtqError):
    pass


class FormatError(HtqError):
    """Malformed input file (``.htq`` container or image)."""


class BadMagic(FormatError):
    pass


class TruncatedPayload(FormatError):
    pass


class HeaderFieldOutOfRange(FormatError):
    pass


class DegenerateDC(UserWarning):
    """Warning: the DC channel has zero spread, gains cannot be derived."""
