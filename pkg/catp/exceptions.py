class CatpError(Exception):
    """Base exception class for CATP errors."""

    exit_code: int = 3


class InvalidInputError(CatpError):
    """Raised when invalid input is provided."""

    exit_code = 2


class LayerOutOfRangeError(InvalidInputError):
    """Raised when a layer selection names a layer the tensor does not have."""

    pass


class RatioOutOfRangeError(InvalidInputError):
    """Raised when a prune ratio falls outside [0, 1]."""

    pass


class KOutOfRangeError(InvalidInputError):
    """Raised when a keep count falls outside [0, n_query]."""

    pass


class WeightLengthMismatchError(InvalidInputError):
    """Raised when image weights do not match the number of image tokens."""

    pass


class ShapeMismatchError(InvalidInputError):
    """Raised when two inputs disagree on a dimension they must share."""

    pass


class EmptyColumnError(InvalidInputError):
    """Raised when a vote column has no query tokens."""

    pass


class ZeroMassWeightsError(InvalidInputError):
    """Raised when every image token has zero received attention."""

    pass


class NegativeScoreError(InvalidInputError):
    """Raised when a received-attention score is negative."""

    pass


class FormatError(CatpError):
    """Raised when a CATP file is malformed."""

    exit_code = 3


class BadMagicError(FormatError):
    """Raised when a file does not start with the CATP magic."""

    pass


class UnsupportedVersionError(FormatError):
    """Raised when a file declares a format version this build cannot read."""

    pass


class KindMismatchError(FormatError):
    """Raised when a file holds a different tensor kind than requested."""

    pass


class TruncatedPayloadError(FormatError):
    """Raised when the header or payload is shorter than the declared dims."""

    pass


class TrailingBytesError(FormatError):
    """Raised when the payload is longer than the declared dims."""

    pass


class NonFiniteValueError(CatpError):
    """Raised when a NaN or infinity is found."""

    exit_code = 3


class FileOperationError(CatpError):
    """Raised when a file operation fails."""

    exit_code = 3


class NormalizationError(CatpError):
    """Raised when strict validation finds rows that do not sum to one."""

    exit_code = 1
