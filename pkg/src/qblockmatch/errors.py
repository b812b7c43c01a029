"""Exception hierarchy shared by every module of the package."""


class QBMError(Exception):
    """Base class for all package errors."""


class ArgumentError(QBMError, ValueError):
    """A numeric or enumerated argument is outside its allowed range."""


class ShapeError(QBMError, ValueError):
    """Array lengths, image dimensions or qubit counts do not agree."""


class CapacityError(QBMError):
    """Requested problem size exceeds a simulator cap."""


class QubitIndexError(QBMError, IndexError):
    """A gate or measurement refers to a qubit that does not exist."""


class DecompositionError(QBMError):
    """A gate has no known expansion into the CNOT + single-qubit basis."""


class EncodingError(QBMError, ValueError):
    """A classical vector cannot be amplitude encoded (e.g. zero norm)."""


class FormatError(QBMError):
    """Malformed or unsupported image file."""


class BoundsError(QBMError, IndexError):
    """A block or window falls outside the image."""


class SearchError(QBMError):
    """A block search has no valid candidate to score."""
