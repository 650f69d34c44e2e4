"""Exception types shared across the package.

The CLI maps each class to a distinct exit status.
"""


class SliceFftError(Exception):
    """Base class for all package errors."""


class FormatMismatchError(SliceFftError, ValueError):
    """Operands carry different fixed-point formats, or a file header is malformed."""


class RangeError(SliceFftError, ValueError):
    """An operand lies outside the range its container can hold."""


class SizeError(SliceFftError, ValueError):
    """A sequence length violates an engine limit."""


class ParameterError(SliceFftError, ValueError):
    """A configuration parameter is out of its supported range."""


class DegenerateReferenceError(SliceFftError, ValueError):
    """An SNR reference carries zero power."""


class SelfCheckError(SliceFftError, AssertionError):
    """A built-in oracle comparison failed."""
