"""Exception types shared across the package.

Anything raised as a PunforgeError is a data or resource problem (bad file,
mismatched vocabulary, impossible training input).  Plain ValueError /
TypeError keep their usual meaning of a caller bug.
"""


class PunforgeError(Exception):
    """Base class for data and resource errors."""


class FormatError(PunforgeError):
    """A file does not conform to its declared format."""


class ResourceError(PunforgeError):
    """A required resource is missing or inconsistent with its siblings."""


class TrainingError(PunforgeError):
    """Training input is degenerate (too small, yields no examples)."""


class UnknownWordError(PunforgeError):
    """A query word is not in the model vocabulary."""
