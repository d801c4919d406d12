"""Exception types raised across the toolkit."""

from __future__ import annotations


class FacekitError(Exception):
    """Base class for all toolkit errors."""


# -- dataset ----------------------------------------------------------------

class MissingFile(FacekitError):
    pass


class SchemaViolation(FacekitError):
    """Manifest content violates the schema.

    Carries the offending field name and a location string such as
    ``faces[3].landmarks`` so callers can point at the bad entry.
    """

    def __init__(self, field: str, location: str, message: str = ""):
        self.field = field
        self.location = location
        super().__init__(f"{location}: invalid {field}" + (f": {message}" if message else ""))


class DuplicateFaceId(FacekitError):
    pass


class TooFewFaces(FacekitError):
    pass


# -- preprocessing ----------------------------------------------------------

class DegenerateLandmarks(FacekitError):
    pass


class EmptyImage(FacekitError):
    pass


# -- feature extraction -----------------------------------------------------

class EmptyPatch(FacekitError):
    pass


class ImageTooSmall(FacekitError):
    pass


class DegenerateInput(FacekitError):
    pass


class DimMismatch(FacekitError):
    pass


class UnknownFaceId(FacekitError):
    pass


# -- learning ---------------------------------------------------------------

class ZeroVariance(FacekitError):
    pass


class SingleClass(FacekitError):
    pass


class SingularCovariance(FacekitError):
    pass


class NonFiniteInput(FacekitError):
    pass


# -- occlusion --------------------------------------------------------------

class PartsOverlap(FacekitError):
    pass


class InfeasibleBalance(FacekitError):
    pass


# -- experiment service -----------------------------------------------------

class DuplicateActiveSession(FacekitError):
    pass


class UnknownSession(FacekitError):
    pass


class SessionComplete(FacekitError):
    pass


class UnknownTrial(FacekitError):
    pass


class DuplicateSubmission(FacekitError):
    pass


class RtOutOfRange(FacekitError):
    pass
