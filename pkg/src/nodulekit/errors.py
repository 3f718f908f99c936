"""Exception and warning types shared across the package."""


class NoduleKitError(Exception):
    """Base class for every error raised by this package."""


class MalformedFile(NoduleKitError):
    """Image file has a bad magic number, bad header, or truncated pixel data."""


class InvalidScale(NoduleKitError):
    """A scale ratio is zero, negative, or not finite."""


class EmptyMask(NoduleKitError):
    """An operation that needs foreground pixels received a mask with none."""


class CenterOutsideMask(NoduleKitError):
    """The radial center does not lie on a foreground pixel."""


class CenterNotInterior(NoduleKitError):
    """The ray origin is not strictly inside the convex hull."""


class DegenerateHull(NoduleKitError):
    """Convex hull has fewer than 3 vertices (or a zero hull distance)."""


class ZeroRadii(NoduleKitError):
    """All contour radial distances are zero, so the shape index is undefined."""


class NonPositiveAR(NoduleKitError):
    """Aspect ratio must be strictly positive."""


class EmptyBatch(NoduleKitError):
    """A batch operation received no samples."""


class DimensionMismatch(NoduleKitError):
    """Two grids or vectors that must share dimensions do not."""


class MalformedXML(NoduleKitError):
    """Annotation document is not well-formed or misses required elements."""


class MalformedPointList(NoduleKitError):
    """ROI point list could not be parsed or has fewer than 3 points."""


class DegeneratePolygon(NoduleKitError):
    """Polygon cannot be rasterized (fewer than 3 vertices)."""


class UnknownLabelWarning(UserWarning):
    """Diagnosis text did not map to benign/malignant; label left absent."""
