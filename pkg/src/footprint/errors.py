"""Exception hierarchy shared by the analysis pipeline and the CLI."""


class FootprintError(Exception):
    """Base class for every analysis failure the CLI maps to exit code 2."""


class UnsupportedFormat(FootprintError):
    """Input is not an 8-bit PNG or JPEG."""


class CorruptFile(FootprintError):
    """Input claims a supported format but cannot be decoded."""


class EmptyFootprint(FootprintError):
    """Mask has no contact (0) pixels: blank frame or a badly chosen threshold."""


class DegenerateROI(FootprintError):
    """Arch band would be shorter than one pixel."""


class ZeroContactArea(FootprintError):
    """Arch region contains no contact pixels, so the index is undefined.

    When raised from a full assessment, ``continuity`` holds the component
    count of the whole footprint so callers can tell a split foot from a
    blank band.
    """

    continuity = None


class AllPointsUndefined(FootprintError):
    """Every point of a threshold sweep had zero contact area."""
