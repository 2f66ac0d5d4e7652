"""Modified Brucken Index analysis of plantar footprint images."""

from .errors import (
    AllPointsUndefined,
    CorruptFile,
    DegenerateROI,
    EmptyFootprint,
    FootprintError,
    UnsupportedFormat,
    ZeroContactArea,
)
from .geometry import ArchROI, FootBBox, crop_arch_roi, detect_foot_bbox, extract_roi
from .imaging import PixelCounts, binarize, count_pixels, decode_image, load_image, to_grayscale
from .mbi import (
    AnalysisConfig,
    Continuity,
    FootAssessment,
    FootClass,
    MbiResult,
    RangeTable,
    assess,
    check_continuity,
    classify,
    compute_mbi,
    grade_severity,
)
from .sensitivity import SweepPoint, SweepReport, max_error, threshold_sweep
from .synth import FootTemplate, analytic_mbi, generate

__version__ = "0.1.0"
