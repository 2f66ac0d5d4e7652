"""Modified Brucken Index: computation, classification and severity grading.

The index is ``b1 / b0``, non-contact over contact pixels inside the arch
band. Low values mean a broad contact patch (flat foot), high values a
narrow one (high arch).
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import ndimage

from .errors import EmptyFootprint, ZeroContactArea
from .geometry import (
    AXES,
    DEFAULT_CROP_RATIO,
    EXTENTS,
    ArchROI,
    crop_arch_roi,
    detect_foot_bbox,
    extract_roi,
)
from .imaging import PixelCounts, _as_gray, binarize, count_pixels

DEFAULT_THRESHOLD = 140

# Diagonal neighbours count as touching skin.
EIGHT_CONNECTED = np.ones((3, 3), dtype=bool)


class FootClass(str, enum.Enum):
    FLAT = "Flat"
    NORMAL = "Normal"
    HIGH_ARCH = "HighArch"
    BORDERLINE_FLAT_NORMAL = "BorderlineFlatNormal"
    BORDERLINE_NORMAL_HIGH = "BorderlineNormalHigh"
    OUT_OF_RANGE = "OutOfRange"

    @property
    def region(self) -> str:
        """Plot region used by batch reports: flat, normal, high_arch or other."""
        return {
            FootClass.FLAT: "flat",
            FootClass.NORMAL: "normal",
            FootClass.HIGH_ARCH: "high_arch",
        }.get(self, "other")


@dataclass(frozen=True)
class RangeTable:
    """Inclusive MBI intervals for the three foot types."""

    flat: tuple[float, float] = (0.1, 0.38)
    normal: tuple[float, float] = (0.7, 1.4)
    high_arch: tuple[float, float] = (1.7, 2.3)

    def __post_init__(self):
        for name in ("flat", "normal", "high_arch"):
            lo, hi = getattr(self, name)
            object.__setattr__(self, name, (float(lo), float(hi)))
            if not 0 <= lo <= hi:
                raise ValueError(f"range {name!r} must satisfy 0 <= low <= high, got [{lo}, {hi}]")
        if not (self.flat[1] < self.normal[0] and self.normal[1] < self.high_arch[0]):
            raise ValueError("ranges must be ordered and disjoint: flat < normal < high_arch")

    def to_dict(self) -> dict:
        return {"flat": list(self.flat), "normal": list(self.normal), "high_arch": list(self.high_arch)}

    @classmethod
    def from_dict(cls, d: dict) -> "RangeTable":
        unknown = set(d) - {"flat", "normal", "high_arch"}
        if unknown:
            raise ValueError(f"unknown range keys: {sorted(unknown)}")
        kwargs = {}
        for name, bounds in d.items():
            if not isinstance(bounds, (list, tuple)) or len(bounds) != 2:
                raise ValueError(f"range {name!r} must be a [low, high] pair")
            kwargs[name] = tuple(bounds)
        return cls(**kwargs)

    @classmethod
    def load(cls, path) -> "RangeTable":
        return cls.from_dict(json.loads(Path(path).read_text()))


@dataclass(frozen=True)
class AnalysisConfig:
    threshold: float = DEFAULT_THRESHOLD
    crop_ratio: float = DEFAULT_CROP_RATIO
    axis: str = "vertical"
    roi_extent: str = "plate"
    ranges: RangeTable = field(default_factory=RangeTable)

    def __post_init__(self):
        if not 0 <= self.threshold <= 255:
            raise ValueError(f"threshold must lie in [0, 255], got {self.threshold}")
        if not 0 < self.crop_ratio < 1:
            raise ValueError(f"crop_ratio must lie in (0, 1), got {self.crop_ratio}")
        if self.axis not in AXES:
            raise ValueError(f"axis must be one of {AXES}, got {self.axis!r}")
        if self.roi_extent not in EXTENTS:
            raise ValueError(f"roi_extent must be one of {EXTENTS}, got {self.roi_extent!r}")

    def to_dict(self) -> dict:
        return {
            "threshold": self.threshold,
            "crop_ratio": self.crop_ratio,
            "axis": self.axis,
            "roi_extent": self.roi_extent,
            "ranges": self.ranges.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "AnalysisConfig":
        d = dict(d)
        unknown = set(d) - {"threshold", "crop_ratio", "axis", "roi_extent", "ranges"}
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        if "ranges" in d and not isinstance(d["ranges"], RangeTable):
            d["ranges"] = RangeTable.from_dict(d["ranges"])
        return cls(**d)


@dataclass(frozen=True)
class MbiResult:
    counts: PixelCounts
    mbi: float
    threshold: float
    roi: ArchROI


@dataclass(frozen=True)
class Continuity:
    """Number of 8-connected contact components in the footprint."""

    component_count: int

    @property
    def is_continuous(self) -> bool:
        return self.component_count == 1

    @property
    def label(self) -> str:
        return "Continuous" if self.is_continuous else "Discontinuous"


@dataclass(frozen=True)
class FootAssessment:
    result: MbiResult
    foot_class: FootClass
    severity: float | None
    continuity: Continuity


def compute_mbi(counts: PixelCounts, threshold: float, roi: ArchROI) -> MbiResult:
    if counts.b0 == 0:
        raise ZeroContactArea(
            "arch region has no contact pixels (blank frame, wrong threshold, "
            "or a high arch with no midfoot contact)"
        )
    return MbiResult(counts=counts, mbi=counts.b1 / counts.b0, threshold=threshold, roi=roi)


def classify(mbi: float, ranges: RangeTable | None = None) -> FootClass:
    """Label an index value; interval endpoints belong to the named class."""
    if mbi < 0:
        raise ValueError(f"mbi must be non-negative, got {mbi}")
    r = ranges or RangeTable()
    if mbi < r.flat[0] or mbi > r.high_arch[1]:
        return FootClass.OUT_OF_RANGE
    if mbi <= r.flat[1]:
        return FootClass.FLAT
    if mbi < r.normal[0]:
        return FootClass.BORDERLINE_FLAT_NORMAL
    if mbi <= r.normal[1]:
        return FootClass.NORMAL
    if mbi < r.high_arch[0]:
        return FootClass.BORDERLINE_NORMAL_HIGH
    return FootClass.HIGH_ARCH


def grade_severity(mbi: float, foot_class: FootClass, ranges: RangeTable | None = None) -> float | None:
    """Linear position of ``mbi`` inside its class interval, 0 mildest to 1 most severe.

    Flat feet grow more severe as the index falls, high arches as it rises.
    Returns None for every other class.
    """
    r = ranges or RangeTable()
    if foot_class == FootClass.FLAT:
        lo, hi = r.flat
        grade = (hi - mbi) / (hi - lo) if hi > lo else 1.0
    elif foot_class == FootClass.HIGH_ARCH:
        lo, hi = r.high_arch
        grade = (mbi - lo) / (hi - lo) if hi > lo else 1.0
    else:
        return None
    return min(1.0, max(0.0, grade))


def check_continuity(mask) -> Continuity:
    contact = np.asarray(mask) == 0
    _, n = ndimage.label(contact, structure=EIGHT_CONNECTED)
    if n == 0:
        raise EmptyFootprint("no contact pixels to test for continuity")
    return Continuity(component_count=int(n))


def assess(gray, config: AnalysisConfig | None = None, *, mask=None) -> FootAssessment:
    """Run the full pipeline on a gray image.

    ``mask`` may be passed when the caller already binarized ``gray`` at
    ``config.threshold``. Continuity is judged over the whole foot box, not
    the arch band, since a normal arch band may legitimately hold only the
    lateral strip.
    """
    config = config or AnalysisConfig()
    gray = _as_gray(gray)
    if mask is None:
        mask = binarize(gray, config.threshold)
    elif np.shape(mask) != gray.shape:
        raise ValueError(f"mask shape {np.shape(mask)} does not match image shape {gray.shape}")

    height, width = gray.shape
    bbox = detect_foot_bbox(mask)
    roi = crop_arch_roi((width, height), bbox, config.crop_ratio, config.axis, config.roi_extent)
    counts = count_pixels(extract_roi(mask, roi))
    continuity = check_continuity(mask[bbox.top : bbox.bottom + 1, bbox.left : bbox.right + 1])
    try:
        result = compute_mbi(counts, config.threshold, roi)
    except ZeroContactArea as exc:
        # a split footprint with a bare arch band is the extreme high-arch case
        exc.continuity = continuity
        raise
    foot_class = classify(result.mbi, config.ranges)
    return FootAssessment(
        result=result,
        foot_class=foot_class,
        severity=grade_severity(result.mbi, foot_class, config.ranges),
        continuity=continuity,
    )
