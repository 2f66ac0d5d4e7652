"""Foot localisation and the middle-third arch crop."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateROI, EmptyFootprint

AXES = ("vertical", "horizontal", "auto")
EXTENTS = ("plate", "foot")

DEFAULT_CROP_RATIO = 1 / 3


def round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


@dataclass(frozen=True)
class FootBBox:
    """Inclusive pixel bounds of every contact pixel in a mask."""

    top: int
    bottom: int
    left: int
    right: int

    @property
    def height(self) -> int:
        return self.bottom - self.top + 1

    @property
    def width(self) -> int:
        return self.right - self.left + 1


@dataclass(frozen=True)
class ArchROI:
    """Inclusive pixel bounds of the arch band, plus the ratio that produced it."""

    top: int
    bottom: int
    left: int
    right: int
    crop_ratio: float

    @property
    def height(self) -> int:
        return self.bottom - self.top + 1

    @property
    def width(self) -> int:
        return self.right - self.left + 1

    @property
    def area(self) -> int:
        return self.height * self.width


def detect_foot_bbox(mask) -> FootBBox:
    """Tightest axis-aligned box around the 0-bits of ``mask``."""
    contact = np.asarray(mask) == 0
    rows = np.flatnonzero(contact.any(axis=1))
    if rows.size == 0:
        raise EmptyFootprint("no contact pixels in frame; check the threshold or the input image")
    cols = np.flatnonzero(contact.any(axis=0))
    return FootBBox(top=int(rows[0]), bottom=int(rows[-1]), left=int(cols[0]), right=int(cols[-1]))


def resolve_axis(bbox: FootBBox, axis: str) -> str:
    """Map ``auto`` to the longer side of the box; ties go to vertical."""
    if axis not in AXES:
        raise ValueError(f"axis must be one of {AXES}, got {axis!r}")
    if axis == "auto":
        return "horizontal" if bbox.width > bbox.height else "vertical"
    return axis


def middle_band(start: int, length: int, crop_ratio: float) -> tuple[int, int]:
    """Inclusive ``(first, last)`` of the centred ``crop_ratio`` band of ``[start, start+length)``.

    Band length is ``round_half_up(crop_ratio * length)`` and its start is the
    floor of the centred placement, so the leftover above is never longer
    than the leftover below.
    """
    band = round_half_up(crop_ratio * length)
    if band < 1:
        raise DegenerateROI(
            f"arch band of {crop_ratio:g} x {length} px rounds to {band} px; foot axis too short"
        )
    first = start + (length - band) // 2
    return first, first + band - 1


def crop_arch_roi(
    mask_dims: tuple[int, int],
    bbox: FootBBox,
    crop_ratio: float = DEFAULT_CROP_RATIO,
    axis: str = "vertical",
    extent: str = "plate",
) -> ArchROI:
    """Arch ROI spanning the middle ``crop_ratio`` of the foot axis.

    ``mask_dims`` is ``(width, height)``. Across the axis the ROI covers the
    whole frame (``extent="plate"``) or only the foot box (``extent="foot"``).
    """
    width, height = mask_dims
    if not 0 < crop_ratio < 1:
        raise ValueError(f"crop_ratio must lie in (0, 1), got {crop_ratio}")
    if extent not in EXTENTS:
        raise ValueError(f"extent must be one of {EXTENTS}, got {extent!r}")
    if not (0 <= bbox.top <= bbox.bottom < height and 0 <= bbox.left <= bbox.right < width):
        raise ValueError(f"{bbox} does not fit a {width}x{height} frame")

    if resolve_axis(bbox, axis) == "vertical":
        top, bottom = middle_band(bbox.top, bbox.height, crop_ratio)
        left, right = (0, width - 1) if extent == "plate" else (bbox.left, bbox.right)
    else:
        left, right = middle_band(bbox.left, bbox.width, crop_ratio)
        top, bottom = (0, height - 1) if extent == "plate" else (bbox.top, bbox.bottom)
    return ArchROI(top=top, bottom=bottom, left=left, right=right, crop_ratio=crop_ratio)


def extract_roi(mask, roi: ArchROI) -> np.ndarray:
    mask = np.asarray(mask)
    h, w = mask.shape
    if not (0 <= roi.top <= roi.bottom < h and 0 <= roi.left <= roi.right < w):
        raise ValueError(f"{roi} lies outside a {w}x{h} mask")
    return mask[roi.top : roi.bottom + 1, roi.left : roi.right + 1]
