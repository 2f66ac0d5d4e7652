"""Synthetic rectangular footprints with closed-form pixel counts.

A template is a dark rectangle on a bright frame. A medial notch of width
``round(arch_coverage * foot_width)`` is cut from the left edge over exactly
the middle third of the foot's rows, which is the same band the arch crop
selects at ratio 1/3. With ``edge_ramp = r > 0`` the background brightens
linearly over the ``r`` pixels nearest the contact area (chessboard
distance), so a threshold shift reclassifies whole distance rings at once
and the counts stay computable in closed form.

All closed forms assume a vertical foot axis (length runs down the rows).
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import ZeroContactArea
from .geometry import DEFAULT_CROP_RATIO, EXTENTS, ArchROI, middle_band, round_half_up
from .imaging import PixelCounts


class InvalidTemplate(ValueError):
    """Template violates a field constraint; the message names the field."""


@dataclass(frozen=True)
class FootTemplate:
    frame_width: int
    frame_height: int
    foot_left: int
    foot_top: int
    foot_width: int
    foot_length: int
    arch_coverage: float = 0.0
    edge_ramp: int = 0
    contact_intensity: int = 40
    background_intensity: int = 230

    def __post_init__(self):
        for name in ("frame_width", "frame_height", "foot_left", "foot_top", "foot_width",
                     "foot_length", "edge_ramp", "contact_intensity", "background_intensity"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
                raise InvalidTemplate(f"{name}: expected an integer, got {value!r}")
        if isinstance(self.arch_coverage, bool) or not isinstance(self.arch_coverage, (int, float)):
            raise InvalidTemplate(f"arch_coverage: expected a number, got {self.arch_coverage!r}")
        if self.frame_width < 1 or self.frame_height < 1:
            raise InvalidTemplate("frame_width/frame_height: must be >= 1")
        if self.foot_width < 1:
            raise InvalidTemplate("foot_width: must be >= 1")
        if self.foot_length < 3:
            raise InvalidTemplate("foot_length: must be >= 3 so heel, arch and toe rows all exist")
        if self.foot_left < 0 or self.foot_left + self.foot_width > self.frame_width:
            raise InvalidTemplate("foot_left/foot_width: foot rectangle leaves the frame horizontally")
        if self.foot_top < 0 or self.foot_top + self.foot_length > self.frame_height:
            raise InvalidTemplate("foot_top/foot_length: foot rectangle leaves the frame vertically")
        if not 0.0 <= self.arch_coverage <= 1.0:
            raise InvalidTemplate(f"arch_coverage: must lie in [0, 1], got {self.arch_coverage}")
        if self.edge_ramp < 0:
            raise InvalidTemplate("edge_ramp: must be >= 0")
        for name in ("contact_intensity", "background_intensity"):
            if not 0 <= getattr(self, name) <= 255:
                raise InvalidTemplate(f"{name}: must lie in [0, 255]")
        if self.contact_intensity >= self.background_intensity:
            raise InvalidTemplate("contact_intensity: must be darker than background_intensity")

    @property
    def notch_width(self) -> int:
        return round_half_up(self.arch_coverage * self.foot_width)

    @property
    def arch_rows(self) -> tuple[int, int]:
        return middle_band(self.foot_top, self.foot_length, DEFAULT_CROP_RATIO)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, d) -> "FootTemplate":
        if not isinstance(d, dict):
            raise InvalidTemplate("template: expected a JSON object")
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - names
        if unknown:
            raise InvalidTemplate(f"{sorted(unknown)[0]}: unknown field")
        try:
            return cls(**d)
        except TypeError as exc:
            raise InvalidTemplate(f"template: {exc}") from exc

    @classmethod
    def from_json(cls, text: str) -> "FootTemplate":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InvalidTemplate(f"template: malformed JSON ({exc})") from exc
        return cls.from_dict(data)


def contact_rects(t: FootTemplate) -> list[tuple[int, int, int, int]]:
    """Contact area as inclusive ``(top, bottom, left, right)`` rectangles."""
    top, bottom = t.foot_top, t.foot_top + t.foot_length - 1
    left, right = t.foot_left, t.foot_left + t.foot_width - 1
    a0, a1 = t.arch_rows
    rects = [(top, a0 - 1, left, right), (a1 + 1, bottom, left, right)]
    if t.notch_width < t.foot_width:
        rects.append((a0, a1, left + t.notch_width, right))
    return rects


def ramp_intensity(t: FootTemplate, distance: int) -> int:
    """Intensity at chessboard distance ``distance`` from the contact area."""
    if distance <= 0:
        return t.contact_intensity
    r = t.edge_ramp
    if distance > r:
        return t.background_intensity
    span = t.background_intensity - t.contact_intensity
    # round half up of span * d / (r + 1), in integers
    return t.contact_intensity + (2 * span * distance + r + 1) // (2 * (r + 1))


def generate(t: FootTemplate) -> np.ndarray:
    contact = np.zeros((t.frame_height, t.frame_width), dtype=bool)
    for r0, r1, c0, c1 in contact_rects(t):
        contact[r0 : r1 + 1, c0 : c1 + 1] = True

    if t.edge_ramp == 0:
        return np.where(contact, t.contact_intensity, t.background_intensity).astype(np.uint8)

    dist = ndimage.distance_transform_cdt(~contact, metric="chessboard")
    lut = np.array([ramp_intensity(t, d) for d in range(t.edge_ramp + 2)], dtype=np.uint8)
    return lut[np.minimum(dist, t.edge_ramp + 1)]


def _arch_counts(t: FootTemplate, roi_extent: str) -> PixelCounts:
    band = round_half_up(t.foot_length / 3)
    b0 = band * (t.foot_width - t.notch_width)
    across = t.frame_width if roi_extent == "plate" else t.foot_width
    return PixelCounts(b1=band * across - b0, b0=b0)


def analytic_mbi(t: FootTemplate, roi_extent: str = "plate") -> float:
    """Exact index of a hard-edged template under the default pipeline."""
    if roi_extent not in EXTENTS:
        raise ValueError(f"roi_extent must be one of {EXTENTS}, got {roi_extent!r}")
    if t.edge_ramp != 0:
        raise ValueError("analytic_mbi needs hard edges (edge_ramp == 0); use analytic_counts")
    counts = _arch_counts(t, roi_extent)
    if counts.b0 == 0:
        raise ZeroContactArea("template notch removes every contact pixel from the arch band")
    return counts.b1 / counts.b0


def contact_reach(t: FootTemplate, threshold: float) -> int:
    """Largest distance ring binarized as contact at ``threshold``; -1 if none."""
    if threshold < t.contact_intensity:
        return -1
    if threshold >= t.background_intensity:
        return t.frame_width + t.frame_height
    k = 0
    while k < t.edge_ramp and ramp_intensity(t, k + 1) <= threshold:
        k += 1
    return k


def analytic_roi(
    t: FootTemplate,
    threshold: float,
    crop_ratio: float = DEFAULT_CROP_RATIO,
    roi_extent: str = "plate",
) -> ArchROI:
    """Arch ROI the pipeline finds when it binarizes ``generate(t)`` at ``threshold``."""
    k = contact_reach(t, threshold)
    if k < 0:
        raise ZeroContactArea("threshold is below the contact intensity")
    top = max(0, t.foot_top - k)
    bottom = min(t.frame_height - 1, t.foot_top + t.foot_length - 1 + k)
    left = max(0, t.foot_left - k)
    right = min(t.frame_width - 1, t.foot_left + t.foot_width - 1 + k)
    r0, r1 = middle_band(top, bottom - top + 1, crop_ratio)
    c0, c1 = (0, t.frame_width - 1) if roi_extent == "plate" else (left, right)
    return ArchROI(top=r0, bottom=r1, left=c0, right=c1, crop_ratio=crop_ratio)


def analytic_counts(t: FootTemplate, threshold: float, roi: ArchROI) -> PixelCounts:
    """Contact/non-contact counts inside ``roi`` of ``generate(t)`` binarized at ``threshold``.

    Works row by row on interval geometry: a rectangle dilated by ``k`` in
    the chessboard metric covers ``[c0 - k, c1 + k]`` on every row within
    ``k`` of its vertical span.
    """
    k = contact_reach(t, threshold)
    b0 = 0
    if k >= 0:
        rects = contact_rects(t)
        for y in range(roi.top, roi.bottom + 1):
            spans = sorted(
                (max(c0 - k, roi.left), min(c1 + k, roi.right))
                for r0, r1, c0, c1 in rects
                if r0 <= r1 and max(r0 - y, 0, y - r1) <= k
            )
            end = -1
            for lo, hi in spans:
                lo = max(lo, end + 1)
                if hi >= lo:
                    b0 += hi - lo + 1
                    end = hi
    return PixelCounts(b1=roi.area - b0, b0=b0)
