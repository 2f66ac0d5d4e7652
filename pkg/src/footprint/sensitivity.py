"""Threshold sweeps: how far the index drifts when the threshold moves.

The arch ROI is located once, at the nominal threshold, and held fixed for
every sweep point, so the reported error reflects reclassified pixels only
and not a shifting crop.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .errors import AllPointsUndefined, EmptyFootprint
from .geometry import DEFAULT_CROP_RATIO, ArchROI, crop_arch_roi, detect_foot_bbox, extract_roi
from .imaging import _as_gray, binarize
from .mbi import DEFAULT_THRESHOLD

DEFAULT_TOLERANCE_PCT = 15.0
DEFAULT_STEPS = 31
CSV_FIELDS = ("threshold", "tolerance_pct", "mbi", "error_pct", "b1", "b0")


@dataclass(frozen=True)
class SweepPoint:
    threshold: float
    tolerance_pct: float
    b1: int
    b0: int
    mbi: float | None
    error_pct: float | None

    @property
    def defined(self) -> bool:
        return self.error_pct is not None


@dataclass(frozen=True)
class SweepReport:
    nominal_threshold: float
    nominal_mbi: float | None
    roi: ArchROI
    points: list[SweepPoint]
    warnings: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "nominal_threshold": self.nominal_threshold,
            "nominal_mbi": self.nominal_mbi,
            "roi": {
                "top": self.roi.top,
                "bottom": self.roi.bottom,
                "left": self.roi.left,
                "right": self.roi.right,
                "crop_ratio": self.roi.crop_ratio,
            },
            "points": [
                {name: getattr(p, name) for name in CSV_FIELDS} for p in self.points
            ],
            "warnings": list(self.warnings),
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_FIELDS)
        for p in self.points:
            writer.writerow(["" if getattr(p, f) is None else getattr(p, f) for f in CSV_FIELDS])
        return buf.getvalue()


def sweep_thresholds(nominal: float, tolerance_pct: float, steps: int) -> list[float]:
    """Evenly spaced relative offsets around ``nominal``, clamped to [0, 255].

    The nominal threshold is always included, and duplicates introduced by
    clamping or a zero tolerance are dropped.
    """
    offsets = np.linspace(-tolerance_pct, tolerance_pct, steps) if steps > 1 else np.zeros(1)
    values = {float(nominal)}
    for pct in offsets:
        t = nominal * (1 + round(float(pct), 9) / 100)
        values.add(min(255.0, max(0.0, round(t, 9))))
    return sorted(values)


def threshold_sweep(
    gray,
    nominal: float = DEFAULT_THRESHOLD,
    tolerance_pct: float = DEFAULT_TOLERANCE_PCT,
    steps: int = DEFAULT_STEPS,
    *,
    crop_ratio: float = DEFAULT_CROP_RATIO,
    axis: str = "vertical",
    roi_extent: str = "plate",
) -> SweepReport:
    """Index and percentage error at thresholds spanning ``nominal * (1 +/- tolerance_pct/100)``.

    Points whose arch band has no contact pixels are kept with ``mbi`` and
    ``error_pct`` set to None. If the nominal threshold finds no footprint at
    all, the whole frame stands in for the ROI and a warning is recorded.
    """
    if not 1 <= nominal <= 254:
        raise ValueError(f"nominal threshold must lie in [1, 254], got {nominal}")
    if tolerance_pct < 0:
        raise ValueError(f"tolerance_pct must be >= 0, got {tolerance_pct}")
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")

    gray = _as_gray(gray)
    height, width = gray.shape
    warnings = []
    try:
        bbox = detect_foot_bbox(binarize(gray, nominal))
        roi = crop_arch_roi((width, height), bbox, crop_ratio, axis, roi_extent)
    except EmptyFootprint:
        roi = ArchROI(top=0, bottom=height - 1, left=0, right=width - 1, crop_ratio=crop_ratio)
        warnings.append(
            f"no contact pixels at nominal threshold {nominal:g}; whole frame used as ROI"
        )

    region = extract_roi(gray, roi)
    raw = []
    for t in sweep_thresholds(nominal, tolerance_pct, steps):
        b1 = int(np.count_nonzero(region > t))
        b0 = region.size - b1
        raw.append((t, b1, b0, b1 / b0 if b0 else None))

    nominal_mbi = next(m for t, _, _, m in raw if t == nominal)
    if nominal_mbi is None:
        warnings.append("index undefined at nominal threshold; every point is undefined")
    elif nominal_mbi == 0:
        warnings.append("index is zero at nominal threshold; percentage error undefined elsewhere")
    undefined = sum(m is None for *_, m in raw)
    if undefined and nominal_mbi is not None:
        warnings.append(f"{undefined} sweep point(s) had no contact pixels in the arch band")

    points = []
    for t, b1, b0, m in raw:
        if m is None or nominal_mbi is None:
            err = None
        elif m == nominal_mbi:
            err = 0.0
        elif nominal_mbi == 0:
            err = None
        else:
            err = abs(m - nominal_mbi) / nominal_mbi * 100
        points.append(
            SweepPoint(
                threshold=t,
                tolerance_pct=round((t - nominal) / nominal * 100, 9),
                b1=b1,
                b0=b0,
                mbi=m,
                error_pct=err,
            )
        )
    return SweepReport(
        nominal_threshold=float(nominal),
        nominal_mbi=nominal_mbi,
        roi=roi,
        points=points,
        warnings=warnings,
    )


def max_error(report: SweepReport) -> float:
    errors = [p.error_pct for p in report.points if p.error_pct is not None]
    if not errors:
        raise AllPointsUndefined("no sweep point has a defined percentage error")
    return max(errors)


def corpus_max_error(reports) -> float:
    """Largest per-image maximum error across a set of sweeps, skipping undefined ones."""
    values = []
    for report in reports:
        try:
            values.append(max_error(report))
        except AllPointsUndefined:
            continue
    if not values:
        raise AllPointsUndefined("no report in the corpus has a defined point")
    return max(values)
