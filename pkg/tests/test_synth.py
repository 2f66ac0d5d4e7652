import json

import numpy as np
import pytest
from hypothesis import given, settings

from conftest import reference_footprint, templates
from footprint.errors import ZeroContactArea
from footprint.geometry import DEFAULT_CROP_RATIO, crop_arch_roi, detect_foot_bbox, extract_roi
from footprint.imaging import binarize, count_pixels
from footprint.synth import (
    FootTemplate,
    InvalidTemplate,
    analytic_counts,
    analytic_mbi,
    analytic_roi,
    contact_reach,
    generate,
    ramp_intensity,
)

BASE = dict(frame_width=300, frame_height=400, foot_left=100, foot_top=50,
            foot_width=100, foot_length=300)


def test_solid_rectangle_by_hand():
    t = FootTemplate(frame_width=8, frame_height=9, foot_left=2, foot_top=3, foot_width=3,
                     foot_length=5, contact_intensity=10, background_intensity=200)
    img = generate(t)
    assert img.dtype == np.uint8 and img.shape == (9, 8)
    assert (img == 10).sum() == 15
    assert (img[3:8, 2:5] == 10).all()


def test_full_notch_gives_two_blobs():
    t = FootTemplate(**BASE, arch_coverage=1.0)
    img = generate(t)
    # rows 150..249 are the middle third and carry no contact at all
    assert (img[150:250] == t.background_intensity).all()
    assert (img[149, 100:200] == t.contact_intensity).all()
    assert (img[250, 100:200] == t.contact_intensity).all()


@settings(max_examples=60, deadline=None)
@given(templates(max_frame=24, ramp=True))
def test_matches_per_pixel_reference(t):
    assert np.array_equal(generate(t), reference_footprint(t))


@given(templates())
def test_deterministic(t):
    assert generate(t).tobytes() == generate(t).tobytes()


class TestAnalyticMbi:
    def test_plate_extent_by_hand(self):
        # band 100 rows; b0 = 100*100, b1 = 100*300 - b0
        assert analytic_mbi(FootTemplate(**BASE)) == 2.0

    def test_foot_extent_solid(self):
        assert analytic_mbi(FootTemplate(**BASE), "foot") == 0.0

    def test_half_notch_by_hand(self):
        # notch 50 -> b0 = 100*50 = 5000, b1 = 30000 - 5000
        assert analytic_mbi(FootTemplate(**BASE, arch_coverage=0.5)) == 5.0

    def test_full_notch(self):
        with pytest.raises(ZeroContactArea):
            analytic_mbi(FootTemplate(**BASE, arch_coverage=1.0))

    def test_requires_hard_edges(self):
        with pytest.raises(ValueError):
            analytic_mbi(FootTemplate(**BASE, edge_ramp=3))

    @given(templates())
    def test_strictly_increasing_in_coverage(self, t):
        values = []
        for a in np.linspace(0, 1, 11):
            probe = FootTemplate(**{**t.to_dict(), "arch_coverage": float(a)})
            if probe.notch_width >= probe.foot_width:
                break
            values.append((probe.notch_width, analytic_mbi(probe)))
        for (n1, m1), (n2, m2) in zip(values, values[1:]):
            assert (m2 > m1) if n2 > n1 else (m2 == m1)


class TestRamp:
    def test_ramp_steps_by_hand(self):
        # span 190 over 4 steps of 1/5
        t = FootTemplate(**BASE, edge_ramp=4)
        assert [ramp_intensity(t, d) for d in range(6)] == [40, 78, 116, 154, 192, 230]

    def test_reach(self):
        t = FootTemplate(**BASE, edge_ramp=4)
        assert contact_reach(t, 39) == -1
        assert contact_reach(t, 40) == 0
        assert contact_reach(t, 140) == 2
        assert contact_reach(t, 154) == 3
        assert contact_reach(t, 229) == 4
        assert contact_reach(t, 230) > t.frame_width

    @settings(max_examples=200, deadline=None)
    @given(templates(max_frame=50, ramp=True))
    def test_counts_match_rendered_image(self, t):
        gray = generate(t)
        for threshold in (t.contact_intensity, (t.contact_intensity + t.background_intensity) / 2,
                          t.background_intensity - 1):
            mask = binarize(gray, threshold)
            h, w = gray.shape
            roi = crop_arch_roi((w, h), detect_foot_bbox(mask), DEFAULT_CROP_RATIO, "vertical")
            assert analytic_roi(t, threshold) == roi
            assert analytic_counts(t, threshold, roi) == count_pixels(extract_roi(mask, roi))


class TestTemplateValidation:
    @pytest.mark.parametrize(
        "override, field",
        [
            ({"foot_left": 250}, "foot_left"),
            ({"foot_top": 200}, "foot_top"),
            ({"foot_length": 2}, "foot_length"),
            ({"arch_coverage": 1.5}, "arch_coverage"),
            ({"edge_ramp": -1}, "edge_ramp"),
            ({"contact_intensity": 240}, "contact_intensity"),
            ({"background_intensity": 300}, "background_intensity"),
            ({"foot_width": 2.5}, "foot_width"),
        ],
    )
    def test_field_diagnostics(self, override, field):
        with pytest.raises(InvalidTemplate, match=field):
            FootTemplate(**{**BASE, **override})

    def test_json_round_trip(self):
        t = FootTemplate(**BASE, arch_coverage=0.25, edge_ramp=3)
        assert FootTemplate.from_json(json.dumps(t.to_dict())) == t

    def test_malformed_json(self):
        with pytest.raises(InvalidTemplate):
            FootTemplate.from_json("{not json")

    def test_unknown_and_missing_fields(self):
        with pytest.raises(InvalidTemplate, match="shoe_size"):
            FootTemplate.from_dict({**BASE, "shoe_size": 9})
        with pytest.raises(InvalidTemplate):
            FootTemplate.from_dict({"frame_width": 10})
        with pytest.raises(InvalidTemplate):
            FootTemplate.from_dict([1, 2])
