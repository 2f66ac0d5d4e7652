from collections import deque

import numpy as np
import pytest
from hypothesis import strategies as st

from footprint.synth import FootTemplate


def flood_fill_components(mask):
    """Count 8-connected components of 0-bits with a plain BFS."""
    h, w = len(mask), len(mask[0])
    seen = [[False] * w for _ in range(h)]
    count = 0
    for y in range(h):
        for x in range(w):
            if mask[y][x] != 0 or seen[y][x]:
                continue
            count += 1
            seen[y][x] = True
            queue = deque([(y, x)])
            while queue:
                cy, cx = queue.popleft()
                for dy in (-1, 0, 1):
                    for dx in (-1, 0, 1):
                        ny, nx = cy + dy, cx + dx
                        if 0 <= ny < h and 0 <= nx < w and not seen[ny][nx] and mask[ny][nx] == 0:
                            seen[ny][nx] = True
                            queue.append((ny, nx))
    return count


def reference_footprint(t: FootTemplate):
    """Per-pixel rendering of a template, written straight from the template rules.

    Contact is the foot rectangle minus a left notch over the middle third of
    its rows; background pixels within ``edge_ramp`` chessboard steps of
    contact get ``contact + round_half_up(span * d / (r + 1))``.
    """
    band = int(t.foot_length / 3 + 0.5)
    arch_top = t.foot_top + (t.foot_length - band) // 2
    arch_bottom = arch_top + band - 1
    notch = int(t.arch_coverage * t.foot_width + 0.5)

    def is_contact(y, x):
        if not (t.foot_top <= y < t.foot_top + t.foot_length):
            return False
        if not (t.foot_left <= x < t.foot_left + t.foot_width):
            return False
        return not (arch_top <= y <= arch_bottom and x < t.foot_left + notch)

    contact = [(y, x) for y in range(t.frame_height) for x in range(t.frame_width) if is_contact(y, x)]
    span = t.background_intensity - t.contact_intensity
    out = np.empty((t.frame_height, t.frame_width), dtype=np.uint8)
    for y in range(t.frame_height):
        for x in range(t.frame_width):
            if is_contact(y, x):
                out[y, x] = t.contact_intensity
                continue
            d = min((max(abs(y - cy), abs(x - cx)) for cy, cx in contact), default=10**9)
            if d <= t.edge_ramp:
                out[y, x] = t.contact_intensity + int(span * d / (t.edge_ramp + 1) + 0.5)
            else:
                out[y, x] = t.background_intensity
    return out


@st.composite
def templates(draw, max_frame=60, ramp=False, coverage=None):
    frame_w = draw(st.integers(3, max_frame))
    frame_h = draw(st.integers(3, max_frame))
    foot_w = draw(st.integers(1, frame_w))
    foot_l = draw(st.integers(3, frame_h))
    return FootTemplate(
        frame_width=frame_w,
        frame_height=frame_h,
        foot_left=draw(st.integers(0, frame_w - foot_w)),
        foot_top=draw(st.integers(0, frame_h - foot_l)),
        foot_width=foot_w,
        foot_length=foot_l,
        arch_coverage=draw(st.floats(0, 1)) if coverage is None else coverage,
        edge_ramp=draw(st.integers(0, 6)) if ramp else 0,
        contact_intensity=draw(st.integers(0, 120)),
        background_intensity=draw(st.integers(160, 255)),
    )


def random_template(rng: np.random.Generator, ramp: int = 0, max_coverage: float = 1.0) -> FootTemplate:
    frame_w = int(rng.integers(20, 200))
    frame_h = int(rng.integers(20, 200))
    foot_w = int(rng.integers(1, frame_w + 1))
    foot_l = int(rng.integers(3, frame_h + 1))
    return FootTemplate(
        frame_width=frame_w,
        frame_height=frame_h,
        foot_left=int(rng.integers(0, frame_w - foot_w + 1)),
        foot_top=int(rng.integers(0, frame_h - foot_l + 1)),
        foot_width=foot_w,
        foot_length=foot_l,
        arch_coverage=float(rng.uniform(0, max_coverage)),
        edge_ramp=ramp,
        contact_intensity=int(rng.integers(0, 130)),
        background_intensity=int(rng.integers(150, 256)),
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20260415)


# acceptance summary: one line per criterion, printed after the run
ACCEPTANCE_RESULTS = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_RESULTS):
        status, title = ACCEPTANCE_RESULTS[number]
        terminalreporter.write_line(f"criterion {number:>2}: {status}  {title}")
