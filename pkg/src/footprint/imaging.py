"""Raster decoding and the grayscale -> threshold -> binary mask pipeline.

Images are plain numpy arrays, row-major:

* color image: ``(height, width, 3)`` uint8
* gray image:  ``(height, width)`` uint8
* binary mask: ``(height, width)`` uint8 holding only 0 (contact, dark)
  and 1 (non-contact, bright)
"""

from __future__ import annotations

import io
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import CorruptFile, UnsupportedFormat

PNG_SIGNATURE = b"\x89PNG\r\n\x1a\n"
JPEG_SIGNATURE = b"\xff\xd8\xff"

# ITU-R BT.601 luma weights, scaled by 1000 so rounding stays in integers.
LUMA_WEIGHTS = (299, 587, 114)


@dataclass(frozen=True)
class PixelCounts:
    """Pixel tally of a mask region: ``b1`` non-contact, ``b0`` contact."""

    b1: int
    b0: int

    def __post_init__(self):
        if self.b1 < 0 or self.b0 < 0:
            raise ValueError(f"pixel counts must be non-negative, got b1={self.b1}, b0={self.b0}")

    @property
    def total(self) -> int:
        return self.b1 + self.b0


def _as_color(img) -> np.ndarray:
    arr = np.asarray(img)
    if arr.ndim != 3 or arr.shape[2] != 3 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"color image must have shape (H, W, 3), got {arr.shape}")
    if arr.dtype != np.uint8:
        if arr.size and (arr.min() < 0 or arr.max() > 255):
            raise ValueError("color channels must lie in [0, 255]")
        arr = arr.astype(np.uint8)
    return arr


def _as_gray(gray) -> np.ndarray:
    arr = np.asarray(gray)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"gray image must be 2-D and non-empty, got shape {arr.shape}")
    if arr.dtype != np.uint8:
        if arr.min() < 0 or arr.max() > 255:
            raise ValueError("intensities must lie in [0, 255]")
        arr = arr.astype(np.uint8)
    return arr


def to_grayscale(img) -> np.ndarray:
    """Luminance ``0.299 r + 0.587 g + 0.114 b`` rounded half up.

    Computed in integer arithmetic, so neutral pixels ``(v, v, v)`` map to
    exactly ``v`` and no float rounding can move a pixel across the threshold.
    """
    arr = _as_color(img).astype(np.uint32)
    wr, wg, wb = LUMA_WEIGHTS
    acc = arr[..., 0] * wr + arr[..., 1] * wg + arr[..., 2] * wb
    return ((acc + 500) // 1000).astype(np.uint8)


def binarize(gray, threshold: float) -> np.ndarray:
    """Return 1 where intensity is strictly above ``threshold``, else 0.

    A pixel sitting exactly on the threshold counts as contact.
    """
    if not 0 <= threshold <= 255:
        raise ValueError(f"threshold must lie in [0, 255], got {threshold}")
    return (_as_gray(gray) > threshold).astype(np.uint8)


def count_pixels(mask) -> PixelCounts:
    mask = np.asarray(mask)
    b1 = int(np.count_nonzero(mask))
    return PixelCounts(b1=b1, b0=int(mask.size) - b1)


def _png_bit_depth(data: bytes) -> int:
    # IHDR is always the first chunk: length(4) type(4) width(4) height(4) depth(1)
    if len(data) < 25 or data[12:16] != b"IHDR":
        raise CorruptFile("PNG header is truncated or missing IHDR")
    return data[24]


def _jpeg_precision(data: bytes) -> int | None:
    """Sample precision from the first SOF marker, or None if none is found."""
    pos = 2
    n = len(data)
    while pos + 4 <= n:
        if data[pos] != 0xFF:
            return None
        marker = data[pos + 1]
        if marker == 0xFF:
            pos += 1
            continue
        if marker in (0xD8, 0x01) or 0xD0 <= marker <= 0xD7:
            pos += 2
            continue
        (length,) = struct.unpack(">H", data[pos + 2 : pos + 4])
        if 0xC0 <= marker <= 0xCF and marker not in (0xC4, 0xC8, 0xCC):
            if pos + 4 < n:
                return data[pos + 4]
            return None
        if marker == 0xDA:
            return None
        pos += 2 + length
    return None


def decode_image(data: bytes) -> np.ndarray:
    """Decode PNG or JPEG bytes into an ``(H, W, 3)`` uint8 array.

    Grayscale and palette inputs are expanded to RGB; alpha is dropped.
    Anything deeper than 8 bits per channel is rejected rather than rescaled,
    since the binarization threshold is only meaningful on a 0-255 scale.
    """
    if data.startswith(PNG_SIGNATURE):
        depth = _png_bit_depth(data)
        if depth > 8:
            raise UnsupportedFormat(f"PNG with {depth}-bit channels; only 8-bit input is accepted")
    elif data.startswith(JPEG_SIGNATURE):
        precision = _jpeg_precision(data)
        if precision is not None and precision > 8:
            raise UnsupportedFormat(f"JPEG with {precision}-bit samples; only 8-bit input is accepted")
    else:
        raise UnsupportedFormat("input is neither PNG nor JPEG")

    try:
        with Image.open(io.BytesIO(data)) as im:
            im.load()
            if im.mode in ("I", "I;16", "I;16B", "I;16L", "F"):
                raise UnsupportedFormat(f"image mode {im.mode!r} is not 8-bit")
            if im.mode != "RGB":
                im = im.convert("RGB")
            arr = np.asarray(im, dtype=np.uint8)
    except UnsupportedFormat:
        raise
    except (UnidentifiedImageError, OSError, SyntaxError, ValueError, Image.DecompressionBombError) as exc:
        raise CorruptFile(f"decode failed: {exc}") from exc

    if arr.ndim != 3 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise CorruptFile(f"decoder returned an empty raster of shape {arr.shape}")
    return arr


def load_image(path) -> np.ndarray:
    """Read a file and decode it; IO failures surface as :class:`CorruptFile`."""
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise CorruptFile(f"cannot read {path}: {exc.strerror or exc}") from exc
    return decode_image(data)


def encode_png(gray) -> bytes:
    """Encode a gray image as an 8-bit grayscale PNG."""
    buf = io.BytesIO()
    Image.fromarray(_as_gray(gray)).save(buf, format="PNG")
    return buf.getvalue()
