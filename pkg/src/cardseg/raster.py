"""8-bit rasters, PGM/PNG I/O, cropping, nearest-neighbour rotation, box drawing.

Pixel arrays are numpy ``uint8`` of shape ``(height, width)``, row-major, and
are frozen (``writeable=False``) once wrapped in an image type.
"""
from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .fixedtrig import Q, sin_cos


class ImageFormatError(ValueError):
    """Malformed or truncated image file."""

    def __init__(self, message: str, offset: int | None = None):
        if offset is not None:
            message = f"{message} (at byte offset {offset})"
        super().__init__(message)
        self.offset = offset


class BoundsError(ValueError):
    """A rectangle does not fit inside its host image."""


def _freeze(pixels) -> np.ndarray:
    src = np.asarray(pixels)
    if src.dtype != np.uint8 and src.size and (src.min() < 0 or src.max() > 255):
        raise ValueError("intensities must lie in [0, 255]")
    arr = np.array(src, dtype=np.uint8, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Rect:
    x: int
    y: int
    w: int
    h: int

    def __post_init__(self):
        if self.w < 1 or self.h < 1:
            raise ValueError(f"degenerate rect {self}")

    @property
    def x1(self) -> int:
        return self.x + self.w

    @property
    def y1(self) -> int:
        return self.y + self.h

    @property
    def area(self) -> int:
        return self.w * self.h

    def fits(self, width: int, height: int) -> bool:
        return self.x >= 0 and self.y >= 0 and self.x1 <= width and self.y1 <= height

    def offset(self, dx: int, dy: int) -> Rect:
        return Rect(self.x + dx, self.y + dy, self.w, self.h)

    def contains(self, other: Rect) -> bool:
        return (self.x <= other.x and self.y <= other.y
                and other.x1 <= self.x1 and other.y1 <= self.y1)

    def as_list(self) -> list[int]:
        return [self.x, self.y, self.w, self.h]


@dataclass(frozen=True, eq=False)
class GrayImage:
    pixels: np.ndarray

    def __post_init__(self):
        arr = self.pixels
        if not (isinstance(arr, np.ndarray) and arr.dtype == np.uint8 and not arr.flags.writeable):
            arr = _freeze(arr)
            object.__setattr__(self, "pixels", arr)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"image must be a non-empty 2-D raster, got shape {arr.shape}")

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    def __eq__(self, other):
        return (type(other) is type(self)
                and np.array_equal(self.pixels, other.pixels))


@dataclass(frozen=True, eq=False)
class BinaryImage(GrayImage):
    """Ink = 1, background = 0."""

    def __post_init__(self):
        super().__post_init__()
        if self.pixels.size and self.pixels.max() > 1:
            raise ValueError("binary image values must be 0 or 1")

    @property
    def ink_count(self) -> int:
        return int(np.count_nonzero(self.pixels))


def to_grayscale(r, g, b):
    """Integer luma ``(77 r + 150 g + 29 b) >> 8``.

    Works elementwise on numpy arrays as well as on plain ints.
    """
    if isinstance(r, np.ndarray):
        r, g, b = (np.asarray(c, dtype=np.int32) for c in (r, g, b))
        return ((77 * r + 150 * g + 29 * b) >> 8).astype(np.uint8)
    return (77 * int(r) + 150 * int(g) + 29 * int(b)) >> 8


# ---------------------------------------------------------------- PGM / PNG

def _pgm_tokens(data: bytes, count: int, pos: int):
    """Read ``count`` whitespace-separated header tokens, skipping comments."""
    tokens = []
    n = len(data)
    while len(tokens) < count:
        while pos < n and (data[pos] in b" \t\r\n" or data[pos] == ord("#")):
            if data[pos] == ord("#"):
                while pos < n and data[pos] not in b"\r\n":
                    pos += 1
            else:
                pos += 1
        if pos >= n:
            raise ImageFormatError("truncated PGM header", pos)
        start = pos
        while pos < n and data[pos] not in b" \t\r\n#":
            pos += 1
        tok = data[start:pos]
        if not tok.isdigit():
            raise ImageFormatError(f"bad PGM header token {tok!r}", start)
        tokens.append(int(tok))
    return tokens, pos


def _rescale(values: np.ndarray, maxval: int) -> np.ndarray:
    if maxval == 255:
        return values.astype(np.uint8)
    v = values.astype(np.int64)
    return ((v * 255 + maxval // 2) // maxval).astype(np.uint8)


def decode_pgm(data: bytes) -> GrayImage:
    if len(data) < 2 or data[:1] != b"P" or data[1:2] not in (b"2", b"5"):
        raise ImageFormatError("not a P2/P5 PGM file", 0)
    binary = data[1:2] == b"5"
    (w, h, maxval), pos = _pgm_tokens(data, 3, 2)
    if w < 1 or h < 1:
        raise ImageFormatError(f"bad PGM dimensions {w}x{h}", 2)
    if not 1 <= maxval <= 65535:
        raise ImageFormatError(f"bad PGM maxval {maxval}", pos)
    count = w * h
    if binary:
        if pos >= len(data) or data[pos] not in b" \t\r\n":
            raise ImageFormatError("missing whitespace after PGM header", pos)
        pos += 1
        itemsize = 1 if maxval < 256 else 2
        need = count * itemsize
        if len(data) - pos < need:
            raise ImageFormatError(
                f"truncated pixel data: need {need} bytes, have {len(data) - pos}", len(data))
        dtype = np.uint8 if itemsize == 1 else np.dtype(">u2")
        values = np.frombuffer(data, dtype=dtype, count=count, offset=pos)
    else:
        fields = data[pos:].split()
        if len(fields) < count:
            raise ImageFormatError(f"truncated pixel data: need {count} samples, have {len(fields)}",
                                   len(data))
        try:
            values = np.array([int(f) for f in fields[:count]], dtype=np.int64)
        except ValueError:
            raise ImageFormatError("non-numeric sample in P2 data", pos) from None
    if values.max(initial=0) > maxval:
        raise ImageFormatError(f"sample exceeds maxval {maxval}", pos)
    return GrayImage(_rescale(values, maxval).reshape(h, w))


def encode_pgm(img: GrayImage) -> bytes:
    """P5, maxval 255. Binary images are written ink=0, background=255."""
    pixels = img.pixels
    if isinstance(img, BinaryImage):
        pixels = np.where(pixels > 0, 0, 255).astype(np.uint8)
    header = f"P5\n{img.width} {img.height}\n255\n".encode("ascii")
    return header + np.ascontiguousarray(pixels).tobytes()


def _load_png(path) -> GrayImage:
    from PIL import Image

    with Image.open(path) as im:
        im.load()
        mode = im.mode
        if mode == "P":
            im = im.convert("RGBA" if "transparency" in im.info else "RGB")
            mode = im.mode
        if mode == "L":
            return GrayImage(np.asarray(im, dtype=np.uint8))
        if mode == "LA":
            return GrayImage(np.asarray(im, dtype=np.uint8)[:, :, 0])
        if mode in ("RGB", "RGBA"):
            arr = np.asarray(im, dtype=np.uint8)
            return GrayImage(to_grayscale(arr[:, :, 0], arr[:, :, 1], arr[:, :, 2]))
        if mode == "1":
            return GrayImage(np.asarray(im.convert("L"), dtype=np.uint8))
        if mode in ("I;16", "I;16B", "I"):
            arr = np.asarray(im, dtype=np.int64)
            return GrayImage(_rescale(np.clip(arr, 0, 65535), 65535))
    raise ImageFormatError(f"unsupported PNG mode {mode}", 0)


def load_image(path) -> GrayImage:
    """Read a PGM (P2/P5) or PNG file as an 8-bit gray raster."""
    with open(path, "rb") as f:
        data = f.read()
    if data[:8] == b"\x89PNG\r\n\x1a\n":
        return _load_png(path)
    return decode_pgm(data)


def save_image(img: GrayImage, path, format: str | None = None) -> None:
    if format is None:
        format = "png" if os.fspath(path).lower().endswith(".png") else "pgm"
    if format == "pgm":
        with open(path, "wb") as f:
            f.write(encode_pgm(img))
    elif format == "png":
        from PIL import Image

        pixels = img.pixels
        if isinstance(img, BinaryImage):
            pixels = np.where(pixels > 0, 0, 255).astype(np.uint8)
        Image.fromarray(np.ascontiguousarray(pixels), mode="L").save(path, format="PNG")
    else:
        raise ValueError(f"unknown image format {format!r}")


# ------------------------------------------------------------ geometry ops

def crop(img: GrayImage, r: Rect) -> GrayImage:
    if not r.fits(img.width, img.height):
        raise BoundsError(f"{r} outside {img.width}x{img.height} image")
    return type(img)(img.pixels[r.y:r.y1, r.x:r.x1])


def rotated_size(width: int, height: int, centideg: int) -> tuple[int, int]:
    """Canvas that holds a width x height raster rotated by ``centideg``.

    Each side keeps the parity of the source side so both centres coincide
    on the integer grid.
    """
    s, c = sin_cos(centideg)
    s, c = abs(s), abs(c)
    one = 1 << Q
    w = (width * c + height * s + one - 1) >> Q
    h = (width * s + height * c + one - 1) >> Q
    w += (w - width) & 1
    h += (h - height) & 1
    return max(w, 1), max(h, 1)


def inverse_map(src_w: int, src_h: int, centideg: int, out_w: int, out_h: int):
    """Source (row, col) index arrays for each destination pixel.

    Visual counter-clockwise rotation by ``centideg`` about the raster
    centres, sampled by nearest neighbour. Coordinates are doubled so that
    half-pixel centres stay integral. Out-of-source entries are -1.
    """
    s, c = sin_cos(centideg)
    dx2 = 2 * np.arange(out_w, dtype=np.int64) - (out_w - 1)
    dy2 = 2 * np.arange(out_h, dtype=np.int64) - (out_h - 1)
    # sx = cx + dx*cos - dy*sin ; sy = cy + dx*sin + dy*cos  (all doubled, Q16)
    sx = (dx2 * c)[None, :] - (dy2 * s)[:, None] + ((src_w - 1) << Q)
    sy = (dx2 * s)[None, :] + (dy2 * c)[:, None] + ((src_h - 1) << Q)
    half = 1 << Q
    col = (sx + half) >> (Q + 1)
    row = (sy + half) >> (Q + 1)
    outside = (col < 0) | (col >= src_w) | (row < 0) | (row >= src_h)
    col[outside] = -1
    row[outside] = -1
    return row, col


def rotate_array(arr: np.ndarray, centideg: int, fill, out_shape=None) -> np.ndarray:
    h, w = arr.shape
    if out_shape is None:
        ow, oh = rotated_size(w, h, centideg)
    else:
        oh, ow = out_shape
    if centideg == 0 and (oh, ow) == (h, w):
        return arr.copy()
    row, col = inverse_map(w, h, centideg, ow, oh)
    valid = row >= 0
    out = np.full((oh, ow), fill, dtype=arr.dtype)
    out[valid] = arr[row[valid], col[valid]]
    return out


def rotate_nearest(img: GrayImage, angle: int, fill: int = 255) -> GrayImage:
    """Rotate counter-clockwise by ``angle`` centidegrees onto a canvas large
    enough for the whole source. Uncovered pixels get ``fill``."""
    return type(img)(rotate_array(img.pixels, int(angle), fill))


def annotate_boxes(img: GrayImage, boxes, stroke: int) -> GrayImage:
    out = np.array(img.pixels, copy=True)
    for b in boxes:
        if not b.fits(img.width, img.height):
            raise BoundsError(f"{b} outside {img.width}x{img.height} image")
        out[b.y, b.x:b.x1] = stroke
        out[b.y1 - 1, b.x:b.x1] = stroke
        out[b.y:b.y1, b.x] = stroke
        out[b.y:b.y1, b.x1 - 1] = stroke
    return type(img)(out)


def ink_bbox(mask: np.ndarray) -> Rect | None:
    """Tight box around the nonzero entries of a 2-D array."""
    rows = np.flatnonzero(mask.any(axis=1))
    if rows.size == 0:
        return None
    cols = np.flatnonzero(mask.any(axis=0))
    return Rect(int(cols[0]), int(rows[0]),
                int(cols[-1] - cols[0] + 1), int(rows[-1] - rows[0] + 1))
