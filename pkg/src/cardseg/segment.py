"""Line segmentation by horizontal histogram, character segmentation by
vertical histogram."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .raster import BinaryImage, Rect, ink_bbox


@dataclass(frozen=True)
class SegmentConfig:
    line_thresh_permille: int = 20
    min_band_frac: int = 400
    merge_gap_frac: int = 200

    def __post_init__(self):
        if not 0 <= self.line_thresh_permille < 1000:
            raise ValueError(f"line_thresh_permille must be in [0, 1000), got {self.line_thresh_permille}")
        for name in ("min_band_frac", "merge_gap_frac"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")


@dataclass(frozen=True)
class LineBand:
    top: int
    bottom: int  # inclusive
    bbox: Rect | None = None

    @property
    def height(self) -> int:
        return self.bottom - self.top + 1


@dataclass(frozen=True)
class CharBox:
    bbox: Rect


def horizontal_histogram(bin: BinaryImage) -> np.ndarray:
    return bin.pixels.sum(axis=1, dtype=np.int64)


def vertical_histogram(bin: BinaryImage, band: LineBand) -> np.ndarray:
    if not 0 <= band.top <= band.bottom < bin.height:
        raise ValueError(f"band rows {band.top}..{band.bottom} outside a {bin.height}-row image")
    return bin.pixels[band.top:band.bottom + 1].sum(axis=0, dtype=np.int64)


def runs(flags: np.ndarray) -> list[tuple[int, int]]:
    """Maximal runs of True as inclusive (start, end) pairs."""
    f = np.concatenate(([False], np.asarray(flags, dtype=bool), [False]))
    edges = np.flatnonzero(f[1:] != f[:-1])
    return [(int(a), int(b) - 1) for a, b in zip(edges[::2], edges[1::2])]


def _lower_median(values) -> int:
    v = sorted(values)
    return v[(len(v) - 1) // 2]


def segment_lines(hist, width: int, cfg: SegmentConfig = SegmentConfig()) -> list[LineBand]:
    """Candidate runs above ``width * line_thresh_permille / 1000``, merge
    across gaps small relative to the median band height, drop bands short
    relative to the (recomputed) median.

    Surviving bands are then widened over adjacent rows that still hold
    some ink, stopping at empty rows or the next band, so ascenders,
    descenders and dots are not clipped off.
    """
    hist = np.asarray(hist, dtype=np.int64)
    thresh = width * cfg.line_thresh_permille // 1000
    bands = runs(hist > thresh)
    if not bands:
        return []

    med = _lower_median(b - a + 1 for a, b in bands)
    merged = [bands[0]]
    for a, b in bands[1:]:
        pa, pb = merged[-1]
        gap = a - pb - 1
        if gap * 1000 < med * cfg.merge_gap_frac:
            merged[-1] = (pa, b)
        else:
            merged.append((a, b))

    med = _lower_median(b - a + 1 for a, b in merged)
    kept = [(a, b) for a, b in merged if (b - a + 1) * 1000 >= med * cfg.min_band_frac]

    out = []
    for i, (a, b) in enumerate(kept):
        lo = out[-1].bottom + 1 if out else 0  # never re-claim a grown row
        hi = kept[i + 1][0] - 1 if i + 1 < len(kept) else len(hist) - 1
        while a - 1 >= lo and hist[a - 1] > 0:
            a -= 1
        while b + 1 <= hi and hist[b + 1] > 0:
            b += 1
        out.append(LineBand(a, b))
    return out


def trim_band(bin: BinaryImage, band: LineBand) -> LineBand:
    """Attach the tight ink box (region coordinates) of the band's rows."""
    box = ink_bbox(bin.pixels[band.top:band.bottom + 1])
    return LineBand(band.top, band.bottom, box.offset(0, band.top) if box else None)


def segment_chars(bin: BinaryImage, band: LineBand) -> list[CharBox]:
    """One box per maximal run of inked columns, trimmed to its ink rows."""
    counts = vertical_histogram(bin, band)
    rows = bin.pixels[band.top:band.bottom + 1]
    out = []
    for c0, c1 in runs(counts > 0):
        sub = rows[:, c0:c1 + 1].any(axis=1)
        r = np.flatnonzero(sub)
        out.append(CharBox(Rect(c0, band.top + int(r[0]), c1 - c0 + 1, int(r[-1] - r[0] + 1))))
    return out


def segment_region(bin: BinaryImage, cfg: SegmentConfig = SegmentConfig()):
    """Lines (with tight boxes) and their characters for one region."""
    lines = []
    for band in segment_lines(horizontal_histogram(bin), bin.width, cfg):
        band = trim_band(bin, band)
        if band.bbox is None:
            continue
        lines.append((band, segment_chars(bin, band)))
    return lines
