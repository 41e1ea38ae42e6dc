"""Per-region adaptive binarization with an integer midpoint threshold.

T = (min + max) // 2 + offset and a pixel is ink iff its intensity < T
(strictly, so ties go to background). Regions whose intensity span is below
``min_contrast`` come out blank.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .raster import BinaryImage, GrayImage


@dataclass(frozen=True)
class BinarizeConfig:
    offset: int = 0
    min_contrast: int = 12

    def __post_init__(self):
        if not 1 <= self.min_contrast <= 255:
            raise ValueError(f"min_contrast must be in [1, 255], got {self.min_contrast}")


def midpoint_threshold(gray: GrayImage, offset: int = 0) -> int:
    lo = int(gray.pixels.min())
    hi = int(gray.pixels.max())
    return (lo + hi) // 2 + offset


def binarize_region(gray: GrayImage, cfg: BinarizeConfig = BinarizeConfig()) -> BinaryImage:
    px = gray.pixels
    lo, hi = int(px.min()), int(px.max())
    if hi - lo < cfg.min_contrast:
        return BinaryImage(np.zeros_like(px))
    t = (lo + hi) // 2 + cfg.offset
    return BinaryImage((px.astype(np.int16) < t).astype(np.uint8))
