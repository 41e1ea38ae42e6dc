"""Per-region skew estimation from bottom/top ink profiles, and deskewing.

All estimation arithmetic is integer: profile mean and mean deviation use
floor division, angles come from the Q16 tangent table in
:mod:`cardseg.fixedtrig`. Angles are centidegrees, positive when the text
rises to the right.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy import ndimage

from .fixedtrig import iatan2
from .raster import BinaryImage, GrayImage, Rect, inverse_map, ink_bbox, rotated_size
from .region_extract import RegionFrame, TextRegion

ABSENT = -1


class SkewEstimationError(ValueError):
    """A profile side cannot produce an angle."""


@dataclass(frozen=True, eq=False)
class Profile:
    """Per-column distance from one edge to the first ink pixel; -1 if none."""
    heights: np.ndarray
    side: str  # "bottom" | "top"

    @property
    def n(self) -> int:
        return len(self.heights)

    def present(self) -> np.ndarray:
        return np.flatnonzero(self.heights != ABSENT)

    def __eq__(self, other):
        return (isinstance(other, Profile) and self.side == other.side
                and np.array_equal(self.heights, other.heights))


@dataclass(frozen=True)
class ProfileStats:
    mu: int
    tau: int


@dataclass(frozen=True)
class Anchors:
    h1: int
    c1: int
    h2: int
    c2: int
    h3: int
    c3: int

    @property
    def d(self) -> int:
        return self.c2 - self.c1


@dataclass(frozen=True)
class AngleTriple:
    alpha: int
    beta: int
    gamma: int

    def spread(self) -> int:
        a, b, g = self.alpha, self.beta, self.gamma
        return max(abs(a - b), abs(a - g), abs(b - g))

    def mean(self) -> int:
        # sign-preserving: truncate toward zero
        s = self.alpha + self.beta + self.gamma
        return s // 3 if s >= 0 else -((-s) // 3)

    def negated(self) -> AngleTriple:
        return AngleTriple(-self.alpha, -self.beta, -self.gamma)


@dataclass(frozen=True)
class SkewEstimate:
    angle: int
    source: str  # "bottom" | "top" | "min-of-both" | "none"
    consistent: bool
    diagnostic: str = ""


@dataclass(frozen=True)
class SkewConfig:
    epsilon: int = 300
    max_angle: int = 4500
    denominator: str = "geometric"  # or "common": every slope over the h1-h2 distance
    profile_window: int = 20  # lower-envelope half width in px; 0 = raw profile
    passes: int = 3  # estimate/deskew rounds; 1 = single estimate

    def __post_init__(self):
        if self.denominator not in ("geometric", "common"):
            raise ValueError(f"unknown skew denominator {self.denominator!r}")
        if self.profile_window < 0:
            raise ValueError("profile_window must be >= 0")
        if self.passes < 1:
            raise ValueError("passes must be >= 1")


def _mask_array(region_or_mask) -> np.ndarray:
    if isinstance(region_or_mask, TextRegion):
        return region_or_mask.mask.pixels
    if isinstance(region_or_mask, BinaryImage):
        return region_or_mask.pixels
    return np.asarray(region_or_mask)


def bottom_profile(region) -> Profile:
    m = _mask_array(region) > 0
    h = np.argmax(m[::-1, :], axis=0).astype(np.int64)
    h[~m.any(axis=0)] = ABSENT
    return Profile(h, "bottom")


def top_profile(region) -> Profile:
    m = _mask_array(region) > 0
    h = np.argmax(m, axis=0).astype(np.int64)
    h[~m.any(axis=0)] = ABSENT
    return Profile(h, "top")


def lower_envelope(p: Profile, window: int) -> Profile:
    """Minimum height over ``[i - window, i + window]`` at every present
    column; absent columns stay absent.

    Bridges inter-glyph gaps and glyph parts that stop short of the
    baseline, so the profile follows the line rather than individual
    glyph shapes.
    """
    if window <= 0:
        return p
    h = p.heights
    big = np.iinfo(np.int64).max
    e = ndimage.minimum_filter1d(np.where(h == ABSENT, big, h), 2 * window + 1,
                                 mode="constant", cval=big)
    return Profile(np.where(h == ABSENT, ABSENT, e).astype(np.int64), p.side)


def profile_stats(p: Profile) -> ProfileStats:
    vals = p.heights[p.heights != ABSENT]
    n = len(vals)
    if n == 0:
        raise SkewEstimationError("profile has no ink columns")
    mu = int(vals.sum()) // n
    tau = int(np.abs(vals - mu).sum()) // n
    return ProfileStats(mu, tau)


def filter_outliers(p: Profile, s: ProfileStats, min_survivors: int = 3) -> Profile:
    """Keep heights with ``|h - mu| <= tau``; others become absent."""
    h = p.heights.copy()
    drop = (h != ABSENT) & (np.abs(h - s.mu) > s.tau)
    h[drop] = ABSENT
    out = Profile(h, p.side)
    if len(out.present()) < min_survivors:
        raise SkewEstimationError(f"only {len(out.present())} {p.side} profile elements survive")
    return out


def find_anchors(p: Profile) -> Anchors:
    """Leftmost, rightmost and middle (by position among survivors) heights."""
    cols = p.present()
    if len(cols) < 3:
        raise SkewEstimationError("need at least three profile elements")
    c1, c2, c3 = int(cols[0]), int(cols[-1]), int(cols[len(cols) // 2])
    h = p.heights
    return Anchors(int(h[c1]), c1, int(h[c2]), c2, int(h[c3]), c3)


def compute_angles(a: Anchors, denominator: str = "geometric") -> AngleTriple:
    """Slopes h1-h2, h1-h3 and h3-h2 as integer angles.

    ``geometric`` divides each height change by the column distance of its
    own anchor pair; ``common`` divides all three by the h1-h2 distance.
    """
    d = a.d
    if denominator == "common":
        d13 = d32 = d
    elif denominator == "geometric":
        d13, d32 = a.c3 - a.c1, a.c2 - a.c3
    else:
        raise ValueError(f"unknown skew denominator {denominator!r}")
    if d <= 0 or d13 <= 0 or d32 <= 0:
        raise SkewEstimationError("anchor columns must be distinct and ordered")
    return AngleTriple(iatan2(a.h2 - a.h1, d), iatan2(a.h3 - a.h1, d13), iatan2(a.h2 - a.h3, d32))


def side_angles(p: Profile, denominator: str = "geometric") -> AngleTriple:
    """Stats, outlier band, anchors and angles for one profile side.

    Top-profile heights grow downwards, so their slopes are negated to keep
    one sign convention for both sides.
    """
    kept = filter_outliers(p, profile_stats(p))
    triple = compute_angles(find_anchors(kept), denominator)
    return triple.negated() if p.side == "top" else triple


def _clamp(angle: int, limit: int) -> int:
    return max(-limit, min(limit, angle))


def estimate_skew(region, epsilon: int = 300, cfg: SkewConfig | None = None) -> SkewEstimate:
    """Bottom profile first; top profile if the bottom angles disagree by
    more than ``epsilon``; otherwise the smaller-magnitude of the two
    averages."""
    cfg = cfg or SkewConfig(epsilon=epsilon)
    eps = cfg.epsilon

    def side(profile):
        try:
            t = side_angles(lower_envelope(profile, cfg.profile_window), cfg.denominator)
        except SkewEstimationError:
            return None
        return t.mean(), t.spread() <= eps

    bottom = side(bottom_profile(region))
    if bottom and bottom[1]:
        return SkewEstimate(_clamp(bottom[0], cfg.max_angle), "bottom", True)
    top = side(top_profile(region))
    if top and top[1]:
        return SkewEstimate(_clamp(top[0], cfg.max_angle), "top", True)
    if bottom and top:
        pick = bottom[0] if abs(bottom[0]) <= abs(top[0]) else top[0]
        return SkewEstimate(_clamp(pick, cfg.max_angle), "min-of-both", False)
    if bottom or top:
        only, name = (bottom, "bottom") if bottom else (top, "top")
        return SkewEstimate(_clamp(only[0], cfg.max_angle), name, False,
                            "other profile side unusable")
    return SkewEstimate(0, "none", False, "no usable profile")


def refine_skew(region: TextRegion, cfg: SkewConfig = SkewConfig()) -> SkewEstimate:
    """Repeat estimation on the deskewed region and accumulate the angles.

    A single estimate tends to undershoot on multi-line regions; each extra
    pass measures the residual. Stops early when a pass returns 0. The
    reported source and consistency are those of the first pass.
    """
    first = estimate_skew(region, cfg=cfg)
    total = first.angle
    cur = region
    for _ in range(cfg.passes - 1):
        if total == 0:
            break
        cur = deskew(region, SkewEstimate(total, first.source, first.consistent))
        step = estimate_skew(cur, cfg=cfg).angle
        if step == 0:
            break
        total = _clamp(total + step, cfg.max_angle)
    return replace(first, angle=total)


def deskew(region: TextRegion, est: SkewEstimate, paper: int = 255) -> TextRegion:
    """Rotate gray and mask by ``-est.angle`` and crop tight to the ink."""
    if est.angle == 0:
        return replace(region, skew_centideg=0)
    src = region.frame.src if region.frame is not None else region.bbox
    h, w = region.mask.height, region.mask.width
    angle = -est.angle
    cw, ch = rotated_size(w, h, angle)
    row, col = inverse_map(w, h, angle, cw, ch)
    valid = row >= 0
    mask = np.zeros((ch, cw), dtype=np.uint8)
    mask[valid] = region.mask.pixels[row[valid], col[valid]]
    gray = np.full((ch, cw), paper, dtype=np.uint8)
    gray[valid] = region.gray.pixels[row[valid], col[valid]]
    box = ink_bbox(mask) or Rect(0, 0, cw, ch)
    sl = (slice(box.y, box.y1), slice(box.x, box.x1))
    frame = RegionFrame(src=src, angle=est.angle, canvas_w=cw, canvas_h=ch, offset=(box.x, box.y))
    return TextRegion(bbox=box, mask=BinaryImage(mask[sl]), gray=GrayImage(gray[sl]),
                      skew_centideg=est.angle, frame=frame)
