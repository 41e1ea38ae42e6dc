"""Text-region extraction: block spread classification, ink mask, components,
non-text elimination.

Components are formed at block granularity: two ink pixels share a region
when their foreground blocks are 8-connected. Well-spaced lines therefore
come out as separate regions while tightly packed or skewed neighbouring
lines merge, and a region's mask is the ink that lies inside its blocks.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
from scipy import ndimage

from .raster import BinaryImage, GrayImage, Rect, ink_bbox

EIGHT = np.ones((3, 3), dtype=bool)


class ConfigError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class BlockGrid:
    block_size: int
    cols: int
    rows: int
    labels: np.ndarray  # (rows, cols) bool, True = foreground

    def pixel_map(self, width: int, height: int) -> np.ndarray:
        """Per-pixel foreground flag, cropped to the image."""
        bs = self.block_size
        return np.repeat(np.repeat(self.labels, bs, axis=0), bs, axis=1)[:height, :width]


@dataclass(frozen=True)
class FilterRules:
    min_area: int = 15
    min_h: float = 0.006
    max_h: float = 0.4
    max_aspect: int = 40
    min_density: int = 20   # per-mille
    max_density: int = 900  # per-mille


@dataclass(frozen=True, eq=False)
class RegionFrame:
    """How region-local pixels map back onto the card.

    ``src`` is the region's box on the card. The region raster was rotated
    by ``angle`` centidegrees about the centre of ``src`` onto a
    ``canvas_w x canvas_h`` canvas, then cropped at ``offset``.
    """
    src: Rect
    angle: int = 0
    canvas_w: int = 0
    canvas_h: int = 0
    offset: tuple[int, int] = (0, 0)

    def to_json(self) -> dict:
        return {"angle": self.angle, "canvas": [self.canvas_w, self.canvas_h],
                "offset": list(self.offset)}


@dataclass(frozen=True, eq=False)
class TextRegion:
    bbox: Rect
    mask: BinaryImage
    gray: GrayImage
    skew_centideg: int = 0
    frame: RegionFrame | None = field(default=None)

    def __post_init__(self):
        dims = (self.bbox.w, self.bbox.h)
        if (self.mask.width, self.mask.height) != dims or (self.gray.width, self.gray.height) != dims:
            raise ValueError("mask, gray and bbox dimensions differ")
        if self.frame is None:
            # identity: the region is its own canvas
            object.__setattr__(self, "frame", RegionFrame(self.bbox, 0, self.bbox.w, self.bbox.h))


def auto_block_size(width: int, height: int) -> int:
    """32 px at a 1536-px short side, scaled linearly, never below 4."""
    return max(4, (32 * min(width, height) + 768) // 1536)


def block_stats(img: GrayImage, block_size: int) -> tuple[np.ndarray, np.ndarray]:
    """Integer mean and mean absolute deviation of intensity per block.

    mean = floor(sum / n); spread = floor(sum |v - mean| / n); edge blocks
    use their real pixel count.
    """
    bs = block_size
    h, w = img.height, img.width
    rows, cols = -(-h // bs), -(-w // bs)
    ph, pw = rows * bs, cols * bs
    px = np.zeros((ph, pw), dtype=np.int32)
    px[:h, :w] = img.pixels
    valid = np.zeros((ph, pw), dtype=np.int32)
    valid[:h, :w] = 1
    shape = (rows, bs, cols, bs)
    counts = valid.reshape(shape).sum(axis=(1, 3))
    sums = px.reshape(shape).sum(axis=(1, 3))
    means = sums // counts
    dev = np.abs(px - np.repeat(np.repeat(means, bs, axis=0), bs, axis=1)) * valid
    return means, dev.reshape(shape).sum(axis=(1, 3)) // counts


def classify_blocks(img: GrayImage, block_size: int = 32, spread_thresh: int = 16) -> BlockGrid:
    if block_size < 4:
        raise ConfigError(f"block_size must be >= 4, got {block_size}")
    _, spread = block_stats(img, block_size)
    rows, cols = spread.shape
    return BlockGrid(block_size, cols, rows, spread > spread_thresh)


def absorb_solid_blocks(grid: BlockGrid, img: GrayImage, ink_thresh: int = 128) -> BlockGrid:
    """Add uniformly dark blocks that are 8-connected to the foreground.

    The inside of a solid logo or photo has almost no spread, so on its own
    only the rim is foreground and the component reads as a sparse,
    text-like ring. Dark paper never touches text blocks this way.
    """
    means, _ = block_stats(img, grid.block_size)
    fg = grid.labels
    cand = fg | (means < ink_thresh)
    lab, _ = ndimage.label(cand, structure=EIGHT)
    hit = np.unique(lab[fg])
    keep = np.isin(lab, hit[hit > 0])
    return BlockGrid(grid.block_size, grid.cols, grid.rows, keep)


def foreground_mask(img: GrayImage, grid: BlockGrid, ink_thresh: int = 128) -> BinaryImage:
    fg = grid.pixel_map(img.width, img.height)
    if fg.shape != (img.height, img.width):
        raise ConfigError("block grid does not cover the image")
    return BinaryImage((fg & (img.pixels < ink_thresh)).astype(np.uint8))


def remove_specks(mask: BinaryImage, min_pixels: int) -> BinaryImage:
    """Drop 8-connected ink components smaller than ``min_pixels``."""
    if min_pixels <= 1:
        return mask
    lab, n = ndimage.label(mask.pixels, structure=EIGHT)
    if n == 0:
        return mask
    sizes = np.bincount(lab.ravel())
    keep = sizes >= min_pixels
    keep[0] = False
    return BinaryImage(keep[lab].astype(np.uint8))


def link_blocks(labels: np.ndarray, gap: int) -> np.ndarray:
    """Foreground grid with horizontal background runs of at most ``gap``
    blocks between two foreground blocks filled in (word spacing)."""
    fg = np.asarray(labels, dtype=bool)
    if gap <= 0:
        return fg
    closed = ndimage.binary_closing(fg, structure=np.ones((1, gap + 1), dtype=bool))
    return fg | closed


def label_components(mask: BinaryImage, grid: BlockGrid, card: GrayImage,
                     paper: int = 255, link_gap: int = 0) -> list[TextRegion]:
    """One TextRegion per 8-connected group of foreground blocks holding ink.

    With ``link_gap`` > 0 the grouping is done on the grid after
    :func:`link_blocks`; the bridging blocks themselves contribute nothing.

    The region's gray crop keeps only pixels inside its own blocks; the rest
    is set to ``paper`` so a neighbouring region cannot leak into it.
    Regions are sorted by bbox origin, top-to-bottom then left-to-right.
    """
    h, w = mask.height, mask.width
    bs = grid.block_size
    blab, n = ndimage.label(link_blocks(grid.labels, link_gap), structure=EIGHT)
    if n == 0:
        return []
    pix_lab = np.repeat(np.repeat(blab, bs, axis=0), bs, axis=1)[:h, :w]
    fg_pix = np.repeat(np.repeat(np.asarray(grid.labels, dtype=np.uint8), bs, axis=0), bs, axis=1)[:h, :w]
    ink_lab = np.where(mask.pixels > 0, pix_lab, 0)
    regions = []
    for lab, sl in enumerate(ndimage.find_objects(ink_lab, max_label=n), start=1):
        if sl is None:
            continue
        bbox = Rect(sl[1].start, sl[0].start, sl[1].stop - sl[1].start, sl[0].stop - sl[0].start)
        own = (pix_lab[sl] == lab) & (fg_pix[sl] > 0)
        m = (ink_lab[sl] == lab).astype(np.uint8)
        g = np.where(own, card.pixels[sl], paper).astype(np.uint8)
        regions.append(TextRegion(bbox=bbox, mask=BinaryImage(m), gray=GrayImage(g)))
    regions.sort(key=lambda r: (r.bbox.y, r.bbox.x))
    return regions


def ink_density_permille(region: TextRegion) -> int:
    return region.mask.ink_count * 1000 // region.bbox.area


def keep_region(region: TextRegion, card: Rect, rules: FilterRules) -> bool:
    b = region.bbox
    if region.mask.ink_count < rules.min_area:
        return False
    if not rules.min_h * card.h <= b.h <= rules.max_h * card.h:
        return False
    density = ink_density_permille(region)
    dense_ok = rules.min_density <= density <= rules.max_density
    if b.w > rules.max_aspect * b.h and not dense_ok:
        return False
    return dense_ok


def filter_nontext(regions, card: Rect, rules: FilterRules = FilterRules()) -> list[TextRegion]:
    """Keep regions that look like text: enough ink, plausible height,
    moderate ink density (rejects solid logos, rules and pictures)."""
    return [r for r in regions if keep_region(r, card, rules)]


@dataclass(frozen=True)
class ExtractConfig:
    block_size: int = 0  # 0 = auto from image size
    spread_thresh: int = 16
    ink_thresh: int = 128
    speck_area: int = 5
    link_gap: int = 0  # background block columns bridged when grouping
    rules: FilterRules = FilterRules()

    def __post_init__(self):
        if self.block_size != 0 and self.block_size < 4:
            raise ConfigError(f"block_size must be 0 (auto) or >= 4, got {self.block_size}")
        if not 0 <= self.ink_thresh <= 256:
            raise ConfigError(f"ink_thresh must be in [0, 256], got {self.ink_thresh}")
        for name in ("spread_thresh", "speck_area", "link_gap"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be >= 0")

    def resolved(self, img: GrayImage) -> ExtractConfig:
        if self.block_size:
            return self
        return replace(self, block_size=auto_block_size(img.width, img.height))


def extract_regions(card: GrayImage, cfg: ExtractConfig = ExtractConfig()) -> list[TextRegion]:
    cfg = cfg.resolved(card)
    grid = classify_blocks(card, cfg.block_size, cfg.spread_thresh)
    grid = absorb_solid_blocks(grid, card, cfg.ink_thresh)
    mask = remove_specks(foreground_mask(card, grid, cfg.ink_thresh), cfg.speck_area)
    regions = label_components(mask, grid, card, link_gap=cfg.link_gap)
    return filter_nontext(regions, Rect(0, 0, card.width, card.height), cfg.rules)


def tight_mask_box(mask: BinaryImage) -> Rect | None:
    return ink_bbox(mask.pixels)
