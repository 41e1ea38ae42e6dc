"""End-to-end card segmentation: extract -> skew -> binarize -> segment.

Boxes in the result are in deskewed-region coordinates; each region carries
its card box and the rotation record needed to map them back
(:func:`region_box_to_card`).
"""
from __future__ import annotations

import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

from .binarize import BinarizeConfig, binarize_region
from .raster import BinaryImage, GrayImage, Rect, annotate_boxes, save_image
from .region_extract import ExtractConfig, TextRegion, extract_regions, remove_specks
from .segment import SegmentConfig, segment_region
from .skew import SkewConfig, SkewEstimate, deskew, refine_skew

SCHEMA = "cardseg/1"
STAGES = ("extract", "skew", "binarize", "segment")


@dataclass(frozen=True)
class PipelineConfig:
    extract: ExtractConfig = field(default_factory=ExtractConfig)
    skew: SkewConfig = field(default_factory=SkewConfig)
    binarize: BinarizeConfig = field(default_factory=BinarizeConfig)
    segment: SegmentConfig = field(default_factory=SegmentConfig)
    deskew: bool = True
    emit_annotated: bool = False
    emit_timing: bool = False
    parallelism: int = 1  # 0 = one worker per CPU

    def workers(self) -> int:
        return self.parallelism or os.cpu_count() or 1


@dataclass
class CardSegmentation:
    source: str
    image_size: tuple[int, int]
    regions: list[dict]
    timing_ms: dict[str, float]
    config_echo: dict

    @property
    def n_chars(self) -> int:
        return sum(len(ln["chars"]) for r in self.regions for ln in r["lines"])

    def to_json(self, timing: bool = False) -> dict:
        out = {
            "schema": SCHEMA,
            "source": self.source,
            "image_size": list(self.image_size),
            "regions": self.regions,
            "config": self.config_echo,
        }
        if timing:
            out["timing_ms"] = self.timing_ms
        return out


def _box(r: Rect) -> dict:
    return {"x": r.x, "y": r.y, "w": r.w, "h": r.h}


@dataclass
class RegionResult:
    """Everything computed for one region, before serialization."""
    region: TextRegion  # deskewed
    estimate: SkewEstimate
    binary: BinaryImage
    lines: list  # (LineBand, [CharBox])
    seconds: dict[str, float]

    def record(self) -> dict:
        frame = self.region.frame
        est = self.estimate
        return {
            "bbox": _box(frame.src),
            "skew_centideg": est.angle,
            "skew_source": est.source,
            "skew_consistent": est.consistent,
            "transform": frame.to_json(),
            "lines": [
                {"bbox": _box(band.bbox), "chars": [_box(c.bbox) for c in chars]}
                for band, chars in self.lines
            ],
        }


def process_region(region: TextRegion, cfg: PipelineConfig = PipelineConfig()) -> RegionResult:
    t0 = time.perf_counter()
    if cfg.deskew:
        est = refine_skew(region, cfg.skew)
    else:
        est = SkewEstimate(0, "disabled", False)
    region = deskew(region, est)
    t1 = time.perf_counter()
    binary = binarize_region(region.gray, cfg.binarize)
    binary = remove_specks(binary, cfg.extract.speck_area)
    t2 = time.perf_counter()
    lines = segment_region(binary, cfg.segment)
    t3 = time.perf_counter()
    return RegionResult(region, est, binary, lines,
                        {"skew": t1 - t0, "binarize": t2 - t1, "segment": t3 - t2})


def analyse_card(img: GrayImage, cfg: PipelineConfig = PipelineConfig()):
    """Per-region results in region order, and the extraction time (s)."""
    start = time.perf_counter()
    regions = extract_regions(img, cfg.extract)
    t_extract = time.perf_counter() - start
    workers = cfg.workers()
    if workers > 1 and len(regions) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            done = list(pool.map(lambda r: process_region(r, cfg), regions))
    else:
        done = [process_region(r, cfg) for r in regions]
    return done, t_extract


def assemble(img: GrayImage, cfg: PipelineConfig, done, timing: dict, source: str = "") -> CardSegmentation:
    echo = asdict(cfg)
    # worker count never changes results; leaving it out keeps output
    # byte-identical across parallelism settings
    del echo["parallelism"]
    echo["extract"]["block_size"] = cfg.extract.resolved(img).block_size
    return CardSegmentation(
        source=source,
        image_size=(img.width, img.height),
        regions=[r.record() for r in done],
        timing_ms=timing,
        config_echo=echo,
    )


def process_card(img: GrayImage, cfg: PipelineConfig = PipelineConfig(), source: str = "") -> CardSegmentation:
    start = time.perf_counter()
    done, t_extract = analyse_card(img, cfg)
    timing = {"extract": t_extract * 1000.0}
    for stage in STAGES[1:]:
        timing[stage] = sum(r.seconds[stage] for r in done) * 1000.0
    timing["total"] = (time.perf_counter() - start) * 1000.0
    return assemble(img, cfg, done, timing, source)


def dumps(result: CardSegmentation, timing: bool = False) -> str:
    return json.dumps(result.to_json(timing), indent=1) + "\n"


def emit_json(result: CardSegmentation, path, timing: bool = False) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(dumps(result, timing))


# ------------------------------------------------------------ card mapping

def region_box_to_card(box: dict, region: dict, card_size=None) -> Rect:
    """Axis-aligned card box covering a deskewed-region box.

    The four box corners (pixel edges) are rotated back by the region's
    skew about the rotation canvas centre and offset by the region's card
    origin.
    """
    src = region["bbox"]
    tr = region["transform"]
    angle = tr["angle"]
    ox, oy = tr["offset"]
    if angle == 0:
        x, y = box["x"] + ox + src["x"], box["y"] + oy + src["y"]
        return Rect(x, y, box["w"], box["h"])
    cw, ch = tr["canvas"]
    th = math.radians(-angle / 100.0)
    c, s = math.cos(th), math.sin(th)
    xs, ys = [], []
    for px in (box["x"] - 0.5, box["x"] + box["w"] - 0.5):
        for py in (box["y"] - 0.5, box["y"] + box["h"] - 0.5):
            dx = px + ox - (cw - 1) / 2.0
            dy = py + oy - (ch - 1) / 2.0
            xs.append((src["w"] - 1) / 2.0 + dx * c - dy * s + src["x"])
            ys.append((src["h"] - 1) / 2.0 + dx * s + dy * c + src["y"])
    x0 = math.floor(min(xs) + 0.5)
    y0 = math.floor(min(ys) + 0.5)
    x1 = math.ceil(max(xs) + 0.5)
    y1 = math.ceil(max(ys) + 0.5)
    if card_size is not None:
        x0, y0 = max(x0, 0), max(y0, 0)
        x1, y1 = min(x1, card_size[0]), min(y1, card_size[1])
    return Rect(x0, y0, max(x1 - x0, 1), max(y1 - y0, 1))


def card_boxes(result: CardSegmentation):
    """(region boxes, line boxes, char boxes) in card coordinates."""
    size = result.image_size
    regs, lines, chars = [], [], []
    for r in result.regions:
        b = r["bbox"]
        regs.append(Rect(b["x"], b["y"], b["w"], b["h"]))
        for ln in r["lines"]:
            lines.append(region_box_to_card(ln["bbox"], r, size))
            chars.extend(region_box_to_card(c, r, size) for c in ln["chars"])
    return regs, lines, chars


def annotated_image(result: CardSegmentation, img: GrayImage) -> GrayImage:
    regs, lines, chars = card_boxes(result)
    out = annotate_boxes(img, regs, 160)
    out = annotate_boxes(out, lines, 96)
    return annotate_boxes(out, chars, 0)


def emit_annotated(result: CardSegmentation, img: GrayImage, path) -> None:
    save_image(annotated_image(result, img), path)
