"""Synthetic business cards with exact ground truth.

Cards are drawn with the built-in 5x7 font, rotated with the same
fixed-point nearest-neighbour mapping as :mod:`cardseg.raster`, then shaded
and salted with noise. Ground-truth boxes come from rotating a per-glyph
label raster through that same mapping, so they agree with the rendered ink
pixel for pixel.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from . import font
from .raster import GrayImage, Rect, inverse_map

MASK64 = (1 << 64) - 1


class SpecError(ValueError):
    """Card layout does not fit the canvas."""


class XorShift64Star:
    """xorshift64* (Vigna 2014): shifts 12/25/27, multiplier 0x2545F4914F6CDD1D.

    Seeding: ``state = (seed * 0x9E3779B97F4A7C15 + 0x6A09E667F3BCC909) mod 2**64``
    (1 if that is zero), then 8 outputs are discarded.
    """

    MULT = 0x2545F4914F6CDD1D

    def __init__(self, seed: int):
        state = (int(seed) * 0x9E3779B97F4A7C15 + 0x6A09E667F3BCC909) & MASK64
        self.state = state or 1
        for _ in range(8):
            self.next_u64()

    def next_u64(self) -> int:
        x = self.state
        x ^= x >> 12
        x ^= (x << 25) & MASK64
        x ^= x >> 27
        self.state = x
        return (x * self.MULT) & MASK64

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer in ``[lo, hi]`` (modulo reduction of the top 32 bits)."""
        if hi < lo:
            raise ValueError(f"empty range [{lo}, {hi}]")
        return lo + (self.next_u64() >> 32) % (hi - lo + 1)

    def choice(self, seq):
        return seq[self.randint(0, len(seq) - 1)]


@dataclass(frozen=True)
class LineSpec:
    text: str
    x: int
    y: int
    glyph_w: int
    glyph_h: int
    spacing: int

    @property
    def width(self) -> int:
        n = len(self.text)
        return n * self.glyph_w + (n - 1) * self.spacing if n else 0


@dataclass(frozen=True)
class Decoy:
    box: Rect
    kind: str = "solid"  # "solid" logo block or "picture" dark-to-light ramp


@dataclass
class CardSpec:
    width: int
    height: int
    lines: list[LineSpec] = field(default_factory=list)
    skew_centideg: int = 0
    noise_permille: int = 0
    shade_gradient: int = 0
    decoys: list[Decoy] = field(default_factory=list)
    ink: int = 40
    paper: int = 232


@dataclass
class GroundTruth:
    true_angle: int
    line_boxes: list[Rect]
    char_boxes: list[list[Rect]]
    decoy_boxes: list[Rect]
    line_text: list[str] = field(default_factory=list)

    @property
    def n_chars(self) -> int:
        return sum(len(b) for b in self.char_boxes)

    def to_json(self) -> dict:
        return {
            "true_angle": self.true_angle,
            "lines": [
                {"text": t, "bbox": lb.as_list(), "chars": [c.as_list() for c in cb]}
                for t, lb, cb in zip(self.line_text, self.line_boxes, self.char_boxes)
            ],
            "decoys": [d.as_list() for d in self.decoy_boxes],
        }


def _check_spec(spec: CardSpec):
    if spec.width < 1 or spec.height < 1:
        raise SpecError("canvas must be at least 1x1")
    if spec.ink > 64 or spec.paper < 224:
        raise SpecError("ink must be <= 64 and paper >= 224")
    if not -4500 <= spec.skew_centideg <= 4500:
        raise SpecError("skew outside +-45 degrees")
    canvas = Rect(0, 0, spec.width, spec.height)
    for ln in spec.lines:
        if ln.spacing < 1 or ln.glyph_w < font.GLYPH_COLS or ln.glyph_h < font.GLYPH_ROWS:
            raise SpecError(f"bad glyph geometry in {ln}")
        if ln.text and not canvas.contains(Rect(ln.x, ln.y, ln.width, ln.glyph_h)):
            raise SpecError(f"line {ln.text!r} exceeds the {spec.width}x{spec.height} canvas")
    for d in spec.decoys:
        if not canvas.contains(d.box):
            raise SpecError(f"decoy {d.box} exceeds the canvas")


def render_card(spec: CardSpec, seed: int = 0):
    """Render a card and its ground truth.

    Order of operations: glyphs and decoys on paper, rotation about the
    canvas centre (canvas size kept), per-row shading, salt-and-pepper noise.
    Returns ``(GrayImage, GroundTruth)``.
    """
    _check_spec(spec)
    h, w = spec.height, spec.width
    img = np.full((h, w), spec.paper, dtype=np.uint8)
    labels = np.zeros((h, w), dtype=np.int32)

    char_ids: list[list[int]] = []
    next_id = 1
    for ln in spec.lines:
        ids = []
        for i, ch in enumerate(ln.text):
            if ch == " ":
                continue
            bm = font.scaled_glyph(ch, ln.glyph_w, ln.glyph_h).astype(bool)
            x0 = ln.x + i * (ln.glyph_w + ln.spacing)
            sub = (slice(ln.y, ln.y + ln.glyph_h), slice(x0, x0 + ln.glyph_w))
            img[sub][bm] = spec.ink
            labels[sub][bm] = next_id
            ids.append(next_id)
            next_id += 1
        char_ids.append(ids)

    decoy_ids = []
    for d in spec.decoys:
        b = d.box
        sub = (slice(b.y, b.y1), slice(b.x, b.x1))
        if d.kind == "solid":
            img[sub] = spec.ink
        elif d.kind == "picture":
            ramp = spec.ink + (np.arange(b.w, dtype=np.int32) * (spec.paper - spec.ink)) // b.w
            img[sub] = ramp[None, :].astype(np.uint8)
        else:
            raise SpecError(f"unknown decoy kind {d.kind!r}")
        labels[sub] = next_id
        decoy_ids.append(next_id)
        next_id += 1

    if spec.skew_centideg:
        row, col = inverse_map(w, h, spec.skew_centideg, w, h)
        valid = row >= 0
        rimg = np.full((h, w), spec.paper, dtype=np.uint8)
        rimg[valid] = img[row[valid], col[valid]]
        rlab = np.zeros((h, w), dtype=np.int32)
        rlab[valid] = labels[row[valid], col[valid]]
        img, labels = rimg, rlab

    if spec.shade_gradient:
        ramp = (np.arange(h, dtype=np.int32) * spec.shade_gradient) // max(h - 1, 1)
        img = np.clip(img.astype(np.int32) - ramp[:, None], 0, 255).astype(np.uint8)

    if spec.noise_permille:
        rng = XorShift64Star(seed)
        k = w * h * spec.noise_permille // 1000
        flat = img.reshape(-1)
        for _ in range(k):
            r = rng.next_u64()
            flat[(r >> 1) % (w * h)] = 255 if r & 1 else 0

    slices = ndimage.find_objects(labels, max_label=next_id - 1) if next_id > 1 else []

    def box(label):
        sl = slices[label - 1]
        if sl is None:
            raise SpecError(f"glyph {label} rotated off the canvas")
        return Rect(sl[1].start, sl[0].start, sl[1].stop - sl[1].start, sl[0].stop - sl[0].start)

    char_boxes = [[box(i) for i in ids] for ids in char_ids]
    line_boxes, line_text, kept = [], [], []
    for ln, boxes in zip(spec.lines, char_boxes):
        if not boxes:
            continue
        x0 = min(b.x for b in boxes)
        y0 = min(b.y for b in boxes)
        x1 = max(b.x1 for b in boxes)
        y1 = max(b.y1 for b in boxes)
        line_boxes.append(Rect(x0, y0, x1 - x0, y1 - y0))
        line_text.append(ln.text)
        kept.append(boxes)
    gt = GroundTruth(
        true_angle=spec.skew_centideg,
        line_boxes=line_boxes,
        char_boxes=kept,
        decoy_boxes=[box(i) for i in decoy_ids],
        line_text=line_text,
    )
    return GrayImage(img), gt


# ------------------------------------------------------------------ corpus

# '"' is left out: its two strokes never share a column, so a zero-gap
# column split always breaks it in two.
WORD_CHARS = "abcdefghijklmnopqrstuvwxyz"
CAPS = "ABCDEFGHIJKLMNOPQRSTUVWXYZ"
DIGITS = "0123456789"
PUNCT = "@.-,:/&()+#"


@dataclass(frozen=True)
class CorpusRanges:
    width: tuple[int, int] = (1500, 1900)
    skew_centideg: tuple[int, int] = (-1000, 1000)
    noise_permille: tuple[int, int] = (0, 5)
    lines: tuple[int, int] = (3, 8)
    chars_per_line: tuple[int, int] = (5, 40)
    glyph_scale: tuple[int, int] = (3, 4)
    shade_gradient: tuple[int, int] = (0, 24)
    decoy_permille: int = 500
    exact_glyphs: bool = False  # chars_per_line counts glyphs, not characters


def random_text(rng: XorShift64Star, n: int, glyphs: bool = False) -> str:
    """``n`` characters of word-like text with single spaces, no edge spaces.

    With ``glyphs`` the text holds exactly ``n`` non-space characters instead.
    """
    if glyphs:
        out = list(random_text(rng, 2 * n))
        kept, k = [], 0
        for ch in out:
            if k == n:
                break
            kept.append(ch)
            k += ch != " "
        return "".join(kept)
    out = []
    while len(out) < n:
        kind = rng.randint(0, 9)
        wl = rng.randint(2, 9)
        if kind < 5:
            word = [rng.choice(WORD_CHARS) for _ in range(wl)]
        elif kind < 7:
            word = [rng.choice(CAPS)] + [rng.choice(WORD_CHARS) for _ in range(wl - 1)]
        elif kind < 8:
            word = [rng.choice(CAPS) for _ in range(wl)]
        elif kind < 9:
            word = [rng.choice(DIGITS) for _ in range(wl)]
        else:
            word = [rng.choice(WORD_CHARS + DIGITS + PUNCT) for _ in range(wl)]
        if out:
            out.append(" ")
        out.extend(word)
    out = out[:n]
    if out[-1] == " ":
        out[-1] = rng.choice(WORD_CHARS)
    return "".join(out)


def _fits(tw: int, th: int, w: int, h: int, angle: int, margin: int) -> bool:
    from .fixedtrig import ONE, sin_cos

    s, c = sin_cos(angle)
    s, c = abs(s), abs(c)
    # half extents of the rotated text block, in doubled Q16 units
    return (tw * c + th * s <= (w - 2 * margin) * ONE
            and tw * s + th * c <= (h - 2 * margin) * ONE)


def draw_card_spec(rng: XorShift64Star, ranges: CorpusRanges) -> CardSpec:
    """Draw one card layout: lines grouped into 1-3 line paragraphs, an
    optional decoy to the right of the text, all inside the area that stays
    on canvas after rotation."""
    w = rng.randint(*ranges.width)
    h = w * 4 // 7
    angle = rng.randint(*ranges.skew_centideg)
    n_lines = rng.randint(*ranges.lines)
    counts = [rng.randint(*ranges.chars_per_line) for _ in range(n_lines)]
    texts = [random_text(rng, n, ranges.exact_glyphs) for n in counts]
    counts = [len(t) for t in texts]
    scale = rng.randint(*ranges.glyph_scale)
    noise = rng.randint(*ranges.noise_permille)
    shade = rng.randint(*ranges.shade_gradient)
    has_decoy = rng.randint(0, 999) < ranges.decoy_permille
    decoy_kind = "solid" if rng.randint(0, 1) == 0 else "picture"
    groups = []
    i = 0
    while i < n_lines:
        g = min(rng.randint(1, 3), n_lines - i)
        groups.append(g)
        i += g
    lead_permille = rng.randint(500, 800)
    block = max(4, (32 * min(w, h) + 768) // 1536)
    group_gap = block * rng.randint(4, 6)
    ink = rng.randint(10, 64)
    paper = rng.randint(224, 248)

    margin = 8
    while True:
        gw, gh, sp = 5 * scale, 7 * scale, scale
        lead = gh * lead_permille // 1000
        widths = [n * (gw + sp) - sp for n in counts]
        text_w = max(widths)
        text_h = n_lines * gh + (n_lines - len(groups)) * lead + (len(groups) - 1) * group_gap
        decoy_w = 16 * scale if has_decoy else 0
        decoy_gap = 3 * block if has_decoy else 0
        tw = text_w + decoy_gap + decoy_w
        th = max(text_h, decoy_w)
        if _fits(tw, th, w, h, angle, margin):
            break
        if scale > 2:
            scale -= 1
            continue
        raise SpecError("corpus ranges do not fit the canvas")

    x0 = (w - tw) // 2
    y0 = (h - th) // 2
    lines = []
    y = y0
    k = 0
    for gi, g in enumerate(groups):
        for j in range(g):
            lines.append(LineSpec(texts[k], x0, y, gw, gh, sp))
            y += gh + (lead if j < g - 1 else 0)
            k += 1
        y += group_gap
    decoys = []
    if has_decoy:
        decoys.append(Decoy(Rect(x0 + text_w + decoy_gap, y0, decoy_w, decoy_w), decoy_kind))
    return CardSpec(width=w, height=h, lines=lines, skew_centideg=angle, noise_permille=noise,
                    shade_gradient=shade, decoys=decoys, ink=ink, paper=paper)


def corpus(n: int, seed: int, ranges: CorpusRanges | None = None):
    """Yield ``n`` (image, ground truth) pairs; card ``i`` uses seed ``seed + i``."""
    if n < 1:
        raise ValueError("corpus needs n >= 1")
    ranges = ranges or CorpusRanges()
    for i in range(n):
        rng = XorShift64Star(seed + i)
        spec = draw_card_spec(rng, ranges)
        yield render_card(spec, seed + i)


def card_of_size(size: str = "3mp", seed: int = 7) -> tuple[GrayImage, GroundTruth]:
    """A representative card at a named resolution (used by the bench)."""
    sizes = {"3mp": (2048, 1536), "1mp": (1152, 864), "vga": (640, 480)}
    try:
        w, h = sizes[size]
    except KeyError:
        raise ValueError(f"unknown size {size!r}; choose from {sorted(sizes)}") from None
    scale = max(2, 5 * min(w, h) // 1536)
    # six lines of 30 glyphs: 180 characters
    ranges = CorpusRanges(width=(w, w), lines=(6, 6), chars_per_line=(30, 30),
                          glyph_scale=(scale, scale), noise_permille=(2, 2),
                          exact_glyphs=True)
    rng = XorShift64Star(seed)
    spec = draw_card_spec(rng, ranges)
    spec.height = h
    # re-centre vertically for the fixed aspect
    dy = (h - w * 4 // 7) // 2
    spec.lines = [LineSpec(l.text, l.x, l.y + dy, l.glyph_w, l.glyph_h, l.spacing) for l in spec.lines]
    spec.decoys = [Decoy(d.box.offset(0, dy), d.kind) for d in spec.decoys]
    return render_card(spec, seed)


def paragraph_region(seed: int, min_width: int = 300, max_lines: int = 3,
                     skew_range: tuple[int, int] = (-1000, 1000)):
    """A single skewed paragraph cropped to its ink, as a text region.

    Returns ``(region, true_angle)``. The paragraph has 1..``max_lines``
    lines of random text whose unrotated width is at least ``min_width``.
    """
    from .raster import BinaryImage, crop, ink_bbox
    from .region_extract import TextRegion

    rng = XorShift64Star(seed)
    angle = rng.randint(*skew_range)
    scale = rng.randint(3, 5)
    gw, gh, sp = 5 * scale, 7 * scale, scale
    nlines = rng.randint(1, max_lines)
    n = rng.randint(-(-min_width // (gw + sp)) + 1, 40)
    texts = [random_text(rng, n) for _ in range(nlines)]
    lead = gh * rng.randint(500, 800) // 1000
    pitch = gh + lead
    text_w = n * (gw + sp)
    w = text_w + 200
    h = nlines * pitch + w // 4 + 100
    y0 = (h - nlines * pitch) // 2
    lines = [LineSpec(t, 100, y0 + i * pitch, gw, gh, sp) for i, t in enumerate(texts)]
    img, _ = render_card(CardSpec(w, h, lines, skew_centideg=angle), seed)
    ink = img.pixels < 128
    box = ink_bbox(ink)
    mask = BinaryImage(ink[box.y:box.y1, box.x:box.x1].astype(np.uint8))
    return TextRegion(box, mask, crop(img, box)), angle
