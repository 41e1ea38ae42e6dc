import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from cardseg.raster import BinaryImage, Rect
from cardseg.segment import (
    LineBand, SegmentConfig, horizontal_histogram, runs, segment_chars, segment_lines,
    segment_region, vertical_histogram,
)
from cardseg.synthcard import CardSpec, LineSpec, render_card


def iou(a: Rect, b: Rect) -> float:
    ix = max(0, min(a.x1, b.x1) - max(a.x, b.x))
    iy = max(0, min(a.y1, b.y1) - max(a.y, b.y))
    inter = ix * iy
    return inter / (a.w * a.h + b.w * b.h - inter)


def binary_line(text, scale=2, spacing=2):
    gw, gh = 5 * scale, 7 * scale
    ln = LineSpec(text, 4, 4, gw, gh, spacing)
    img, gt = render_card(CardSpec(ln.width + 8, gh + 8, [ln]), 0)
    return BinaryImage((img.pixels < 128).astype(np.uint8)), gt


# ------------------------------------------------------------------- lines

def test_histogram_two_bands():
    bands = segment_lines([0, 0, 5, 6, 5, 0, 0, 7, 8, 0], 100)
    assert [(b.top, b.bottom) for b in bands] == [(2, 4), (7, 8)]


def test_single_band_unchanged():
    assert [(b.top, b.bottom) for b in segment_lines([0, 9, 9, 9, 0], 100)] == [(1, 3)]
    assert segment_lines([0, 0, 0], 100) == []


def test_short_noise_streak_rejected():
    hist = [0] + [10] * 10 + [0] * 4 + [3] + [0] * 4 + [10] * 10 + [0]
    bands = segment_lines(hist, 100)
    assert [(b.top, b.bottom) for b in bands] == [(1, 10), (20, 29)]


def test_close_bands_merge():
    hist = [0] + [10] * 10 + [0] + [10] * 10 + [0]
    assert [(b.top, b.bottom) for b in segment_lines(hist, 100)] == [(1, 21)]


def test_band_growth_keeps_faint_rows():
    hist = [0, 1, 9, 9, 9, 1, 0]  # faint rows below threshold 2 still hold ink
    assert [(b.top, b.bottom) for b in segment_lines(hist, 100)] == [(1, 5)]


def test_config_validation():
    with pytest.raises(ValueError):
        SegmentConfig(line_thresh_permille=1000)
    with pytest.raises(ValueError):
        SegmentConfig(min_band_frac=-1)


@settings(max_examples=100)
@given(st.lists(st.integers(0, 50), max_size=60), st.integers(0, 998), st.integers(0, 998))
def test_bands_monotone_in_threshold(hist, t1, t2):
    lo, hi = sorted((t1, t2))
    cfg = lambda t: SegmentConfig(line_thresh_permille=t, min_band_frac=0, merge_gap_frac=0)
    rows = lambda t: {r for b in segment_lines(hist, 100, cfg(t)) for r in range(b.top, b.bottom + 1)}
    assert rows(hi) <= rows(lo)


@given(st.lists(st.integers(0, 50), max_size=60))
def test_bands_are_ordered_and_disjoint(hist):
    bands = segment_lines(hist, 100)
    for a, b in zip(bands, bands[1:]):
        assert a.bottom < b.top
    assert all(0 <= b.top <= b.bottom < len(hist) for b in bands)


def test_runs():
    assert runs(np.array([0, 1, 1, 0, 1], bool)) == [(1, 2), (4, 4)]
    assert runs(np.zeros(3, bool)) == []


# -------------------------------------------------------------- characters

def test_vertical_histogram_examples():
    m = BinaryImage(np.array([[1, 0, 1], [1, 0, 0], [0, 0, 0]], np.uint8))
    assert vertical_histogram(m, LineBand(0, 2)).tolist() == [2, 0, 1]
    assert vertical_histogram(m, LineBand(1, 1)).tolist() == [1, 0, 0]
    with pytest.raises(ValueError):
        vertical_histogram(m, LineBand(1, 3))
    assert horizontal_histogram(m).tolist() == [2, 1, 0]


def test_one_glyph_one_box():
    m, gt = binary_line("H")
    band = segment_lines(horizontal_histogram(m), m.width)[0]
    assert [c.bbox for c in segment_chars(m, band)] == gt.char_boxes[0]


def test_two_glyphs_two_boxes():
    m, gt = binary_line("HI")
    band = segment_lines(horizontal_histogram(m), m.width)[0]
    assert [c.bbox for c in segment_chars(m, band)] == gt.char_boxes[0]


def test_space_separates_words():
    m, gt = binary_line("AB C")
    (band, chars), = segment_region(m)
    assert len(chars) == 3 and [c.bbox for c in chars] == gt.char_boxes[0]
    assert chars[2].bbox.x - chars[1].bbox.x1 > chars[1].bbox.x - chars[0].bbox.x1


def test_twenty_glyph_line():
    m, gt = binary_line("Widget4Sale0123MNOPQ")
    (band, chars), = segment_region(m)
    assert len(chars) == 20
    assert all(iou(c.bbox, t) >= 0.9 for c, t in zip(chars, gt.char_boxes[0]))
    assert band.bbox == gt.line_boxes[0]


@settings(max_examples=80)
@given(arrays(np.uint8, st.tuples(st.integers(1, 30), st.integers(1, 40)),
              elements=st.integers(0, 1)))
def test_nesting_disjointness_completeness(px):
    m = BinaryImage(px)
    lines = segment_region(m)
    covered = np.zeros(px.shape, int)
    for band, chars in lines:
        for c in chars:
            b = c.bbox
            assert band.bbox.contains(b)
            covered[b.y:b.y1, b.x:b.x1] += 1
    assert covered.max(initial=0) <= 1
    # every ink pixel inside a band lies in exactly one char box
    for band, _ in lines:
        rows = slice(band.top, band.bottom + 1)
        assert (covered[rows][px[rows] > 0] == 1).all()
    for (a, _), (b, _) in zip(lines, lines[1:]):
        assert a.bottom < b.top


def _paragraph(n_lines, scale=3, lead=12):
    gh = 7 * scale
    lines = [LineSpec(f"Line{i} text here", 4, 4 + i * (gh + lead), 5 * scale, gh, scale)
             for i in range(n_lines)]
    h = 8 + n_lines * gh + (n_lines - 1) * lead
    img, gt = render_card(CardSpec(lines[0].width + 8, h, lines), 0)
    return (img.pixels < 128).astype(np.uint8), gt


def test_three_line_region_gives_three_runs():
    px, gt = _paragraph(3)
    hist = horizontal_histogram(BinaryImage(px))
    thresh = px.shape[1] * SegmentConfig().line_thresh_permille // 1000
    spans = runs(hist > thresh)
    assert len(spans) == 3
    for (a, b), lb in zip(spans, gt.line_boxes):
        assert abs(a - lb.y) <= 1 and abs(b - (lb.y1 - 1)) <= 1


def test_noise_streak_between_lines_is_rejected():
    px, gt = _paragraph(5)
    y = gt.line_boxes[2].y1 + 5
    px[y, :] = 1  # full-width one-row streak
    bands = segment_lines(horizontal_histogram(BinaryImage(px)), px.shape[1])
    assert len(bands) == 5
    assert all(not (b.top <= y <= b.bottom) for b in bands)
    for band, lb in zip(bands, gt.line_boxes):
        assert (band.top, band.bottom) == (lb.y, lb.y1 - 1)
