"""Shared checks and the acceptance result log."""
import numpy as np

from cardseg.raster import Rect

# (criterion number, passed, detail), filled by test_acceptance
ACCEPTANCE: list[tuple[int, bool, str]] = []


def record(n: int, ok: bool, detail: str) -> None:
    ACCEPTANCE.append((n, ok, detail))
    print(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")


def check_region_structure(done):
    """Chars nest in lines, lines in the region; chars are disjoint and every
    ink pixel of a line band lies in exactly one char box."""
    for r in done:
        canvas = Rect(0, 0, r.region.bbox.w, r.region.bbox.h)
        covered = np.zeros((r.binary.height, r.binary.width), int)
        for band, chars in r.lines:
            assert canvas.contains(band.bbox)
            for c in chars:
                b = c.bbox
                assert band.bbox.contains(b)
                covered[b.y:b.y1, b.x:b.x1] += 1
            rows = slice(band.top, band.bottom + 1)
            assert (covered[rows][r.binary.pixels[rows] > 0] == 1).all()
        assert covered.max(initial=0) <= 1
