"""Plain-integer reference implementations for differential testing.

Written independently of the package: Python ints and lists only, no
numpy, linear scans instead of binary search, tangent table built from an
arbitrary-precision tangent.
"""
import mpmath

mpmath.mp.prec = 120
ABSENT = -1

REF_TAN = [int(mpmath.nint(mpmath.tan(mpmath.radians(mpmath.mpf(k) / 4)) * 65536))
           for k in range(360)]


def ref_stats(heights):
    vals = [h for h in heights if h != ABSENT]
    n = len(vals)
    total = 0
    for v in vals:
        total += v
    mu = total // n
    dev = 0
    for v in vals:
        dev += v - mu if v >= mu else mu - v
    return mu, dev // n


def ref_filter(heights, mu, tau):
    out = []
    for h in heights:
        if h == ABSENT:
            out.append(ABSENT)
        else:
            diff = h - mu if h >= mu else mu - h
            out.append(h if diff <= tau else ABSENT)
    return out


def ref_iatan2(dy, dx):
    """Nearest table angle by exhaustive scan; ties to the smaller angle."""
    assert dx > 0
    num = (dy if dy >= 0 else -dy) * 65536
    best_k, best_err = 0, None
    for k, t in enumerate(REF_TAN):
        err = t * dx - num
        if err < 0:
            err = -err
        if best_err is None or err < best_err:
            best_k, best_err = k, err
    angle = best_k * 25
    return -angle if dy < 0 else angle


def ref_anchors(heights):
    cols = [i for i, h in enumerate(heights) if h != ABSENT]
    c1, c2, c3 = cols[0], cols[-1], cols[len(cols) // 2]
    return heights[c1], c1, heights[c2], c2, heights[c3], c3


def ref_angles(h1, c1, h2, c2, h3, c3, denominator="geometric"):
    d = c2 - c1
    if denominator == "common":
        d13 = d32 = d
    else:
        d13, d32 = c3 - c1, c2 - c3
    return ref_iatan2(h2 - h1, d), ref_iatan2(h3 - h1, d13), ref_iatan2(h2 - h3, d32)
