"""Fixed-point trigonometry shared by rotation and skew estimation.

Angles are integer centidegrees. Tables are Q16 (scaled by 2**16) and are
built once at import; every lookup afterwards is integer-only.
"""
import math

Q = 16
ONE = 1 << Q

# tan(k * 0.25 deg) in Q16 for k = 0..360. tan(90 deg) has no finite value,
# so the last slot holds a sentinel larger than any |dy| << 16 we accept.
TAN_STEP_CENTIDEG = 25
TAN_STEPS = 360
TAN_Q16 = [round(math.tan(math.radians(k * 0.25)) * ONE) for k in range(TAN_STEPS)]
TAN_Q16.append(1 << 62)

# sin(k centidegrees) in Q16 for k = 0..9000
SIN_Q16 = [round(math.sin(math.radians(k / 100.0)) * ONE) for k in range(9001)]


def sin_cos(centideg: int) -> tuple[int, int]:
    """Q16 sine and cosine of an angle in [-9000, 9000] centidegrees."""
    a = int(centideg)
    if not -9000 <= a <= 9000:
        raise ValueError(f"angle {a} outside [-9000, 9000] centidegrees")
    s = SIN_Q16[abs(a)]
    c = SIN_Q16[9000 - abs(a)]
    return (-s if a < 0 else s), c


def iatan2(dy: int, dx: int) -> int:
    """Integer arctangent of dy/dx in centidegrees, for dx > 0.

    The result is the table angle whose tangent is nearest to |dy|/dx
    (ties go to the smaller angle), with the sign of dy. Resolution is one
    table step, 25 centidegrees.
    """
    dy = int(dy)
    dx = int(dx)
    if dx <= 0:
        raise ValueError(f"iatan2 needs dx > 0, got {dx}")
    num = abs(dy) << Q
    # largest k with TAN_Q16[k] * dx <= num
    lo, hi = 0, TAN_STEPS
    while lo < hi:
        mid = (lo + hi + 1) >> 1
        if TAN_Q16[mid] * dx <= num:
            lo = mid
        else:
            hi = mid - 1
    k = lo
    if k < TAN_STEPS and TAN_Q16[k + 1] * dx - num < num - TAN_Q16[k] * dx:
        k += 1
    angle = k * TAN_STEP_CENTIDEG
    return -angle if dy < 0 else angle
