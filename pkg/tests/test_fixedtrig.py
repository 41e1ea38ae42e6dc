import math

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cardseg.fixedtrig import ONE, SIN_Q16, TAN_Q16, iatan2, sin_cos
from reference import ref_iatan2


def test_tables_shape_and_monotone():
    assert len(TAN_Q16) == 361 and TAN_Q16[0] == 0
    assert all(a < b for a, b in zip(TAN_Q16, TAN_Q16[1:]))
    assert TAN_Q16[180] == ONE  # tan 45 deg
    assert SIN_Q16[0] == 0 and SIN_Q16[9000] == ONE and SIN_Q16[3000] == ONE // 2


@pytest.mark.parametrize("dy, dx, expect", [(0, 5, 0), (7, 7, 4500), (-7, 7, -4500)])
def test_iatan2_examples(dy, dx, expect):
    assert iatan2(dy, dx) == expect


def test_iatan2_tenth_slope():
    truth = float(mpmath.degrees(mpmath.atan(mpmath.mpf(1) / 10))) * 100  # 571.06
    assert abs(iatan2(10, 100) - truth) <= 25
    assert abs(iatan2(10, 100) - 571) <= 25


def test_iatan2_domain():
    with pytest.raises(ValueError):
        iatan2(1, 0)
    with pytest.raises(ValueError):
        iatan2(1, -3)


@given(st.integers(-10**6, 10**6), st.integers(1, 10**6))
def test_iatan2_odd(dy, dx):
    assert iatan2(-dy, dx) == -iatan2(dy, dx)


@given(st.integers(-5000, 5000), st.integers(-5000, 5000), st.integers(1, 5000))
def test_iatan2_monotone_in_dy(a, b, dx):
    lo, hi = min(a, b), max(a, b)
    assert iatan2(lo, dx) <= iatan2(hi, dx)


@given(st.integers(-10**5, 10**5), st.integers(1, 10**5))
def test_iatan2_matches_reference(dy, dx):
    assert iatan2(dy, dx) == ref_iatan2(dy, dx)


@given(st.integers(-10**4, 10**4), st.integers(1, 10**4))
def test_iatan2_within_half_step_below_45(dy, dx):
    if abs(dy) > dx:
        return
    truth = math.degrees(math.atan2(dy, dx)) * 100
    assert abs(iatan2(dy, dx) - truth) <= 12.5 + 1e-6


def test_sin_cos():
    assert sin_cos(0) == (0, ONE)
    assert sin_cos(9000) == (ONE, 0)
    s, c = sin_cos(-3000)
    assert s == -(ONE // 2) and c == SIN_Q16[6000]
    with pytest.raises(ValueError):
        sin_cos(9001)
