import math

import pytest
from hypothesis import given, strategies as st

from normcat.extreal import INF, ext, leq, sat_sub, to_json

ext_reals = st.one_of(st.floats(min_value=0, max_value=1e6), st.just(INF))


def test_ext_parses_inf_strings():
    assert ext("inf") == INF and ext(" +Inf ") == INF and ext(2) == 2.0


@pytest.mark.parametrize("bad", [-1, "nan", float("nan"), True, "x"])
def test_ext_rejects(bad):
    with pytest.raises(ValueError):
        ext(bad)


def test_leq_with_inf():
    assert leq(INF, INF) and leq(3.0, INF) and not leq(INF, 3.0)
    assert leq(1.0 + 1e-10, 1.0, 1e-9) and not leq(1.1, 1.0, 1e-9)


def test_sat_sub_flags_inf_minus_inf():
    assert sat_sub(INF, INF) == (INF, True)
    assert sat_sub(INF, 1.0) == (INF, False)
    assert sat_sub(1.0, INF) == (-INF, False)


def test_to_json():
    assert to_json(INF) == "inf" and to_json(0.5) == 0.5


@given(ext_reals, ext_reals, ext_reals)
def test_addition_saturates_and_leq_is_monotone(a, b, c):
    s = a + b
    assert not math.isnan(s)
    assert (s == INF) == (a == INF or b == INF)
    if leq(a, b):
        assert leq(a + c, b + c)
