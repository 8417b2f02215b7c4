import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from orlicz_kit.exceptions import ParameterError
from orlicz_kit.models.grid import GridFunction
from orlicz_kit.models.schemas import Domain
from orlicz_kit.services.rearrange import (
    decreasing_rearrangement,
    dilate,
    equimeasurable,
    hardy_littlewood_check,
    maximal_average,
    symmetric_rearrangement,
)
from orlicz_kit.services.young import PowerLog

values = st.lists(st.floats(min_value=-10, max_value=10, allow_nan=False), min_size=16, max_size=16)


def _grid(v):
    return GridFunction(domain=Domain.interval(0.0, 2.0), values=np.asarray(v))


def test_decreasing_rearrangement():
    """u* sorts |u| in decreasing order with cell-sized steps"""
    profile = decreasing_rearrangement(_grid([1.0, -3.0, 2.0, 0.0] * 4))
    assert profile.values[:4] == pytest.approx([3.0] * 4)
    assert np.all(np.diff(profile.values) <= 0)
    assert profile.total_measure == pytest.approx(2.0)


def test_maximal_average_of_constant(chi_unit):
    """u** of a constant is the constant"""
    profile = maximal_average(decreasing_rearrangement(chi_unit))
    assert profile.values == pytest.approx(np.ones(64))


def test_maximal_average_needs_star():
    """u** is taken of u* only"""
    doublestar = maximal_average(decreasing_rearrangement(_grid(np.arange(16.0))))
    with pytest.raises(ParameterError):
        maximal_average(doublestar)


@pytest.mark.parametrize("n", [1, 2])
def test_symmetric_rearrangement_equimeasurable(n, rng):
    """u and its symmetric rearrangement share the distribution function"""
    u = _grid(rng.standard_normal(16))
    star = symmetric_rearrangement(u, n)
    assert star.total_measure == pytest.approx(u.total_measure)
    assert equimeasurable(u, star)


def test_dilation_of_characteristic(chi_unit):
    """E_{1/2} chi_(0,1) = chi_(0,1/2)"""
    dilated = dilate(chi_unit, 0.5)
    assert dilated.values[:32] == pytest.approx(np.ones(32))
    assert dilated.values[32:] == pytest.approx(np.zeros(32))


@given(u=values, v=values)
@settings(max_examples=50, deadline=None)
def test_hardy_littlewood(u, v):
    """int |uv| <= int u* v*, and the same under A = t^2"""
    assert hardy_littlewood_check(_grid(u), _grid(v)).passed
    assert hardy_littlewood_check(_grid(u), _grid(v), PowerLog(2.0)).passed
