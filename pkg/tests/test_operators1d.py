import numpy as np
import pytest

from orlicz_kit.exceptions import ParameterError, PreconditionError
from orlicz_kit.models.grid import GridFunction
from orlicz_kit.models.schemas import Domain, FractionalParams
from orlicz_kit.services.gagliardo import fractional_modular
from orlicz_kit.services.operators1d import (
    algebraic_lemma_constant,
    hardy_profile,
    hardy_Ts,
    make_test_function,
    nested_lower_constant,
    radial_profile,
    unit_ball_volume,
    verify_hardy_down,
    verify_hardy_up,
    verify_thmA,
    verify_thmB,
)
from orlicz_kit.services.young import PowerLog

HAT_CONSTANT = 0.5 * (128.0 / 243.0) ** (1.0 / 3.0)


def test_unit_ball_volume():
    """omega_1 = 2, omega_2 = pi"""
    assert unit_ball_volume(1) == pytest.approx(2.0)
    assert unit_ball_volume(2) == pytest.approx(np.pi)


def test_hardy_profile_of_characteristic(chi_unit, half_plane):
    """T_s chi_(0,1)(r) = 4 (1 - r^(1/4)) when s/n = 1/4"""
    profile = hardy_profile(chi_unit, half_plane)
    r = np.array([0.01, 0.3, 0.5, 0.9])
    assert profile.evaluate(r) == pytest.approx(4.0 * (1.0 - r ** 0.25), rel=1e-10)


def test_cell_averages_are_non_increasing(chi_unit, half_plane):
    """T_s of a non-negative function is non-increasing"""
    averages = hardy_Ts(chi_unit, half_plane)
    assert np.all(np.diff(averages.values) <= 0)
    assert averages.values[-1] > 0


def test_hardy_down_holds(square, rng):
    """Modular Hardy inequality with constant 1/s on random steps"""
    f = GridFunction(domain=Domain.interval(0.0, 1.0), values=rng.uniform(0.0, 1.0, 16))
    for s in (0.2, 0.5, 0.8):
        report = verify_hardy_down(square, s, f)
        assert report.passed
        assert report.kind == "L1-modular"
        assert report.constant == pytest.approx(1.0 / s)


def test_hardy_down_rejects_negative_input(square):
    """f must be non-negative"""
    f = GridFunction(domain=Domain.interval(0.0, 1.0), values=np.array([1.0, -1.0]))
    with pytest.raises(PreconditionError):
        verify_hardy_down(square, 0.5, f)


def test_thmA_ratio(square, half_plane, chi_unit):
    """||T_s chi|| in L^{A_4} over ||chi|| in L^2 equals (2048/1890)^(1/4)"""
    report = verify_thmA(square, half_plane, chi_unit)
    assert report.passed
    assert report.constant == pytest.approx((2048.0 / 1890.0) ** 0.25, rel=1e-3)


def test_thmB_ratio(square, half_plane, chi_unit):
    """Orlicz-Lorentz target of chi is sqrt(hat constant * 16/3)"""
    report = verify_thmB(square, half_plane, chi_unit)
    assert report.passed
    assert report.details["lorentz_norm"] == pytest.approx(np.sqrt(HAT_CONSTANT * 16.0 / 3.0), rel=1e-3)
    assert report.details["embedding_constant"] >= 0.1


def test_hardy_up_constant(square, half_plane, chi_unit):
    """Smallest constant is the square root of the hat constant"""
    report = verify_hardy_up(square, half_plane, chi_unit)
    assert report.passed
    assert report.constant == pytest.approx(np.sqrt(HAT_CONSTANT), rel=1e-2)


def test_test_function_shape(chi_unit, half_plane):
    """u is radial, non-negative and peaks at the origin"""
    u = make_test_function(chi_unit, half_plane, cells=32)
    assert u.dim == 2
    assert np.all(u.values >= 0)
    assert u.values.max() == pytest.approx(u.values[15:17, 15:17].max())


def test_test_function_is_continuous(chi_unit, half_plane, square):
    """Test functions interpolate linearly, so their 2-D modular stays finite for s >= 1/2"""
    u = make_test_function(chi_unit, half_plane, cells=16)
    assert u.interpolation == "linear"
    assert fractional_modular(u, 0.6, square, seed=1, budget=20000).divergent is False
    steps = make_test_function(chi_unit, half_plane, cells=16, interpolation="constant")
    assert fractional_modular(steps, 0.6, square, seed=1, budget=20000).divergent is True


def test_test_function_order_bounds(chi_unit, half_plane):
    """m may not exceed [s]"""
    with pytest.raises(ParameterError):
        make_test_function(chi_unit, half_plane, m=1)


def test_test_function_needs_monotone_input(half_plane):
    """f must be non-increasing"""
    f = GridFunction(domain=Domain.interval(0.0, 1.0), values=np.array([0.5, 1.0]))
    with pytest.raises(PreconditionError):
        make_test_function(f, half_plane)


def test_nested_lower_bound(chi_unit):
    """U(a) >= (1/2) of the tail integral from 2a for m = 1"""
    fp = FractionalParams(n=2, s=1.5)
    assert nested_lower_constant(chi_unit, fp, m=1) >= 0.5


def test_algebraic_lemma_constant():
    """The sampled constant is finite, positive and seed-stable"""
    first = algebraic_lemma_constant(2, 1, 0.0, seed=1)
    second = algebraic_lemma_constant(2, 1, 0.0, seed=2)
    assert 0 < first < np.inf
    assert first == pytest.approx(second, rel=0.2)
    with pytest.raises(ParameterError):
        algebraic_lemma_constant(2, 3, 0.0)


def test_power_law_constants_refine(half_plane):
    """The Orlicz target ratio is stable under 2x refinement of a step function"""
    A = PowerLog(2.0)
    coarse = GridFunction(domain=Domain.interval(0.0, 1.0), values=np.array([1.0, 0.6, 0.3, 0.1]))
    fine = coarse.with_values(np.repeat(coarse.values, 2))
    first, second = verify_thmA(A, half_plane, coarse), verify_thmA(A, half_plane, fine)
    assert first.constant == pytest.approx(second.constant, rel=1e-3)


def test_radial_profile_is_decreasing(chi_unit, half_plane):
    """u*(r) of the radial test function is non-negative and non-increasing"""
    profile = radial_profile(chi_unit, half_plane)
    values = profile.evaluate(np.linspace(0.01, 0.99, 25) * profile.total_measure)
    assert np.all(values >= 0)
    assert np.all(np.diff(values) <= 1e-12)
