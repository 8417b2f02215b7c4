import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from orlicz_kit.exceptions import NotNormableError, ParameterError
from orlicz_kit.models.grid import GridFunction
from orlicz_kit.models.schemas import Domain
from orlicz_kit.services.norms import (
    l1_norm,
    lorentz_norm,
    lorentz_zygmund_norm,
    luxemburg_norm,
    orlicz_lorentz_dual_norm,
    orlicz_lorentz_norm,
    orlicz_modular,
)
from orlicz_kit.services.young import PowerLog


def test_luxemburg_of_characteristic(square):
    """||chi_(0,2)|| in L^2 is sqrt(2)"""
    f = GridFunction(domain=Domain.interval(0.0, 2.0), values=np.ones(32))
    assert luxemburg_norm(square, f).value == pytest.approx(np.sqrt(2.0), rel=1e-8)


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
def test_luxemburg_is_p_norm(p, rng):
    """For A = t^p the Luxemburg norm is the L^p norm"""
    f = GridFunction(domain=Domain.interval(0.0, 1.5), values=rng.standard_normal(40))
    exact = (f.cell_measure * np.sum(np.abs(f.values) ** p)) ** (1.0 / p)
    assert luxemburg_norm(PowerLog(p), f).value == pytest.approx(exact, rel=1e-8)


def test_modular_at_the_norm(square, rng):
    """The modular at lam = ||f|| is 1"""
    f = GridFunction(domain=Domain.interval(0.0, 1.0), values=rng.uniform(0.5, 2.0, 16))
    norm = luxemburg_norm(square, f).value
    assert orlicz_modular(square, f, norm) == pytest.approx(1.0, rel=1e-7)


@given(c=st.floats(min_value=1e-2, max_value=1e2))
@settings(max_examples=30, deadline=None)
def test_homogeneity(c):
    """||c f|| = c ||f||"""
    A = PowerLog(2.0, alpha=1.0)
    f = GridFunction(domain=Domain.interval(0.0, 1.0), values=np.linspace(0.1, 1.0, 16))
    assert luxemburg_norm(A, f.scaled(c)).value == pytest.approx(c * luxemburg_norm(A, f).value, rel=1e-7)


def test_lorentz_diagonal_is_lebesgue(chi_unit):
    """L^{2,2} = L^2 and ||chi_(0,1)||_1 = 1"""
    assert lorentz_norm(2.0, 2.0, chi_unit).value == pytest.approx(1.0, rel=1e-6)
    assert l1_norm(chi_unit) == pytest.approx(1.0)


def test_orlicz_lorentz_needs_q_above_one(square, chi_unit):
    """L(A, q) is defined for q > 1"""
    with pytest.raises(ParameterError):
        orlicz_lorentz_norm(square, 1.0, chi_unit)


def test_lorentz_zygmund_examples(chi_unit):
    """sigma = p = 2 gives 1 and sigma = 2, p = 1 gives the integral of r^(-1/2), both for chi_(0,1)"""
    assert lorentz_zygmund_norm(2.0, 2.0, 0.0, 0.0, chi_unit).value == pytest.approx(1.0, rel=1e-6)
    assert lorentz_zygmund_norm(2.0, 1.0, 0.0, 0.0, chi_unit).value == pytest.approx(2.0, rel=1e-4)


def test_lorentz_zygmund_rejects_unsupported_regimes(chi_unit):
    """sigma = inf with gamma + 1/p >= 0 is not accepted"""
    with pytest.raises(NotNormableError):
        lorentz_zygmund_norm(np.inf, 2.0, 0.0, 0.0, chi_unit)


step_values = st.lists(st.integers(min_value=-50, max_value=50).map(lambda k: k / 10.0), min_size=8, max_size=8)


@given(u=step_values, v=step_values)
@settings(max_examples=40, deadline=None)
def test_luxemburg_triangle_inequality(u, v):
    """||u + v|| <= ||u|| + ||v||"""
    A = PowerLog(2.0, alpha=1.0)
    f = GridFunction(domain=Domain.interval(0.0, 1.0), values=np.array(u))
    g = f.with_values(np.array(v))
    total = luxemburg_norm(A, f.with_values(f.values + g.values)).value
    parts = luxemburg_norm(A, f).value + luxemburg_norm(A, g).value
    assert total <= parts * (1.0 + 1e-7) + 1e-12


def test_dual_orlicz_lorentz_of_characteristic(square, chi_unit):
    """chi_(0,1)** = 1 on (0, 1), so the L[t^2, -2] norm is ||r^(1/2)||_{L^2(0,1)} = sqrt(1/2)"""
    assert orlicz_lorentz_dual_norm(square, -2.0, chi_unit).value == pytest.approx(np.sqrt(0.5), rel=1e-4)
    with pytest.raises(ParameterError):
        orlicz_lorentz_dual_norm(square, 2.0, chi_unit)


@given(c=st.floats(min_value=1e-2, max_value=1e2))
@settings(max_examples=20, deadline=None)
def test_dual_orlicz_lorentz_homogeneity(c):
    """||c f||_{L[A, q]} = c ||f||_{L[A, q]}"""
    A = PowerLog(2.0)
    f = GridFunction(domain=Domain.interval(0.0, 1.0), values=np.linspace(1.0, 0.1, 16))
    base = orlicz_lorentz_dual_norm(A, -3.0, f).value
    assert orlicz_lorentz_dual_norm(A, -3.0, f.scaled(c)).value == pytest.approx(c * base, rel=1e-6)
