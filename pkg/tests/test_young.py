import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from orlicz_kit.exceptions import DomainError, ParameterError
from orlicz_kit.models.schemas import Regime
from orlicz_kit.services.young import (
    PowerLog,
    Tabulated,
    conjugate,
    dominates,
    equivalent,
    eval_young,
    generalized_inverse,
    grows_essentially_slower,
    log_inverse,
    matuszewska_index,
    tabulate_young,
    young_density,
    young_from_spec,
    young_to_spec,
)

positive = st.floats(min_value=1e-3, max_value=1e3, allow_nan=False, allow_infinity=False)


def test_power_values(square):
    """t^2 evaluates exactly"""
    assert square.evaluate(np.array([0.0, 1.0, 3.0])) == pytest.approx([0.0, 1.0, 9.0])
    assert young_density(square, 3.0) == pytest.approx(6.0)


def test_tabulated_linear_density():
    """Density a(t) = t integrates to t^2 / 2"""
    A = Tabulated([(0.0, 0.0), (1.0, 1.0)])
    assert eval_young(A, 2.0) == pytest.approx(2.0)


def test_negative_argument_rejected(square):
    """Young functions live on [0, inf)"""
    with pytest.raises(DomainError):
        eval_young(square, -1.0)


def test_invalid_parameters():
    """p < 1 and a decreasing density are rejected"""
    with pytest.raises(ParameterError):
        PowerLog(0.5)
    with pytest.raises(ParameterError):
        Tabulated([(0.0, 1.0), (1.0, 0.5)])


def test_spec_document():
    """JSON documents build the same function as the constructor"""
    A = young_from_spec('{"form": "powerlog", "p": 3}')
    assert eval_young(A, 2.0) == pytest.approx(8.0)
    with pytest.raises(ParameterError):
        young_from_spec({"form": "spline"})


def test_conjugate_of_square(square):
    """conj(t^2) = t^2 / 4"""
    dual = conjugate(square)
    t = np.array([0.1, 1.0, 10.0])
    assert dual.evaluate(t) == pytest.approx(t ** 2 / 4.0, rel=1e-6)


@given(x=positive, y=positive)
@settings(max_examples=100, deadline=None)
def test_young_inequality(x, y):
    """x y <= A(x) + conj A(y)"""
    A = PowerLog(1.5)
    dual = conjugate(A)
    assert x * y <= A(x) + dual(y) + 1e-9 * x * y


@given(x=positive, y=positive)
@settings(max_examples=100, deadline=None)
def test_convexity(x, y):
    """Midpoint convexity of a power-log function"""
    A = PowerLog(2.0, alpha=1.0)
    assert A(0.5 * (x + y)) <= 0.5 * (A(x) + A(y)) * (1.0 + 1e-12)


def test_generalized_inverse(square):
    """sup{t : t^2 <= 9} = 3"""
    assert generalized_inverse(square, 9.0) == pytest.approx(3.0, rel=1e-9)


def test_index_of_power():
    """The index of t^3 is 3"""
    estimate = matuszewska_index(PowerLog(3.0))
    assert estimate.value == pytest.approx(3.0, abs=1e-6)
    with pytest.raises(ParameterError):
        matuszewska_index(PowerLog(3.0), Regime.NEAR_ZERO)


def test_domination(square):
    """t^3 dominates t^2 near infinity but not near zero"""
    cube = PowerLog(3.0)
    assert dominates(square, square).constant == pytest.approx(1.0)
    assert dominates(cube, square, Regime.NEAR_INFINITY).dominates
    assert not dominates(cube, square, Regime.NEAR_ZERO).dominates


def test_equivalent_up_to_scaling(square):
    """t^2 and 2 t^2 dominate each other; the constant is found on the grid 10^(k/20)"""
    double = Tabulated([(0.0, 0.0), (1.0, 4.0)])
    forward, backward = equivalent(square, double)
    assert forward.dominates and backward.dominates
    assert forward.constant == pytest.approx(10.0 ** 0.2)
    assert backward.constant == pytest.approx(1.0)


def test_growth_comparison():
    """t^2 grows essentially more slowly than t^3, not the other way round"""
    assert grows_essentially_slower(PowerLog(2.0), PowerLog(3.0)).result is True
    assert grows_essentially_slower(PowerLog(3.0), PowerLog(2.0)).result is False


def test_small_multiple_does_not_grow_slower():
    """A tiny constant ratio is not a ratio tending to 0"""
    evidence = grows_essentially_slower(PowerLog(3.0, scale=1e-9), PowerLog(3.0))
    assert evidence.result is False
    assert all(r < evidence.epsilon for r in evidence.ratios["1"])
    assert all(np.isinf(c) for c in evidence.crossings.values())


@given(p=st.floats(min_value=1.5, max_value=5.0), k=st.integers(min_value=-12, max_value=0))
@settings(max_examples=25, deadline=None)
def test_equal_growth_is_never_slower(p, k):
    """B = 10^k A grows exactly as fast as A"""
    assert grows_essentially_slower(PowerLog(p, scale=10.0 ** k), PowerLog(p)).result is False


def test_log_correction_grows_slower():
    """t^3 / log(e + t) beats t^3 only past t_max, which the fitted trend reaches"""
    evidence = grows_essentially_slower(PowerLog(3.0, alpha=-1.0), PowerLog(3.0))
    assert evidence.result is True
    assert evidence.ratios["10"][-1] > evidence.epsilon
    assert evidence.crossings["10"] > np.log(evidence.t_max)


def test_spec_round_trip():
    """A power-log function survives its JSON document"""
    A = PowerLog(2.0, alpha=1.0)
    B = young_from_spec(young_to_spec(A))
    t = np.array([0.5, 2.0, 50.0])
    assert B.evaluate(t) == pytest.approx(A.evaluate(t))


def test_tabulate_square(square):
    """Tabulating the density of t^2 reproduces t^2"""
    doc = tabulate_young(square)
    assert doc["form"] == "tabulated"
    assert young_from_spec(doc).evaluate(np.array([1.0, 10.0])) == pytest.approx([1.0, 100.0], rel=1e-9)


def test_log_inverse(square):
    """log A^{-1}(e^v) = v / 2 for t^2"""
    assert log_inverse(square, np.array([np.log(4.0)])) == pytest.approx([np.log(2.0)])
