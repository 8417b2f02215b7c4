import numpy as np
import pytest

from orlicz_kit.models.schemas import FractionalParams
from orlicz_kit.services.targets import (
    asymptotic_exponent,
    build_H,
    build_hat,
    build_sobolev_conjugate,
    check_integral_conditions,
    compact_target_test,
    double_log_exponent,
    dual_condition,
    inverse_ratio_test,
)
from orlicz_kit.services.young import PowerLog

HAT_CONSTANT = 0.5 * (128.0 / 243.0) ** (1.0 / 3.0)


def test_sobolev_conjugate_of_square(square, half_plane):
    """A_{n/s}(t) = (8/27) t^4 for A = t^2, n = 2, s = 1/2"""
    A_ns = build_sobolev_conjugate(square, half_plane)
    t = 10.0 ** np.arange(-3, 4)
    assert A_ns.evaluate(t) == pytest.approx(8.0 / 27.0 * t ** 4, rel=1e-5)


def test_hat_of_square(square, half_plane):
    """hat A(t) = (1/2)(128/243)^(1/3) t^2 for A = t^2, n = 2, s = 1/2"""
    A_hat = build_hat(square, half_plane)
    t = 10.0 ** np.arange(-3, 4)
    assert A_hat.evaluate(t) == pytest.approx(HAT_CONSTANT * t ** 2, rel=1e-5)


def test_H_is_increasing(square, half_plane):
    """H is strictly increasing with H^{-1}(H(t)) = t"""
    H = build_H(square, half_plane)
    t = np.array([0.1, 1.0, 10.0])
    values = H(t)
    assert np.all(np.diff(values) > 0)
    assert H.inverse(values) == pytest.approx(t, rel=1e-6)


def test_integral_condition_at_zero(square, half_plane):
    """(t / t^2)^(1/3) is integrable at zero"""
    conditions = check_integral_conditions(square, half_plane)
    assert conditions.zero_condition is True


@pytest.mark.parametrize("p, alpha, expected", [(2.0, 1.0, 4.0), (3.0, -1.0, 12.0)])
def test_asymptotic_slopes(half_plane, p, alpha, expected):
    """Log-log slope of A_{n/s} equals np / (n - sp)"""
    slope = asymptotic_exponent(build_sobolev_conjugate(PowerLog(p, alpha), half_plane))
    assert slope == pytest.approx(expected, abs=0.02)


@pytest.mark.parametrize("B, compact", [(PowerLog(3.0), True), (PowerLog(4.0), False),
                                        (PowerLog(4.0, -1.0), True)])
def test_compactness_of_square(square, half_plane, B, compact):
    """t^2 embeds compactly into L^B exactly when B grows more slowly than t^4"""
    evidence = compact_target_test(square, B, half_plane)
    assert evidence.result is compact


def test_fractional_params_validation():
    """s must lie in (0, n)"""
    with pytest.raises(ValueError):
        FractionalParams(n=1, s=1.5)


def test_dual_condition_agrees(square, half_plane):
    """The conjugate form of the zero condition agrees with the direct one"""
    condition, verdict, _ = dual_condition(square, half_plane)
    assert condition is True
    assert verdict == "convergent"
    assert check_integral_conditions(square, half_plane).agree


def test_inverse_ratio_route(square, half_plane):
    """A_{n/s}^{-1} / B^{-1} -> 0 exactly when B grows more slowly than t^4"""
    A_ns = build_sobolev_conjugate(square, half_plane)
    assert inverse_ratio_test(A_ns, PowerLog(3.0))[0] is True
    assert inverse_ratio_test(A_ns, PowerLog(5.0))[0] is False


def test_critical_target_is_exponential(half_plane):
    """For p = n/s at infinity the target grows like exp(t^(n/(n-s)))"""
    A_ns = build_sobolev_conjugate(PowerLog(4.0, p0=2.0), half_plane)
    assert double_log_exponent(A_ns) == pytest.approx(4.0 / 3.0, abs=0.05)
