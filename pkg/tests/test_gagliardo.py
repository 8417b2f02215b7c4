import numpy as np
import pytest

from orlicz_kit.exceptions import ParameterError
from orlicz_kit.models.grid import GridFunction
from orlicz_kit.models.schemas import Domain, FractionalParams
from orlicz_kit.services.gagliardo import (
    AveragedYoung,
    _truncated_mass,
    bbm_limit_check,
    fractional_modular,
    gagliardo_seminorm,
    median,
    modular_plan,
    sobolev_norm,
    truncate,
    verify_fractional_hardy,
    verify_norm_by_seminorm,
    verify_poincare,
    verify_polya_szego,
    verify_sobolev_embedding,
)
from orlicz_kit.services.young import PowerLog


def _tent(a: float, b: float, cells: int) -> GridFunction:
    return GridFunction.from_callable(lambda x: np.clip(1.0 - np.abs(2.0 * x - 1.0), 0.0, None),
                                      Domain.interval(a, b), cells, interpolation="linear")


def test_modular_of_characteristic(square):
    """Jump modular of chi_(0,1) inside (-1, 2) for s = 1/4 is 4 (8 - 4 sqrt 2)"""
    u = GridFunction.from_callable(lambda x: ((x > 0) & (x < 1)).astype(float), Domain.interval(-1.0, 2.0), 150)
    result = fractional_modular(u, 0.25, square)
    assert result.method == "tensor-quadrature"
    assert not result.divergent
    assert result.value == pytest.approx(4.0 * (8.0 - 4.0 * np.sqrt(2.0)), rel=1e-2)


def test_jump_diverges_for_large_s(square):
    """A jump has infinite modular once 2s >= 1 for A = t^2"""
    u = GridFunction(domain=Domain.interval(0.0, 1.0), values=np.array([0.0, 1.0, 1.0, 0.0]))
    result = fractional_modular(u, 0.75, square)
    assert result.divergent
    assert result.value == np.inf


def test_seminorm_of_tent_against_dense_sum(square):
    """Seminorm of a tent agrees with a dense midpoint double sum"""
    count = 1500
    h = 3.0 / count
    x = -1.0 + (np.arange(count) + 0.5) * h
    u = np.clip(1.0 - np.abs(2.0 * x - 1.0), 0.0, None)
    with np.errstate(divide="ignore", invalid="ignore"):
        quotient = (u[:, None] - u[None, :]) ** 2 / (x[:, None] - x[None, :]) ** 2
    np.fill_diagonal(quotient, 0.0)
    slope_squared = np.where((x > 0) & (x < 1), 4.0, 0.0)
    oracle = h * h * (quotient.sum() + slope_squared.sum())

    seminorm = gagliardo_seminorm(_tent(-1.0, 2.0, 300), 0.5, square)
    assert seminorm.value == pytest.approx(np.sqrt(oracle), rel=2e-2)


def test_modular_scales_for_power(square):
    """For A = t^2 the modular at lam is the modular at 1 over lam^2"""
    plan = modular_plan(_tent(0.0, 1.0, 32), 0.5, square)
    assert plan.value(2.0) == pytest.approx(plan.value(1.0) / 4.0, rel=1e-9)
    assert plan.seminorm().value == pytest.approx(np.sqrt(plan.value(1.0)), rel=1e-7)


def test_whole_space_adds_exterior(square):
    """The modular over R is at least the modular over the interval"""
    u = _tent(0.0, 1.0, 32)
    inside = fractional_modular(u, 0.5, square).value
    everywhere = fractional_modular(u, 0.5, square, whole_space=True).value
    assert everywhere > inside > 0


def test_invalid_orders(square):
    """s must lie in (0, 1) and lam must be positive"""
    u = _tent(0.0, 1.0, 16)
    with pytest.raises(ParameterError):
        fractional_modular(u, 1.0, square)
    with pytest.raises(ParameterError):
        fractional_modular(u, 0.5, square, lam=0.0)


def test_sobolev_norm_adds_parts(square):
    """||u||_W = ||u||_A + |u|_{s,A}"""
    u = _tent(0.0, 1.0, 32)
    seminorm = gagliardo_seminorm(u, 0.5, square).value
    assert sobolev_norm(u, 0.5, square) > seminorm > 0


def test_truncate_and_median():
    """T_t clips |u| at t keeping the sign; the median splits the measure"""
    u = GridFunction(domain=Domain.interval(0.0, 1.0), values=np.array([-3.0, 1.0, 2.0, 4.0]))
    assert truncate(u, 1.5).values == pytest.approx([-1.5, 1.0, 1.5, 1.5])
    assert median(GridFunction(domain=Domain.interval(0.0, 1.0), values=np.array([4.0, 1.0, 3.0, 2.0]))) == 2.0
    with pytest.raises(ParameterError):
        truncate(u, -1.0)


def test_averaged_young_of_square(square):
    """bar A = A for A = t^2 and n = 1"""
    bar = AveragedYoung(square)
    t = np.array([0.1, 1.0, 5.0])
    assert bar.evaluate(t) == pytest.approx(t ** 2, rel=1e-6)
    with pytest.raises(ParameterError):
        AveragedYoung(square, n=2)


def test_polya_szego_on_steps(rng):
    """Symmetric rearrangement does not increase the modular"""
    A = PowerLog(1.5)
    for _ in range(3):
        u = GridFunction(domain=Domain.interval(0.0, 1.0), values=rng.uniform(-1.0, 1.0, 8))
        report = verify_polya_szego(u, 0.25, A)
        assert report.passed
        assert report.lhs >= report.rhs - report.error_budget


def test_poincare_constant_is_found(square):
    """Poincare inequality holds with a finite constant for a tent"""
    report = verify_poincare(_tent(0.0, 1.0, 32), 0.5, square)
    assert report.passed
    assert report.constant is not None and report.constant > 0
    assert 0 < report.details["median"] < 1


def test_fractional_hardy_on_the_line(square):
    """u / |x|^s is controlled by the whole-line seminorm"""
    u = GridFunction.from_callable(lambda x: np.clip(1.0 - np.abs(x), 0.0, None), Domain.interval(-1.0, 1.0), 64,
                                   interpolation="linear")
    report = verify_fractional_hardy(u, FractionalParams(n=1, s=0.25), square)
    assert report.passed
    assert report.details["modular_constant"] is not None


def test_sobolev_embedding_on_the_line(square):
    """Orlicz and Orlicz-Lorentz targets are controlled by the seminorm"""
    u = GridFunction.from_callable(lambda x: np.clip(1.0 - np.abs(x), 0.0, None), Domain.interval(-1.0, 1.0), 64,
                                   interpolation="linear")
    report = verify_sobolev_embedding(u, FractionalParams(n=1, s=0.25), square)
    assert report.passed
    assert 0 < report.details["kappa"] < np.inf


def test_limit_trend(square, smooth_bump):
    """(1 - s) times the modular approaches the integral of |u'|^2"""
    trend = bbm_limit_check(smooth_bump, square)
    assert trend.target == pytest.approx(np.pi ** 2 / 2.0, rel=2e-2)
    assert trend.gaps[-1] < trend.gaps[0]


def test_limit_needs_derivative(square):
    """Derivative samples are required"""
    with pytest.raises(ParameterError):
        bbm_limit_check(_tent(0.0, 1.0, 16), square)


def test_monte_carlo_is_reproducible(square):
    """Same seed, same 2-D modular"""
    u = GridFunction.from_callable(lambda x, y: np.sin(np.pi * x) * np.sin(np.pi * y), Domain.box(0, 1, 0, 1), 16,
                                   interpolation="linear")
    first = fractional_modular(u, 0.5, square, seed=7, budget=20000)
    second = fractional_modular(u, 0.5, square, seed=7, budget=20000)
    assert first.method == "monte-carlo"
    assert first.value == second.value
    assert first.value > 0 and first.error < first.value


def test_norm_by_seminorm(square):
    """||u||_A <= C |u|_{s,A,R} with a ratio invariant under scaling for A = t^2"""
    u = _tent(0.0, 1.0, 32)
    report = verify_norm_by_seminorm(u, 0.5, square)
    assert report.passed
    assert 0 < report.constant < np.inf
    assert verify_norm_by_seminorm(u.scaled(3.0), 0.5, square).constant == pytest.approx(report.constant, rel=1e-5)


def test_truncated_mass_extrapolates_shells():
    """Halving shells below outer radius 1/4 leave 2 * 0.4 / (1 - 1/2) under rho_min = 0.1"""
    outer = np.array([1.0, 0.5, 0.25, 0.125])
    assert _truncated_mass([8.0, 4.0, 2.0, 1.0], outer, 0.1) == pytest.approx(1.6)
    assert _truncated_mass([0.0, 0.0, 0.0, 0.0], outer, 0.1) == 0.0
    assert np.isinf(_truncated_mass([1.0, 1.0, 1.0, 1.0], outer, 0.1))
    assert np.isinf(_truncated_mass([2.0, 1.0], outer[:2], 0.1))


def test_monte_carlo_budget_counts_near_diagonal(square):
    """Continuous u has an inner stratum; step u carries the pairs below the last shell in its error"""
    box = Domain.box(0, 1, 0, 1)
    smooth = GridFunction.from_callable(lambda x, y: x * y, box, 8, interpolation="linear")
    plan = modular_plan(smooth, 0.25, square, seed=3, budget=20000)
    assert plan.details["truncated_mass"] == 0.0
    assert plan.neglected == 0.0
    steps = GridFunction.from_callable(lambda x, y: (x < 0.5) * 1.0, box, 8)
    plan = modular_plan(steps, 0.25, square, seed=3, budget=20000)
    assert plan.neglected == plan.details["truncated_mass"]
    assert plan.error() >= plan.neglected
