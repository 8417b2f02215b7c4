import numpy as np
import pytest

from orlicz_kit.exceptions import ParameterError, PreconditionError
from orlicz_kit.models.grid import GridFunction
from orlicz_kit.models.schemas import Domain
from orlicz_kit.services.extension import (
    CutoffFunction,
    cross_term_weight,
    cutoff_multiply,
    extend_zero,
    extension_pipeline,
    reflect_extend,
    verify_extend_zero,
    verify_mean_zero_transfer,
    verify_reflection,
)
from orlicz_kit.services.norms import luxemburg_norm

UNIT = Domain.interval(0.0, 1.0)
MIDDLE = Domain.interval(0.25, 0.75)
AMBIENT = Domain.interval(-1.0, 2.0)


@pytest.fixture
def inner_bump():
    """Step function on (0, 1) supported in (1/4, 3/4)"""
    values = np.zeros(16)
    values[4:12] = [0.2, 0.5, 0.9, 1.0, 1.0, 0.8, 0.4, 0.1]
    return GridFunction(domain=UNIT, values=values)


def test_cross_term_weight_on_interval():
    """W = (d0^-s + d1^-s) / s, which is 8 for distances 1/4 and s = 1/2"""
    assert cross_term_weight(UNIT, MIDDLE, 0.5) == pytest.approx(8.0)
    with pytest.raises(PreconditionError):
        cross_term_weight(UNIT, Domain.interval(0.0, 0.5), 0.5)


def test_cross_term_weight_on_square_is_positive():
    """Weight of a centred square is finite and grows as E approaches the boundary"""
    omega = Domain.box(0.0, 1.0, 0.0, 1.0)
    small = cross_term_weight(omega, Domain.box(0.4, 0.6, 0.4, 0.6), 0.5)
    large = cross_term_weight(omega, Domain.box(0.2, 0.8, 0.2, 0.8), 0.5)
    assert 0 < small < large < np.inf


def test_extend_zero_pads_with_zeros(inner_bump, square):
    """E0 u equals u on the domain and 0 elsewhere"""
    extended = extend_zero(inner_bump, MIDDLE, AMBIENT)
    assert extended.values.size == 48
    assert extended.values[16:32] == pytest.approx(inner_bump.values)
    assert np.count_nonzero(extended.values[:16]) == 0
    assert np.count_nonzero(extended.values[32:]) == 0
    assert luxemburg_norm(square, extended).value == pytest.approx(luxemburg_norm(square, inner_bump).value,
                                                                   rel=1e-7)


def test_extend_zero_needs_support_in_E(square):
    """u must vanish outside E"""
    u = GridFunction(domain=UNIT, values=np.ones(16))
    with pytest.raises(PreconditionError):
        extend_zero(u, MIDDLE, AMBIENT)


def test_extend_zero_needs_aligned_ambient(inner_bump):
    """The ambient grid must continue the cells of u"""
    with pytest.raises(ParameterError):
        extend_zero(inner_bump, MIDDLE, Domain.interval(-0.01, 2.0))


def test_verify_extend_zero(inner_bump, square):
    """Ambient modular lies between the domain modular and the domain modular plus the cross bound"""
    report = verify_extend_zero(inner_bump, MIDDLE, AMBIENT, 0.25, square)
    assert report.passed
    assert report.details["cross_bound"] > 0
    assert report.lhs >= report.details["domain_modular"] - report.error_budget
    assert report.details["norm_gap"] == pytest.approx(0.0, abs=1e-6)


def test_reflection_of_identity():
    """Even reflection of x on (0, 1) is |x| on (-1, 1)"""
    u = GridFunction.from_callable(lambda x: x, UNIT, 8)
    reflected = reflect_extend(u)
    assert reflected.domain.bounds[0] == pytest.approx((-1.0, 1.0))
    assert reflected.values == pytest.approx(np.abs(reflected.axes()[0]))


def test_reflection_needs_hyperplane_at_zero():
    """The reflecting coordinate must start at 0"""
    u = GridFunction(domain=Domain.interval(0.5, 1.0), values=np.ones(4))
    with pytest.raises(ParameterError):
        reflect_extend(u)


def test_verify_reflection(square):
    """modular(E1 u) <= 4 modular(u) and ||E1 u|| = sqrt(2) ||u|| for A = t^2"""
    u = GridFunction.from_callable(lambda x: x, UNIT, 16)
    report = verify_reflection(u, 0.25, square)
    assert report.passed
    assert report.details["symmetric"] is True
    assert report.details["norm_full"] == pytest.approx(np.sqrt(2.0) * report.details["norm_half"], rel=1e-6)


def test_cutoff_by_one_is_identity(tent, square):
    """zeta = 1 leaves u unchanged with C = 1"""
    product, report = cutoff_multiply(tent, CutoffFunction.constant(1.0), 0.5, square)
    assert product.values == pytest.approx(tent.values)
    assert report.passed
    assert report.constant == pytest.approx(1.0, rel=1e-6)


def test_cutoff_by_zero(tent, square):
    """zeta = 0 gives the zero function"""
    product, report = cutoff_multiply(tent, CutoffFunction.constant(0.0), 0.5, square)
    assert np.count_nonzero(product.values) == 0
    assert report.passed


def test_cutoff_validation():
    """Cutoffs must take values in [0, 1] and respect their Lipschitz constant"""
    with pytest.raises(PreconditionError):
        CutoffFunction.constant(2.0).validate(UNIT, seed=0)
    steep = CutoffFunction(evaluator=lambda p: np.clip(10.0 * p[:, 0], 0.0, 1.0), lipschitz=1.0)
    with pytest.raises(PreconditionError):
        steep.validate(UNIT, seed=0)
    with pytest.raises(ParameterError):
        CutoffFunction.ramp(0.5, 0.25)


def test_ramp_values():
    """The ramp is 1 on the plateau, 0 past the support and linear in between"""
    zeta = CutoffFunction.ramp(0.25, 0.75)
    assert zeta(np.array([0.0, 0.25, 0.5, 0.75, 1.0])) == pytest.approx([1.0, 1.0, 0.5, 0.0, 0.0])
    assert zeta.lipschitz == pytest.approx(2.0)
    zeta.validate(UNIT, seed=0)


def test_extension_pipeline_restricts_to_u(tent, square):
    """E u equals u on (0, 1) and has a finite norm ratio"""
    extended, report = extension_pipeline(tent, 0.5, square)
    assert extended.domain.bounds[0] == pytest.approx((-1.0, 2.0))
    assert report.details["restriction_error"] <= 1e-12
    assert report.passed
    assert 0 < report.constant < np.inf


def test_extension_pipeline_needs_unit_interval(square):
    """Only u on (0, 1) is extended"""
    u = GridFunction(domain=Domain.interval(0.0, 2.0), values=np.ones(8))
    with pytest.raises(ParameterError):
        extension_pipeline(u, 0.5, square)


def test_mean_zero_transfer(tent, square):
    """The seminorm of the extension of a centred tent is controlled on (0, 1)"""
    report = verify_mean_zero_transfer(tent, 0.5, square)
    assert report.passed
    assert 0 < report.constant < np.inf
    assert report.details["mean"] == pytest.approx(tent.mean())


def test_reflection_of_square():
    """On a box the reflection acts on the last coordinate"""
    u = GridFunction.from_callable(lambda x, y: x + y, Domain.box(0.0, 1.0, 0.0, 1.0), 4)
    reflected = reflect_extend(u)
    assert reflected.shape == (4, 8)
    assert reflected.domain.bounds[1] == pytest.approx((-1.0, 1.0))
    assert reflected.values == pytest.approx(np.flip(reflected.values, axis=-1))
