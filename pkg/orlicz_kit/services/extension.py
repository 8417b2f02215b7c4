import logging
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np

from orlicz_kit.exceptions import ParameterError, PreconditionError
from orlicz_kit.models.grid import GridFunction
from orlicz_kit.models.schemas import Domain, VerificationReport
from orlicz_kit.services.gagliardo import modular_plan, sobolev_norm, verify_poincare
from orlicz_kit.services.norms import luxemburg_norm
from orlicz_kit.services.young import YoungFunction
from orlicz_kit.utils.helpers import C_CAP, composite_nodes, smallest_constant

logger = logging.getLogger(__name__)

ALIGN_TOL = 1e-9
# Monte Carlo errors enter the budgets at this many standard errors
MC_SIGMAS = 3.0


@dataclass(frozen=True)
class CutoffFunction:
    """Lipschitz cutoff with values in [0, 1].

    The evaluator takes points of shape (m, dim) and returns m values.
    """

    evaluator: Callable[[np.ndarray], np.ndarray]
    lipschitz: float

    def __post_init__(self):
        if not self.lipschitz >= 0:
            raise ParameterError(f"Lipschitz constant must be non-negative, got {self.lipschitz}")

    def __call__(self, points) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        return np.asarray(self.evaluator(pts), dtype=float) * np.ones(len(pts))

    def validate(self, domain: Domain, samples: int = 2000, seed: Optional[int] = None) -> None:
        """Check the range and the Lipschitz bound at random points and pairs of the domain"""
        rng = np.random.default_rng(seed)
        lo = np.array([b[0] for b in domain.bounds])
        hi = np.array([b[1] for b in domain.bounds])
        x = rng.uniform(lo, hi, (samples, lo.size))
        y = rng.uniform(lo, hi, (samples, lo.size))
        zx, zy = self(x), self(y)
        if np.any(zx < -ALIGN_TOL) or np.any(zx > 1.0 + ALIGN_TOL):
            raise PreconditionError("Cutoff values must lie in [0, 1]")
        distance = np.linalg.norm(x - y, axis=1)
        if np.any(np.abs(zx - zy) > self.lipschitz * distance * (1.0 + 1e-9) + ALIGN_TOL):
            raise PreconditionError(f"Cutoff is not {self.lipschitz}-Lipschitz at sampled pairs")

    @classmethod
    def constant(cls, value: float) -> "CutoffFunction":
        return cls(evaluator=lambda p: np.full(len(p), value), lipschitz=0.0)

    @classmethod
    def ramp(cls, plateau: float, support: float, center: float = 0.0) -> "CutoffFunction":
        """1 for |x - center| <= plateau, 0 beyond support, linear in between"""
        if not 0 <= plateau < support:
            raise ParameterError(f"Ramp needs 0 <= plateau < support, got {plateau}, {support}")
        slope = 1.0 / (support - plateau)

        def evaluate(p):
            r = np.linalg.norm(p - center, axis=1)
            return np.clip(slope * (support - r), 0.0, 1.0)

        return cls(evaluator=evaluate, lipschitz=slope)


def _box_bounds(domain: Domain) -> np.ndarray:
    if domain.kind not in ("interval", "box"):
        raise ParameterError(f"Extension works on intervals and boxes, got {domain.kind}")
    return np.array(domain.bounds, dtype=float)


def _embed(u: GridFunction, ambient: Domain) -> GridFunction:
    """u on a larger grid with the same cell widths, zero on the added cells"""
    inner, outer = _box_bounds(u.domain), _box_bounds(ambient)
    if inner.shape != outer.shape:
        raise ParameterError("Ambient domain has a different dimension")
    widths = u.widths
    slices, shape = [], []
    for axis, w in enumerate(widths):
        offset = (inner[axis, 0] - outer[axis, 0]) / w
        count = (outer[axis, 1] - outer[axis, 0]) / w
        if (inner[axis, 0] < outer[axis, 0] or inner[axis, 1] > outer[axis, 1]
                or abs(offset - round(offset)) > ALIGN_TOL or abs(count - round(count)) > ALIGN_TOL):
            raise ParameterError(f"Ambient grid along axis {axis} is not aligned with the cells of u")
        start = int(round(offset))
        slices.append(slice(start, start + u.shape[axis]))
        shape.append(int(round(count)))
    values = np.zeros(shape)
    values[tuple(slices)] = u.values
    derivative = None
    if u.derivative is not None:
        derivative = np.zeros(shape)
        derivative[tuple(slices)] = u.derivative
    return GridFunction(domain=ambient, values=values, interpolation=u.interpolation, derivative=derivative)


def _support_gap(u: GridFunction, E: Domain) -> float:
    """dist(E, boundary of the domain of u), less one cell for the spread of the interpolant"""
    inner, box = _box_bounds(E), _box_bounds(u.domain)
    gap = float(min(np.min(inner[:, 0] - box[:, 0]), np.min(box[:, 1] - inner[:, 1])))
    return gap - float(np.max(u.widths))


def _check_support(u: GridFunction, E: Domain):
    centres = u.centers()
    inner = _box_bounds(E)
    inside = np.all((centres >= inner[:, 0]) & (centres <= inner[:, 1]), axis=1)
    if np.any(u.values.ravel()[~inside] != 0):
        raise PreconditionError("u must vanish outside E")


def _support_hull(u: GridFunction) -> Domain:
    """Smallest interval of whole cells holding the nonzero values of a 1-D grid function"""
    centres = u.axes()[0]
    half = 0.5 * float(u.widths[0])
    nonzero = centres[u.values != 0]
    if nonzero.size == 0:
        mid = float(np.mean(u.domain.bounds[0]))
        return Domain.interval(mid - half, mid + half)
    return Domain.interval(float(nonzero[0]) - half, float(nonzero[-1]) + half)


def cross_term_weight(omega: Domain, E: Domain, s: float, panels: int = 64, order: int = 8) -> float:
    """Integral of dist(y, E)^(-n-s) over the complement of omega.

    Closed form for intervals; for boxes a polar quadrature around the centre
    of E up to a radius R, and an upper bound in closed form beyond it.
    """
    if not 0.0 < s < 1.0:
        raise ParameterError(f"Fractional order s must lie in (0, 1), got {s}")
    box, inner = _box_bounds(omega), _box_bounds(E)
    if np.any(inner[:, 0] <= box[:, 0]) or np.any(inner[:, 1] >= box[:, 1]):
        raise PreconditionError("E must lie at positive distance from the boundary")
    if box.shape[0] == 1:
        left, right = inner[0, 0] - box[0, 0], box[0, 1] - inner[0, 1]
        return float((left ** -s + right ** -s) / s)

    centre = inner.mean(axis=1)
    half = 0.5 * (inner[:, 1] - inner[:, 0])
    r_e = float(np.hypot(*half))
    R = 8.0 * float(np.max(np.abs(box - centre[:, None])) * np.sqrt(2.0))

    theta, w_theta = composite_nodes(np.linspace(0.0, 2.0 * np.pi, panels + 1), order)
    e = np.column_stack([np.cos(theta), np.sin(theta)])
    with np.errstate(divide="ignore"):
        tx = np.where(e[:, 0] > 0, box[0, 1] - centre[0], box[0, 0] - centre[0]) / e[:, 0]
        ty = np.where(e[:, 1] > 0, box[1, 1] - centre[1], box[1, 0] - centre[1]) / e[:, 1]
    start = np.minimum(np.abs(tx), np.abs(ty))

    u_nodes, u_weights = composite_nodes(np.linspace(0.0, 1.0, 41), order)
    total = 0.0
    for direction, rho0, wt in zip(e, start, w_theta):
        # geometric spacing between the exit point and R
        rho = rho0 * (R / rho0) ** u_nodes
        jac = rho * np.log(R / rho0)
        y = centre + rho[:, None] * direction
        gap = np.maximum(np.abs(y - centre) - half, 0.0)
        dist = np.linalg.norm(gap, axis=1)
        total += wt * float(np.sum(u_weights * jac * rho * dist ** (-2.0 - s)))
    tail = 2.0 * np.pi * ((R - r_e) ** -s / s + r_e * (R - r_e) ** (-1.0 - s) / (1.0 + s))
    return float(total + tail)


def extend_zero(u: GridFunction, E: Domain, ambient: Domain) -> GridFunction:
    """Extension by zero from the domain of u to an aligned ambient box; u must vanish off E"""
    _check_support(u, E)
    if _support_gap(u, E) <= 0:
        raise PreconditionError("E must keep at least one cell of distance from the boundary")
    logger.info(f"Extending by zero from {u.domain.bounds} to {ambient.bounds}")
    return _embed(u, ambient)


def _budget(plan) -> float:
    error = plan.error()
    return MC_SIGMAS * error if plan.method == "monte-carlo" else error


def verify_extend_zero(u: GridFunction, E: Domain, ambient: Domain, s: float, A: YoungFunction,
                       seed: Optional[int] = None, budget: Optional[int] = None) -> VerificationReport:
    """modular(ext u, ambient) <= modular(u, domain) + bound on the pairs leaving the domain.

    For |x - y| >= d, convexity gives A(t / |x-y|^s) <= (d / |x-y|)^s A(t / d^s), so the
    cross term is at most 2 d^s W int A(|u| / d^s) with W the weight of cross_term_weight.
    """
    extended = extend_zero(u, E, ambient)
    d = _support_gap(u, E)
    inner = _box_bounds(E)
    cell = float(np.max(u.widths))
    grown = Domain(kind=u.domain.kind, bounds=[(lo - cell, hi + cell) for lo, hi in inner])
    weight = cross_term_weight(u.domain, grown, s)
    local = float(u.cell_measure * np.sum(A.evaluate(np.abs(u.values).ravel() / d ** s)))
    cross = 2.0 * d ** s * weight * local

    outer_plan = modular_plan(extended, s, A, seed=seed, budget=budget)
    inner_plan = modular_plan(u, s, A, seed=seed, budget=budget)
    lhs, base = outer_plan.value(), inner_plan.value()
    error_budget = _budget(outer_plan) + _budget(inner_plan)
    norm_gap = abs(luxemburg_norm(A, extended).value - luxemburg_norm(A, u).value)
    passed = lhs <= base + cross + error_budget and lhs >= base - error_budget
    logger.info(f"Zero extension: ambient modular {lhs:.6g}, domain modular {base:.6g}, cross bound {cross:.6g}")
    return VerificationReport(check_id="extend-zero", statement="modular(E0 u) <= modular(u) + cross term",
                              lhs=lhs, rhs=base + cross, passed=bool(passed), error_budget=error_budget,
                              provenance=outer_plan.method,
                              details={"domain_modular": base, "cross_bound": cross, "cross_weight": weight,
                                       "distance": d, "norm_gap": norm_gap})


def reflect_extend(u: GridFunction) -> GridFunction:
    """Even reflection across {x_n = 0} of u given on the upper half box"""
    box = _box_bounds(u.domain)
    if box[-1, 0] != 0.0:
        raise ParameterError("The last coordinate range must start at the reflecting hyperplane 0")
    bounds = [tuple(b) for b in box[:-1]] + [(-box[-1, 1], box[-1, 1])]
    values = np.concatenate([np.flip(u.values, axis=-1), u.values], axis=-1)
    derivative = None
    if u.derivative is not None and u.dim == 1:
        derivative = np.concatenate([-np.flip(u.derivative), u.derivative])
    domain = Domain(kind=u.domain.kind, bounds=bounds)
    return GridFunction(domain=domain, values=values, interpolation=u.interpolation, derivative=derivative)


def verify_reflection(u: GridFunction, s: float, A: YoungFunction, seed: Optional[int] = None,
                      budget: Optional[int] = None) -> VerificationReport:
    """modular(E1 u, Q) <= 4 modular(u, Q+) and ||E1 u||_A <= 2 ||u||_A"""
    reflected = reflect_extend(u)
    symmetric = bool(np.array_equal(reflected.values, np.flip(reflected.values, axis=-1)))
    full_plan = modular_plan(reflected, s, A, seed=seed, budget=budget)
    half_plan = modular_plan(u, s, A, seed=seed, budget=budget)
    lhs, rhs = full_plan.value(), 4.0 * half_plan.value()
    error_budget = _budget(full_plan) + 4.0 * _budget(half_plan)
    norm_full, norm_half = luxemburg_norm(A, reflected).value, luxemburg_norm(A, u).value
    norms_ok = norm_full <= 2.0 * norm_half * (1.0 + 1e-6)
    passed = symmetric and norms_ok and lhs <= rhs + error_budget
    return VerificationReport(check_id="reflect", statement="modular(E1 u, Q) <= 4 modular(u, Q+)",
                              lhs=lhs, rhs=rhs, passed=bool(passed), error_budget=error_budget,
                              provenance=full_plan.method,
                              details={"symmetric": symmetric, "norm_full": norm_full, "norm_half": norm_half})


def cutoff_multiply(u: GridFunction, zeta: CutoffFunction, s: float, A: YoungFunction, c_cap: float = C_CAP,
                    seed: Optional[int] = None, budget: Optional[int] = None
                    ) -> Tuple[GridFunction, VerificationReport]:
    """zeta * u with the smallest C found for ||zeta u||_W <= C ||u||_W"""
    zeta.validate(u.domain, seed=seed)
    centres = u.centers()
    if u.domain.kind == "radial":
        centres = np.column_stack([centres[:, 0], np.zeros(len(centres))])
    product = GridFunction(domain=u.domain, values=u.values * zeta(centres).reshape(u.shape),
                           interpolation=u.interpolation)
    lhs = sobolev_norm(product, s, A, seed=seed, budget=budget)
    base = sobolev_norm(u, s, A, seed=seed, budget=budget)
    constant, rhs = smallest_constant(lhs, lambda c: c * base, tolerance=1e-9, c_max=c_cap)
    logger.info(f"Cutoff multiplication: constant {constant} for Lipschitz constant {zeta.lipschitz}")
    report = VerificationReport(check_id="cutoff", statement="||zeta u||_W <= C ||u||_W", lhs=lhs, rhs=rhs,
                                constant=constant, passed=constant is not None, tolerance=1e-9,
                                details={"lipschitz": zeta.lipschitz, "norm_u": base, "c_cap": c_cap})
    return product, report


def _mirror(u: GridFunction, point: float) -> GridFunction:
    """u(2 point - x) on the mirrored interval"""
    (a, b), = u.domain.bounds
    derivative = None if u.derivative is None else -np.flip(u.derivative)
    return GridFunction(domain=Domain.interval(2 * point - b, 2 * point - a), values=np.flip(u.values),
                        interpolation=u.interpolation, derivative=derivative)


def _shift(u: GridFunction, offset: float) -> GridFunction:
    (a, b), = u.domain.bounds
    return GridFunction(domain=Domain.interval(a + offset, b + offset), values=u.values,
                        interpolation=u.interpolation, derivative=u.derivative)


def extension_pipeline(u: GridFunction, s: float, A: YoungFunction, c_cap: float = C_CAP,
                       zeta: Optional[CutoffFunction] = None) -> Tuple[GridFunction, VerificationReport]:
    """Extension from (0, 1) to R: cutoff, reflection across each end, zero extension.

    zeta u is reflected across 0 and (1 - zeta) u across 1; both pieces are
    extended by zero to (-1, 2) and summed, so the result equals u on (0, 1).
    """
    if u.dim != 1 or tuple(u.domain.bounds[0]) != (0.0, 1.0):
        raise ParameterError("The extension pipeline works on the interval (0, 1)")
    zeta = zeta or CutoffFunction.ramp(0.25, 0.75)
    ambient = Domain.interval(-1.0, 2.0)
    h = float(u.widths[0])

    near, _ = cutoff_multiply(u, zeta, s, A, c_cap=c_cap)
    far = u.with_values(u.values - near.values)

    left = reflect_extend(near)
    # reflect across 1 by mirroring onto (0, 1), reflecting across 0 and mirroring back
    right = _shift(_mirror(reflect_extend(_mirror(far, 0.5)), 0.0), 1.0)

    pieces = []
    for piece in (left, right):
        try:
            pieces.append(extend_zero(piece, _support_hull(piece), ambient))
        except PreconditionError:
            raise PreconditionError("Cutoff must vanish near 1 and equal 1 near 0 for the pipeline")
    extended = pieces[0].with_values(pieces[0].values + pieces[1].values)

    n = u.values.size
    start = int(round(1.0 / h))
    restriction_error = float(np.max(np.abs(extended.values[start:start + n] - u.values)))
    lhs = sobolev_norm(extended, s, A, whole_space=True)
    base = sobolev_norm(u, s, A)
    ratio = lhs / base if base > 0 else (0.0 if lhs == 0 else np.inf)
    passed = restriction_error <= 1e-12 * max(1.0, float(np.max(np.abs(u.values)))) and ratio <= c_cap
    report = VerificationReport(check_id="extension", statement="||E u||_{W(R)} <= C ||u||_{W(0,1)}", lhs=lhs,
                                rhs=c_cap * base, constant=ratio, passed=bool(passed),
                                details={"restriction_error": restriction_error, "lipschitz": zeta.lipschitz})
    return extended, report


def verify_mean_zero_transfer(u: GridFunction, s: float, A: YoungFunction, c_cap: float = C_CAP
                              ) -> VerificationReport:
    """|E u|_{s,A,R} <= C |u|_{s,A,(0,1)} for u with zero mean; u is centred first"""
    centred = u.with_values(u.values - u.mean())
    extended, _ = extension_pipeline(centred, s, A, c_cap=c_cap)
    outer = modular_plan(extended, s, A, whole_space=True).seminorm().value
    inner = modular_plan(centred, s, A).seminorm().value
    ratio = outer / inner if inner > 0 else (0.0 if outer == 0 else np.inf)
    poincare = verify_poincare(centred, s, A, c_cap=c_cap)
    passed = ratio <= c_cap and poincare.passed
    return VerificationReport(check_id="mean-zero-transfer", statement="|E u|_{s,A,R} <= C |u|_{s,A,(0,1)}",
                              lhs=outer, rhs=c_cap * inner, constant=ratio, passed=bool(passed),
                              details={"poincare_constant": poincare.constant, "mean": u.mean()})
