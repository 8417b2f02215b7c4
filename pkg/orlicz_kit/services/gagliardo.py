import os
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from orlicz_kit.exceptions import ParameterError, PreconditionError
from orlicz_kit.models.grid import GridFunction
from orlicz_kit.models.schemas import (
    FractionalParams,
    ModularResult,
    NormResult,
    TrendReport,
    VerificationReport,
)
from orlicz_kit.services.norms import (
    luxemburg_from_modular,
    luxemburg_from_samples,
    luxemburg_norm,
    lorentz_norm,
    orlicz_lorentz_norm,
    profile_nodes,
)
from orlicz_kit.services.rearrange import symmetric_rearrangement
from orlicz_kit.services.targets import build_hat, build_sobolev_conjugate
from orlicz_kit.services.young import YoungFunction
from orlicz_kit.utils.helpers import (
    C_CAP,
    composite_nodes,
    smallest_constant,
    tail_verdict,
    thread_count,
)

logger = logging.getLogger(__name__)

MC_BUDGET = int(float(os.getenv("ORLICZ_KIT_MC_BUDGET", "2e6")))

# Below this multiple of the cell width differences are replaced by the derivative
LINEAR_CUTOFF = 1e-6
SHALLOW_PANEL = 1.0
JUMP_SPAN = (80.0, 2000.0)
JUMP_PANEL = 2.0
# Inner radius of the Monte Carlo shells, as a fraction of the cell width
SHELL_FLOOR = 1.0 / 16.0
PILOT_FRACTION = 0.05
STABILITY_SHARE = 0.1
MODULAR_REL_TOL = 1e-8
TAIL_WINDOW = (np.log(1e4), np.log(1e16))


def _jump_verdict(A: YoungFunction, s: float) -> Tuple[str, dict]:
    """Convergence of the integral of A(r^-s) over (0, 1), the near-diagonal term of a jump"""
    x = np.linspace(*TAIL_WINDOW, 200)
    return tail_verdict(lambda v: A.log_eval(s * v) - v, x)


def _boundary_verdict(A: YoungFunction, s: float) -> Tuple[str, dict]:
    """Convergence of the integral of Phi(r^-s) over (0, 1), the exterior term at a nonzero boundary value"""
    x = np.linspace(*TAIL_WINDOW, 200)
    return tail_verdict(lambda v: A.log_phi(s * v) - v, x)


@dataclass
class ModularPlan:
    """Fractional modular precomputed as weighted samples.

    modular(lam) = sum of weight_a * A(amp_a / lam) + sum of weight_phi * Phi(amp_phi / lam),
    where Phi(y) is the integral of A(t)/t over (0, y). The same samples serve
    every lam, so seminorm bisections and constant searches reuse one
    quadrature or one Monte Carlo draw.
    """

    A: YoungFunction
    amp_a: np.ndarray
    weight_a: np.ndarray
    amp_phi: np.ndarray
    weight_phi: np.ndarray
    method: str
    resolution: int
    divergent: bool = False
    strata_a: Optional[np.ndarray] = None
    strata_phi: Optional[np.ndarray] = None
    coarse: Optional["ModularPlan"] = None
    neglected: float = 0.0
    details: Dict = field(default_factory=dict)

    def _terms(self, lam: float) -> Tuple[np.ndarray, np.ndarray]:
        with np.errstate(over="ignore", invalid="ignore"):
            ya = self.weight_a * self.A.evaluate(self.amp_a / lam) if self.amp_a.size else np.empty(0)
            yp = self.weight_phi * self.A.phi(self.amp_phi / lam) if self.amp_phi.size else np.empty(0)
        return ya, yp

    def value(self, lam: float = 1.0) -> float:
        if self.divergent:
            return np.inf
        ya, yp = self._terms(lam)
        total = float(ya.sum() + yp.sum())
        return total if np.isfinite(total) else np.inf

    def error(self, lam: float = 1.0) -> float:
        """Standard error (Monte Carlo) or order-comparison error (quadrature)"""
        if self.divergent:
            return np.inf
        if self.method == "monte-carlo":
            ya, yp = self._terms(lam)
            ids = np.concatenate([self.strata_a, self.strata_phi]).astype(int)
            y = np.concatenate([ya, yp])
            counts = np.bincount(ids).astype(float)
            sums = np.bincount(ids, weights=y)
            squares = np.bincount(ids, weights=y * y)
            used = counts > 1
            n = counts[used]
            variance = n / (n - 1.0) * (squares[used] - sums[used] ** 2 / n)
            return float(np.sqrt(max(variance.sum(), 0.0))) + self.neglected
        if self.coarse is not None:
            return abs(self.value(lam) - self.coarse.value(lam)) + self.neglected
        return self.neglected

    def result(self, lam: float = 1.0) -> ModularResult:
        return ModularResult(value=self.value(lam), method=self.method, resolution=self.resolution,
                             error=self.error(lam), divergent=self.divergent)

    def seminorm(self, rel_tol: float = MODULAR_REL_TOL) -> NormResult:
        """inf{lam > 0 : modular(lam) <= 1}"""
        if self.divergent:
            return NormResult(value=np.inf, modular=np.inf, iterations=0)
        amps = np.concatenate([self.amp_a, self.amp_phi])
        if not np.any(amps > 0):
            return NormResult(value=0.0, modular=0.0, iterations=0)
        result = luxemburg_from_modular(self.value, float(np.max(amps)), rel_tol=rel_tol)
        if self.coarse is not None and np.isfinite(result.value) and result.value > 0:
            coarse = self.coarse.seminorm(rel_tol)
            result.quadrature_error = abs(result.value - coarse.value)
        return result


def _samples(parts: List[Tuple[np.ndarray, np.ndarray]]) -> Tuple[np.ndarray, np.ndarray]:
    if not parts:
        return np.empty(0), np.empty(0)
    amp = np.concatenate([np.ravel(a) for a, _ in parts])
    weight = np.concatenate([np.ravel(np.broadcast_to(w, np.shape(a))) for a, w in parts])
    keep = (amp > 0) & (weight > 0)
    return amp[keep], weight[keep]


def _exterior_1d(u: GridFunction, s: float, order: int) -> List[Tuple[np.ndarray, np.ndarray]]:
    """Pairs with one point outside the interval, integrated in closed form over the outside point"""
    (a, b), = u.domain.bounds
    edges = np.linspace(0.0, b - a, u.values.size + 1)
    rho, w = profile_nodes(edges, order)
    parts = []
    for x in (a + rho, b - rho):
        values = np.abs(u.evaluate(x))
        parts.append((values * rho ** (-s), 2.0 * w / s))
    return parts


def _boundary_values(u: GridFunction) -> np.ndarray:
    if u.dim == 1:
        (a, b), = u.domain.bounds
        return np.abs(u.evaluate(np.array([a, b - 1e-12 * (b - a)])))
    if u.domain.kind == "radial":
        return np.abs(u.values[-1:])
    edge = np.concatenate([u.values[0], u.values[-1], u.values[:, 0], u.values[:, -1]])
    return np.abs(edge)


def _step_plan_1d(u: GridFunction, s: float, A: YoungFunction, order: int, whole_space: bool) -> ModularPlan:
    """Exact kernel integration over pairs of cells for a step function"""
    v = u.values
    h = float(u.widths[0])
    count = v.size
    x, w = composite_nodes(np.array([0.0, 0.5, 1.0]), order)
    divergent = False
    parts = []
    details = {}

    if count > 1 and np.any(v[1:] != v[:-1]):
        verdict, diag = _jump_verdict(A, s)
        details["jump_verdict"] = verdict
        if verdict != "convergent":
            divergent = True
        span = JUMP_SPAN[0]
        rate = -diag.get("power", -1.0)
        if rate > 0:
            span = float(np.clip(40.0 / rate, *JUMP_SPAN))
        z_edges = np.arange(np.log(h) - span, np.log(h) + 1e-12, JUMP_PANEL)
        z, wz = composite_nodes(np.append(z_edges[:-1], np.log(h)), max(order, 8))
        near_r = np.concatenate([np.exp(z), h * (1.0 + x)])
        # triangle density g(r) = r on (0, h) and 2h - r on (h, 2h), over the kernel 1/r
        near_w = np.concatenate([wz * np.exp(z), h * w * (1.0 - x) / (1.0 + x)])

    if not divergent:
        for k in range(1, count):
            d = np.abs(v[k:] - v[:-k])
            d = d[d > 0]
            if d.size == 0:
                continue
            if k == 1:
                r, wr = near_r, near_w
            else:
                r = h * np.concatenate([k - 1.0 + x, k + x])
                g = h * np.concatenate([x, 1.0 - x])
                wr = h * np.concatenate([w, w]) * g / r
            parts.append((d[:, None] * r[None, :] ** (-s), 2.0 * wr[None, :]))

    amp_phi, weight_phi = np.empty(0), np.empty(0)
    if whole_space and not divergent:
        if np.any(_boundary_values(u) > 0):
            verdict, _ = _boundary_verdict(A, s)
            details["boundary_verdict"] = verdict
            divergent = verdict != "convergent"
        amp_phi, weight_phi = _samples(_exterior_1d(u, s, order))
    amp_a, weight_a = _samples(parts)
    return ModularPlan(A=A, amp_a=amp_a, weight_a=weight_a, amp_phi=amp_phi, weight_phi=weight_phi,
                       method="tensor-quadrature", resolution=count, divergent=divergent, details=details)


def _slopes_1d(u: GridFunction, x: np.ndarray) -> np.ndarray:
    """Derivative at x: interpolated derivative samples if present, else the slope of the interpolant"""
    centres = u.axes()[0]
    if u.derivative is not None:
        return np.interp(x, centres, u.derivative, left=0.0, right=0.0)
    h = float(u.widths[0])
    slopes = np.diff(u.values) / h
    idx = np.searchsorted(centres, x, side="right") - 1
    inside = (idx >= 0) & (idx < slopes.size)
    return np.where(inside, slopes[np.clip(idx, 0, max(slopes.size - 1, 0))] if slopes.size else 0.0, 0.0)


def _linear_plan_1d(u: GridFunction, s: float, A: YoungFunction, order: int, whole_space: bool) -> ModularPlan:
    """Quadrature in (x, r = y - x) for a continuous piecewise linear function"""
    (a, b), = u.domain.bounds
    h = float(u.widths[0])
    length = b - a
    count = u.values.size
    cell_edges = np.linspace(a, b, count + 1)
    parts = []

    # r in (h * LINEAR_CUTOFF, length), log panels below h
    z_lo = np.log(h * LINEAR_CUTOFF)
    z_edges = np.arange(z_lo, np.log(h) + 1e-12, SHALLOW_PANEL)
    z, wz = composite_nodes(np.append(z_edges[:-1], np.log(h)), order)
    r_edges = np.linspace(h, length, max(2, int(round(length / h)) + 1))
    r_far, w_far = composite_nodes(r_edges, order)
    r_all = np.concatenate([np.exp(z), r_far])
    kernel_w = np.concatenate([wz, w_far / r_far])

    for r, wr in zip(r_all, kernel_w):
        top = b - r
        cells = max(1, int(np.ceil((top - a) / h - 1e-9)))
        x, wx = composite_nodes(np.linspace(a, top, cells + 1), order)
        diff = np.abs(u.evaluate(x + r) - u.evaluate(x))
        parts.append((diff * r ** (-s), 2.0 * wr * wx))

    # r below the cutoff: u(x+r) - u(x) = u'(x) r, integrated in closed form through Phi
    x, wx = composite_nodes(cell_edges, order)
    r_min = h * LINEAR_CUTOFF
    inner = [(np.abs(_slopes_1d(u, x)) * r_min ** (1.0 - s), 2.0 * wx / (1.0 - s))]

    divergent = False
    details = {"r_min": r_min}
    if whole_space:
        if np.any(_boundary_values(u) > 0):
            verdict, _ = _boundary_verdict(A, s)
            details["boundary_verdict"] = verdict
            divergent = verdict != "convergent"
        inner += _exterior_1d(u, s, order)
    amp_a, weight_a = _samples(parts)
    amp_phi, weight_phi = _samples(inner)
    return ModularPlan(A=A, amp_a=amp_a, weight_a=weight_a, amp_phi=amp_phi, weight_phi=weight_phi,
                       method="tensor-quadrature", resolution=count, divergent=divergent, details=details)


class _Geometry:
    """Sampling helpers for 2-D boxes and discs"""

    def __init__(self, u: GridFunction):
        self.u = u
        if u.domain.kind == "radial":
            self.radius = u.domain.bounds[0][1]
            self.measure = np.pi * self.radius ** 2
            self.diameter = 2.0 * self.radius
            self.h = self.radius / u.values.size
        else:
            (self.x0, self.x1), (self.y0, self.y1) = u.domain.bounds
            self.measure = u.domain.measure
            self.diameter = float(np.hypot(self.x1 - self.x0, self.y1 - self.y0))
            self.h = float(np.min(u.widths))

    def sample(self, rng: np.random.Generator, m: int) -> np.ndarray:
        if self.u.domain.kind == "radial":
            r = self.radius * np.sqrt(rng.uniform(size=m))
            t = rng.uniform(0.0, 2.0 * np.pi, m)
            return np.column_stack([r * np.cos(t), r * np.sin(t)])
        return np.column_stack([rng.uniform(self.x0, self.x1, m), rng.uniform(self.y0, self.y1, m)])

    def inside(self, p: np.ndarray) -> np.ndarray:
        if self.u.domain.kind == "radial":
            return np.linalg.norm(p, axis=1) < self.radius
        return (p[:, 0] > self.x0) & (p[:, 0] < self.x1) & (p[:, 1] > self.y0) & (p[:, 1] < self.y1)

    def exit_distance(self, p: np.ndarray, e: np.ndarray) -> np.ndarray:
        """Distance from p to the boundary along direction e (convex domains)"""
        if self.u.domain.kind == "radial":
            pe = np.sum(p * e, axis=1)
            return -pe + np.sqrt(pe ** 2 + self.radius ** 2 - np.sum(p * p, axis=1))
        with np.errstate(divide="ignore"):
            tx = np.where(e[:, 0] > 0, (self.x1 - p[:, 0]) / e[:, 0], (self.x0 - p[:, 0]) / e[:, 0])
            ty = np.where(e[:, 1] > 0, (self.y1 - p[:, 1]) / e[:, 1], (self.y0 - p[:, 1]) / e[:, 1])
        return np.minimum(np.abs(tx), np.abs(ty))


def _directions(rng: np.random.Generator, m: int) -> np.ndarray:
    t = rng.uniform(0.0, 2.0 * np.pi, m)
    return np.column_stack([np.cos(t), np.sin(t)])


def _truncated_mass(shell_estimates: List[float], outer: np.ndarray, rho_min: float) -> float:
    """Modular mass of pairs closer than rho_min, extrapolating the decay of the last full dyadic shells"""
    if len(shell_estimates) < 3:
        return np.inf
    last, before = shell_estimates[-2], shell_estimates[-3]
    if last <= 0:
        return 0.0
    ratio = last / before if before > 0 else 1.0
    if ratio >= 1.0:
        return np.inf
    return float(last * ratio ** np.log2(outer[-2] / rho_min) / (1.0 - ratio))


def _monte_carlo_plan(u: GridFunction, s: float, A: YoungFunction, whole_space: bool,
                      seed: Optional[int], budget: Optional[int]) -> ModularPlan:
    """Stratified Monte Carlo over pairs, strata by dyadic shells of |x - y|"""
    budget = int(budget or MC_BUDGET)
    geo = _Geometry(u)
    sphere = 2.0 * np.pi
    rho_min = geo.h * SHELL_FLOOR
    shells = int(np.ceil(np.log2(geo.diameter / rho_min)))
    outer = geo.diameter * 2.0 ** -np.arange(shells)
    inner = np.maximum(0.5 * outer, rho_min)
    continuous = u.interpolation == "linear"

    divergent = False
    details = {"shells": shells}
    if not continuous and (np.any(np.diff(u.values, axis=0) != 0)
                           or (u.values.ndim == 2 and np.any(np.diff(u.values, axis=1) != 0))):
        verdict, _ = _jump_verdict(A, s)
        details["jump_verdict"] = verdict
        divergent = verdict != "convergent"
    if whole_space and np.any(_boundary_values(u) > 0):
        verdict, _ = _boundary_verdict(A, s)
        details["boundary_verdict"] = verdict
        divergent = divergent or verdict != "convergent"

    # stratum kinds: ("shell", k), ("inner", None), ("exterior", None)
    strata = [("shell", k) for k in range(shells)]
    if continuous:
        strata.append(("inner", None))
    if whole_space:
        strata.append(("exterior", None))

    def draw(stratum, rng, m):
        kind, k = stratum
        x = geo.sample(rng, m)
        e = _directions(rng, m)
        if kind == "shell":
            rho = np.exp(rng.uniform(np.log(inner[k]), np.log(outer[k]), m))
            y = x + rho[:, None] * e
            inside = geo.inside(y)
            diff = np.zeros(m)
            diff[inside] = np.abs(u.evaluate(x[inside]) - u.evaluate(y[inside]))
            return diff * rho ** (-s), geo.measure * sphere * np.log(outer[k] / inner[k]), False
        if kind == "inner":
            eps = geo.h * 1e-4
            slope = np.abs(u.evaluate(x + eps * e) - u.evaluate(x - eps * e)) / (2.0 * eps)
            return slope * rho_min ** (1.0 - s), geo.measure * sphere / (1.0 - s), True
        rho = geo.exit_distance(x, e)
        return np.abs(u.evaluate(x)) * rho ** (-s), 2.0 * geo.measure * sphere / s, True

    def per_sample(amp, factor, integrated):
        with np.errstate(over="ignore", invalid="ignore"):
            return factor * (A.phi(amp) if integrated else A.evaluate(amp))

    seeds = np.random.SeedSequence(seed).spawn(len(strata))
    generators = [np.random.default_rng(sq) for sq in seeds]
    pilot = max(256, int(PILOT_FRACTION * budget / len(strata)))

    with ThreadPoolExecutor(max_workers=thread_count()) as pool:
        first = list(pool.map(lambda i: draw(strata[i], generators[i], pilot), range(len(strata))))
    sigma = np.array([np.std(per_sample(*item)) for item in first])
    remaining = max(0, budget - pilot * len(strata))
    if sigma.sum() > 0:
        extra = np.floor(remaining * sigma / sigma.sum()).astype(int)
    else:
        extra = np.zeros(len(strata), dtype=int)
    with ThreadPoolExecutor(max_workers=thread_count()) as pool:
        second = list(pool.map(lambda i: draw(strata[i], generators[i], int(extra[i])) if extra[i] else None,
                               range(len(strata))))

    amp_a, weight_a, ids_a, amp_phi, weight_phi, ids_phi = [], [], [], [], [], []
    estimates = []
    for i, (pilot_draw, more) in enumerate(zip(first, second)):
        amp, factor, integrated = pilot_draw
        if more is not None:
            amp = np.concatenate([amp, more[0]])
        weight = np.full(amp.size, factor / amp.size)
        estimates.append(float(np.mean(per_sample(amp, factor, integrated))))
        target = (amp_phi, weight_phi, ids_phi) if integrated else (amp_a, weight_a, ids_a)
        target[0].append(amp)
        target[1].append(weight)
        target[2].append(np.full(amp.size, i))

    shell_estimates = estimates[:shells]
    total = sum(estimates)
    if not divergent and total > 0 and np.isfinite(total):
        innermost = shell_estimates[-2:]
        if all(value > STABILITY_SHARE * total for value in innermost):
            logger.warning("Near-diagonal shells do not stabilise; flagging the modular as divergent")
            divergent = True
    details["shell_estimates"] = shell_estimates
    truncated = 0.0 if continuous or divergent else _truncated_mass(shell_estimates, outer, rho_min)
    details["truncated_mass"] = truncated

    def cat(items):
        return np.concatenate(items) if items else np.empty(0)

    return ModularPlan(A=A, amp_a=cat(amp_a), weight_a=cat(weight_a), amp_phi=cat(amp_phi),
                       weight_phi=cat(weight_phi), method="monte-carlo", resolution=budget, divergent=divergent,
                       strata_a=cat(ids_a), strata_phi=cat(ids_phi), neglected=truncated,
                       details=details)


def _require_order(s: float):
    if not 0.0 < s < 1.0:
        raise ParameterError(f"Fractional order s must lie in (0, 1), got {s}")


def modular_plan(u: GridFunction, s: float, A: YoungFunction, whole_space: bool = False, order: int = 4,
                 seed: Optional[int] = None, budget: Optional[int] = None) -> ModularPlan:
    """Precompute the fractional modular of u over the grid domain (or over R^n, u extended by 0)"""
    _require_order(s)
    if u.dim == 2 or u.domain.kind == "radial":
        plan = _monte_carlo_plan(u, s, A, whole_space, seed, budget)
    else:
        build = _linear_plan_1d if u.interpolation == "linear" else _step_plan_1d
        plan = build(u, s, A, order, whole_space)
        plan.coarse = build(u, s, A, max(2, order // 2), whole_space)
    if plan.divergent:
        logger.warning(f"Fractional modular diverges for s={s} and {A!r}")
    return plan


def fractional_modular(u: GridFunction, s: float, A: YoungFunction, lam: float = 1.0, whole_space: bool = False,
                       seed: Optional[int] = None, budget: Optional[int] = None) -> ModularResult:
    """Double integral of A(|u(x) - u(y)| / (lam |x-y|^s)) / |x-y|^n"""
    if not lam > 0:
        raise ParameterError(f"lam must be positive, got {lam}")
    logger.info(f"Computing fractional modular: s={s}, A={A!r}, lam={lam}, cells={u.shape}")
    return modular_plan(u, s, A, whole_space=whole_space, seed=seed, budget=budget).result(lam)


def gagliardo_seminorm(u: GridFunction, s: float, A: YoungFunction, whole_space: bool = False,
                       seed: Optional[int] = None, budget: Optional[int] = None) -> NormResult:
    """inf{lam > 0 : fractional modular at lam <= 1}"""
    return modular_plan(u, s, A, whole_space=whole_space, seed=seed, budget=budget).seminorm()


def sobolev_norm(u: GridFunction, s: float, A: YoungFunction, whole_space: bool = False,
                 seed: Optional[int] = None, budget: Optional[int] = None) -> float:
    """||u||_{L^A} + |u|_{s,A}"""
    return luxemburg_norm(A, u).value + gagliardo_seminorm(u, s, A, whole_space, seed, budget).value


def truncate(u: GridFunction, t: float) -> GridFunction:
    """T_t(u) = min(|u|, t) sign(u)"""
    if t < 0:
        raise ParameterError(f"Truncation level must be non-negative, got {t}")
    return u.with_values(np.minimum(np.abs(u.values), t) * np.sign(u.values))


def median(u: GridFunction) -> float:
    """Smallest level whose super-level set has measure at most half the domain"""
    values = np.sort(u.values.ravel())
    above = values.size - np.searchsorted(values, values, side="right")
    return float(values[np.argmax(above <= values.size / 2.0)])


class AveragedYoung(YoungFunction):
    """bar_A(t) = integral over (0, t) of the spherical average of A(tau |e . w|) dtau / tau, for n = 1"""

    def __init__(self, A: YoungFunction, n: int = 1):
        if n != 1:
            raise ParameterError(f"Averaged Young functions are implemented for n = 1, got n={n}")
        self.base = A

    def evaluate(self, t) -> np.ndarray:
        return 2.0 * self.base.phi(t)

    def density(self, t) -> np.ndarray:
        t = np.atleast_1d(np.asarray(t, dtype=float))
        with np.errstate(divide="ignore", invalid="ignore"):
            out = 2.0 * self.base.evaluate(t) / t
        return np.where(t > 0, out, 0.0)

    def __repr__(self):
        return f"Averaged({self.base!r})"


def verify_polya_szego(u: GridFunction, s: float, A: YoungFunction, seed: Optional[int] = None,
                       budget: Optional[int] = None) -> VerificationReport:
    """Modular of u over R^n is at least that of its symmetric rearrangement"""
    n = 1 if u.dim == 1 and u.domain.kind != "radial" else 2
    star = symmetric_rearrangement(u, n)
    plan_u = modular_plan(u, s, A, whole_space=True, seed=seed, budget=budget)
    plan_star = modular_plan(star, s, A, whole_space=True, seed=seed, budget=budget)
    lhs, rhs = plan_u.value(), plan_star.value()
    budget_used = plan_u.error() + plan_star.error() + 1e-9 * max(abs(rhs), 1.0) if np.isfinite(lhs + rhs) else 0.0
    if not np.isfinite(lhs):
        logger.warning("Modular of u diverges; Polya-Szego check is vacuous")
        passed = True
    else:
        passed = bool(lhs >= rhs - budget_used)
    return VerificationReport(check_id="polya-szego", statement="modular(u) >= modular(u_star)", lhs=lhs,
                              rhs=rhs, passed=passed, error_budget=budget_used,
                              provenance=plan_u.method, details={"s": s, "divergent": not np.isfinite(lhs)})


def _hardy_nodes(u: GridFunction, order: int = 8) -> Tuple[np.ndarray, np.ndarray]:
    """Quadrature nodes over the grid domain, resolving the singularity of |x|^-s at the origin"""
    if u.dim == 1:
        (a, b), = u.domain.bounds
        edges = np.union1d(np.linspace(a, b, u.values.size + 1), [0.0] if a < 0 < b else [])
        points, weights = [], []
        right = edges[edges >= 0]
        left = -edges[edges <= 0][::-1]
        for side, sign in ((right, 1.0), (left, -1.0)):
            if side.size > 1 and side[0] == 0.0:
                r, w = profile_nodes(side, order)
                points.append(sign * r)
                weights.append(w)
            elif side.size > 1:
                r, w = composite_nodes(side, order)
                points.append(sign * r)
                weights.append(w)
        return np.concatenate(points)[:, None], np.concatenate(weights)
    (x0, x1), (y0, y1) = u.domain.bounds
    nx, ny = u.values.shape
    gx, wx = composite_nodes(np.linspace(x0, x1, nx + 1), 4)
    gy, wy = composite_nodes(np.linspace(y0, y1, ny + 1), 4)
    X, Y = np.meshgrid(gx, gy, indexing="ij")
    return np.column_stack([X.ravel(), Y.ravel()]), np.outer(wx, wy).ravel()


def verify_fractional_hardy(u: GridFunction, fp: FractionalParams, A: YoungFunction,
                            A_hat: Optional[YoungFunction] = None, c_cap: float = C_CAP,
                            seed: Optional[int] = None, budget: Optional[int] = None) -> VerificationReport:
    """||u(x) / |x|^s|| in L^hat_A against |u|_{s,A,R^n}, plus the modular form with the (1-s) factor"""
    if not fp.s < 1:
        raise ParameterError(f"Fractional Hardy checks need s < 1, got {fp.s}")
    A_hat = A_hat or build_hat(A, fp)
    points, weights = _hardy_nodes(u)
    radius = np.linalg.norm(points, axis=1)
    amp = np.abs(u.evaluate(points)) * radius ** (-fp.s)
    weighted = luxemburg_from_samples(A_hat, amp, weights)
    plan = modular_plan(u, fp.s, A, whole_space=True, seed=seed, budget=budget)
    seminorm = plan.seminorm()
    ratio = weighted.value / seminorm.value if seminorm.value > 0 else (0.0 if weighted.value == 0 else np.inf)

    with np.errstate(over="ignore"):
        lhs_modular = float(np.dot(weights, A_hat.evaluate(amp)))
    modular_c, _ = smallest_constant(lhs_modular, lambda c: (1.0 - fp.s) * plan.value(1.0 / c), c_max=c_cap)
    logger.info(f"Fractional Hardy ratio {ratio:.6g}, modular constant {modular_c}")
    return VerificationReport(check_id="fractional-hardy", statement="||u / |x|^s||_{hatA} <= C |u|_{s,A,R^n}",
                              lhs=weighted.value, rhs=c_cap * seminorm.value, constant=ratio,
                              passed=bool(ratio <= c_cap), error_budget=plan.error(),
                              provenance=plan.method,
                              details={"seminorm": seminorm.value, "modular_lhs": lhs_modular,
                                       "modular_constant": modular_c, "c_cap": c_cap})


def verify_poincare(u: GridFunction, s: float, A: YoungFunction, c_cap: float = C_CAP,
                    seed: Optional[int] = None, budget: Optional[int] = None) -> VerificationReport:
    """Smallest C with int A(|u - u_mean|) <= modular over the domain at lam = 1/C"""
    plan = modular_plan(u, s, A, seed=seed, budget=budget)
    mean = u.mean()
    centred = u.with_values(u.values - mean)
    lhs = float(u.cell_measure * np.sum(A.evaluate(np.abs(centred.values).ravel())))
    constant, rhs = smallest_constant(lhs, lambda c: plan.value(1.0 / c), budget=0.0, c_max=c_cap)
    if plan.divergent:
        logger.warning("Modular over the domain diverges; Poincare check is vacuous")

    seminorm = plan.seminorm()
    norm_ratio = luxemburg_norm(A, centred).value / seminorm.value if seminorm.value > 0 else 0.0

    med = median(u)
    shifted = np.abs(u.values - med).ravel()
    med_lhs = float(u.cell_measure * np.sum(A.evaluate(shifted)))
    median_constant, _ = smallest_constant(
        med_lhs, lambda c: float(u.cell_measure * np.sum(A.evaluate(c * np.abs(centred.values).ravel()))),
        c_max=c_cap)
    return VerificationReport(check_id="poincare", statement="int A(|u - u_mean|) <= modular(C u)",
                              lhs=lhs, rhs=rhs, constant=constant, passed=constant is not None,
                              error_budget=plan.error(), provenance=plan.method,
                              details={"mean": mean, "median": med, "norm_ratio": norm_ratio,
                                       "median_constant": median_constant, "divergent": plan.divergent,
                                       "c_cap": c_cap})


def verify_norm_by_seminorm(u: GridFunction, s: float, A: YoungFunction, c_cap: float = C_CAP,
                            seed: Optional[int] = None, budget: Optional[int] = None) -> VerificationReport:
    """||u||_{L^A(R^n)} <= C |u|_{s,A,R^n} for u with bounded support"""
    norm = luxemburg_norm(A, u).value
    seminorm = gagliardo_seminorm(u, s, A, whole_space=True, seed=seed, budget=budget).value
    ratio = norm / seminorm if seminorm > 0 else (0.0 if norm == 0 else np.inf)
    return VerificationReport(check_id="norm-by-seminorm", statement="||u||_{L^A} <= C |u|_{s,A,R^n}",
                              lhs=norm, rhs=c_cap * seminorm, constant=ratio, passed=bool(ratio <= c_cap))


def verify_sobolev_embedding(u: GridFunction, fp: FractionalParams, A: YoungFunction,
                             A_ns: Optional[YoungFunction] = None, A_hat: Optional[YoungFunction] = None,
                             c_cap: float = C_CAP, lorentz_exponents: Optional[Tuple[float, float]] = None,
                             seed: Optional[int] = None, budget: Optional[int] = None) -> VerificationReport:
    """Orlicz and Orlicz-Lorentz target norms of u against |u|_{s,A,R^n}"""
    if not fp.s < 1:
        raise ParameterError(f"Embedding checks need s < 1, got {fp.s}")
    A_ns = A_ns or build_sobolev_conjugate(A, fp)
    A_hat = A_hat or build_hat(A, fp)
    orlicz = luxemburg_norm(A_ns, u).value
    lorentz = orlicz_lorentz_norm(A_hat, fp.ratio, u).value
    seminorm = gagliardo_seminorm(u, fp.s, A, whole_space=True, seed=seed, budget=budget).value

    def ratio(x, y):
        return x / y if y > 0 else (0.0 if x == 0 else np.inf)

    orlicz_ratio, lorentz_ratio, kappa = ratio(orlicz, seminorm), ratio(lorentz, seminorm), ratio(orlicz, lorentz)
    details = {"orlicz_norm": orlicz, "lorentz_norm": lorentz, "seminorm": seminorm,
               "orlicz_ratio": orlicz_ratio, "lorentz_ratio": lorentz_ratio, "kappa": kappa, "c_cap": c_cap}
    if lorentz_exponents is not None:
        classical = lorentz_norm(*lorentz_exponents, u).value
        details["classical_lorentz_norm"] = classical
        details["classical_ratio"] = ratio(lorentz, classical)
    passed = max(orlicz_ratio, lorentz_ratio, kappa) <= c_cap
    return VerificationReport(check_id="sobolev-embedding",
                              statement="||u||_{A_{n/s}} <= kappa ||u||_{L(hatA, n/s)} <= C |u|_{s,A}",
                              lhs=lorentz, rhs=c_cap * seminorm, constant=lorentz_ratio, passed=bool(passed),
                              details=details)


def bbm_limit_check(u: GridFunction, A: YoungFunction, s_list: Sequence[float] = (0.9, 0.99, 0.999),
                    lam: float = 1.0) -> TrendReport:
    """(1 - s) * modular over R of u against the integral of bar_A(|u'|), along s_list"""
    if u.derivative is None:
        raise ParameterError("The limit check needs derivative samples")
    if u.dim != 1:
        raise ParameterError("The limit check is implemented for n = 1")
    if u.interpolation != "linear":
        u = GridFunction(domain=u.domain, values=u.values, interpolation="linear", derivative=u.derivative)
    bar_A = AveragedYoung(A)
    (a, b), = u.domain.bounds
    x, wx = composite_nodes(np.linspace(a, b, u.values.size + 1), 4)
    target = float(np.dot(wx, bar_A.evaluate(np.abs(_slopes_1d(u, x)) / lam)))

    scaled, gaps = [], []
    for s in s_list:
        value = (1.0 - s) * fractional_modular(u, s, A, lam=lam, whole_space=True).value
        scaled.append(value)
        gaps.append(abs(value - target) / target if target > 0 else abs(value))
    passed = target == 0 and all(v == 0 for v in scaled) or all(g2 < g1 for g1, g2 in zip(gaps, gaps[1:]))
    logger.info(f"Limit trend gaps along s={list(s_list)}: {gaps}")
    return TrendReport(s_values=list(s_list), scaled_modulars=scaled, target=target, gaps=gaps, passed=bool(passed))
