import json
import logging
import threading
from abc import ABC, abstractmethod
from typing import Iterable, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import ValidationError
from scipy.special import expit

from orlicz_kit.exceptions import DomainError, ParameterError, RangeError, UnsupportedFunctionError
from orlicz_kit.models.schemas import (
    ComparisonVerdict,
    GrowthEvidence,
    IndexEstimate,
    PowerLogSpec,
    Regime,
    TabulatedSpec,
)
from orlicz_kit.utils.helpers import (
    POWER_BAND,
    LogCumulativeIntegral,
    crossing_point,
    fit_slope,
    invert_increasing,
    log_grid,
    stays_bounded,
    tends_to_zero,
    trend_exponents,
)

logger = logging.getLogger(__name__)

REGIME_WINDOWS = {
    Regime.NEAR_ZERO: (1e-8, 1e-2),
    Regime.NEAR_INFINITY: (1e2, 1e8),
    Regime.GLOBAL: (1e-8, 1e8),
}
DOMINATION_SLACK = 1e-9
GROWTH_EPSILON = 1e-3
GROWTH_T_MAX = 1e8

_table_lock = threading.Lock()


class YoungFunction(ABC):
    """Convex A(t) = integral of a non-decreasing left-continuous density a"""

    finite: bool = True
    log_domain: Tuple[float, float] = (-700.0, 700.0)

    @abstractmethod
    def density(self, t) -> np.ndarray:
        ...

    @abstractmethod
    def evaluate(self, t) -> np.ndarray:
        ...

    def density_sup(self) -> float:
        """Supremum of the density over (0, inf)"""
        return float(self.density(np.array([1e300]))[0])

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = self.evaluate(np.atleast_1d(t))
        return float(out[0]) if t.ndim == 0 else out

    def log_eval(self, u) -> np.ndarray:
        """log A(e^u)"""
        u = np.atleast_1d(np.asarray(u, dtype=float))
        with np.errstate(divide="ignore", over="ignore"):
            return np.log(self.evaluate(np.exp(u)))

    def log_density(self, u) -> np.ndarray:
        """log a(e^u)"""
        u = np.atleast_1d(np.asarray(u, dtype=float))
        with np.errstate(divide="ignore", over="ignore"):
            return np.log(self.density(np.exp(u)))

    def log_inverse(self, v) -> np.ndarray:
        """log of sup{t : A(t) <= e^v}, by bisection in the log variable"""
        v = np.atleast_1d(np.asarray(v, dtype=float))
        lo_u, hi_u = self.log_domain
        lo = np.full_like(v, max(lo_u, -700.0))
        hi = np.full_like(v, min(hi_u, 1e16))
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            below = self.log_eval(mid) <= v
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
            if np.all(hi - lo <= 1e-12 * np.maximum(1.0, np.abs(hi))):
                break
        return lo

    def _phi_table(self) -> LogCumulativeIntegral:
        with _table_lock:
            table = self.__dict__.get("_phi")
            if table is None:
                lo, hi = self.log_domain
                table = LogCumulativeIntegral(self.log_eval, u_lo=max(lo, -70.0), u_hi=min(hi, 200.0))
                self.__dict__["_phi"] = table
        return table

    def log_phi(self, u) -> np.ndarray:
        """log of the integral of A(y)/y over (0, e^u)"""
        return self._phi_table()(u)

    def phi(self, y) -> np.ndarray:
        """Integral of A(x)/x over (0, y)"""
        y = np.atleast_1d(np.asarray(y, dtype=float))
        out = np.zeros_like(y)
        positive = y > 0
        if np.any(positive):
            with np.errstate(over="ignore"):
                out[positive] = np.exp(self.log_phi(np.log(y[positive])))
        return out

    def to_spec(self) -> dict:
        return tabulate_young(self)


class PowerLog(YoungFunction):
    """t^p0 log^alpha0(e + 1/t) near zero spliced to t^p log^alpha(e + t) near infinity.

    The near-infinity piece is rescaled at t0 so that the density stays continuous.
    """

    log_domain = (-1e16, 1e16)

    def __init__(self, p: float, alpha: float = 0.0, p0: Optional[float] = None, alpha0: float = 0.0,
                 scale: float = 1.0, t0: float = 1.0):
        try:
            spec = PowerLogSpec(p=p, alpha=alpha, p0=p0, alpha0=alpha0, scale=scale, t0=t0)
        except ValidationError as e:
            raise ParameterError(f"Invalid power-log parameters: {str(e)}")
        self.p = spec.p
        self.alpha = spec.alpha
        self.p0 = spec.p if spec.p0 is None else spec.p0
        self.alpha0 = spec.alpha0
        self.scale = spec.scale
        self.t0 = spec.t0
        self._check_admissible()

        u0 = np.log(self.t0)
        self._log_c = float(self._log_a0(np.array([u0]))[0] - self._log_ainf(np.array([u0]))[0])
        a0_at_t0 = np.exp(self._log_A0(np.array([u0]))[0])
        ainf_at_t0 = np.exp(self._log_Ainf(np.array([u0]))[0])
        self._offset = float(a0_at_t0 * np.exp(-self._log_c) - ainf_at_t0)
        self._check_splice()

    def _check_admissible(self):
        zero_ok = self.p0 > 1 or (self.p0 == 1 and self.alpha0 <= 0)
        infinity_ok = self.p > 1 or (self.p == 1 and self.alpha >= 0)
        if not (zero_ok and infinity_ok):
            raise ParameterError(
                f"Power-log parameters p={self.p}, alpha={self.alpha}, p0={self.p0}, alpha0={self.alpha0} "
                f"do not define a Young function")

    def _check_splice(self):
        u = np.linspace(-40.0, 40.0, 1601)
        logs = self.log_density(u)
        if not np.all(np.isfinite(logs)):
            raise ParameterError("Power-log density is not positive on the sample grid")
        drops = np.diff(logs) < -1e-10 * np.maximum(1.0, np.abs(logs[1:]))
        if np.any(drops):
            where = float(np.exp(u[1:][drops][0]))
            raise ParameterError(f"Spliced density decreases near t={where:.4g}; function is not convex")

    @staticmethod
    def _m(u):
        return np.logaddexp(1.0, -u)

    @staticmethod
    def _ell(u):
        return np.logaddexp(1.0, u)

    def _log_A0(self, u):
        return self.p0 * u + self.alpha0 * np.log(self._m(u))

    def _log_a0(self, u):
        m = self._m(u)
        with np.errstate(invalid="ignore", divide="ignore"):
            return (self.p0 - 1.0) * u + (self.alpha0 - 1.0) * np.log(m) \
                + np.log(self.p0 * m - self.alpha0 * expit(-1.0 - u))

    def _log_Ainf(self, u):
        return self.p * u + self.alpha * np.log(self._ell(u))

    def _log_ainf(self, u):
        ell = self._ell(u)
        with np.errstate(invalid="ignore", divide="ignore"):
            return (self.p - 1.0) * u + (self.alpha - 1.0) * np.log(ell) \
                + np.log(self.p * ell + self.alpha * expit(u - 1.0))

    def log_eval(self, u) -> np.ndarray:
        u = np.atleast_1d(np.asarray(u, dtype=float))
        u0 = np.log(self.t0)
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            low = self._log_A0(u)
            log_inf = self._log_Ainf(u)
            high = self._log_c + log_inf + np.log1p(self._offset * np.exp(-log_inf))
            out = np.log(self.scale) + np.where(u <= u0, low, high)
        return np.where(np.isneginf(u), -np.inf, out)

    def log_density(self, u) -> np.ndarray:
        u = np.atleast_1d(np.asarray(u, dtype=float))
        u0 = np.log(self.t0)
        with np.errstate(over="ignore", invalid="ignore"):
            out = np.log(self.scale) + np.where(u <= u0, self._log_a0(u), self._log_c + self._log_ainf(u))
        return out

    def evaluate(self, t) -> np.ndarray:
        t = np.atleast_1d(np.asarray(t, dtype=float))
        if np.any(t < 0):
            raise DomainError("Young functions are defined for t >= 0")
        out = np.zeros_like(t)
        positive = t > 0
        with np.errstate(over="ignore"):
            out[positive] = np.exp(self.log_eval(np.log(t[positive])))
        return out

    def density(self, t) -> np.ndarray:
        t = np.atleast_1d(np.asarray(t, dtype=float))
        if np.any(t < 0):
            raise DomainError("Densities are defined for t >= 0")
        at_zero = self.scale if (self.p0 == 1 and self.alpha0 == 0) else 0.0
        out = np.full_like(t, at_zero)
        positive = t > 0
        with np.errstate(over="ignore"):
            out[positive] = np.exp(self.log_density(np.log(t[positive])))
        return out

    def density_sup(self) -> float:
        if self.p > 1 or self.alpha > 0:
            return np.inf
        return float(self.scale * np.exp(self._log_c))

    def to_spec(self) -> dict:
        return {"form": "powerlog", "p": self.p, "alpha": self.alpha, "p0": self.p0,
                "alpha0": self.alpha0, "scale": self.scale, "t0": self.t0}

    def __repr__(self):
        return f"PowerLog(p={self.p}, alpha={self.alpha}, p0={self.p0}, alpha0={self.alpha0})"


class Tabulated(YoungFunction):
    """Young function with a piecewise-linear density given by knots (t, a).

    Repeated abscissae mark jumps; the density is left-continuous there. A knot
    with a=inf makes the density infinite beyond it. Past the last knot the
    density continues with the slope of the last segment of positive length.
    """

    def __init__(self, knots: Sequence[Sequence[float]]):
        try:
            spec = TabulatedSpec(knots=[tuple(k) for k in knots])
        except ValidationError as e:
            raise ParameterError(f"Invalid density knots: {str(e)}")
        self.knots = [(float(t), float(a)) for t, a in spec.knots]
        t = np.array([k[0] for k in self.knots])
        a = np.array([k[1] for k in self.knots])

        infinite = np.isinf(a)
        self.blowup = float(t[infinite][0]) if np.any(infinite) else np.inf
        self.finite = not np.any(infinite)
        t, a = t[~infinite], a[~infinite]

        starts, ends, a_start, slopes = [], [], [], []
        for k in range(len(t) - 1):
            if t[k + 1] > t[k]:
                starts.append(t[k])
                ends.append(t[k + 1])
                a_start.append(a[k])
                slopes.append((a[k + 1] - a[k]) / (t[k + 1] - t[k]))
        if self.finite or self.blowup > t[-1]:
            tail_slope = slopes[-1] if slopes else 0.0
            starts.append(t[-1])
            ends.append(self.blowup)
            a_start.append(a[-1])
            slopes.append(tail_slope)
        self._starts = np.array(starts)
        self._ends = np.array(ends)
        self._a = np.array(a_start)
        self._slopes = np.array(slopes)
        widths = np.where(np.isfinite(self._ends), self._ends - self._starts, 0.0)
        pieces = self._a * widths + 0.5 * self._slopes * widths ** 2
        self._cum = np.concatenate([[0.0], np.cumsum(pieces)[:-1]])
        self._a_zero = float(a[0]) if len(a) else 0.0

    def density(self, t) -> np.ndarray:
        t = np.atleast_1d(np.asarray(t, dtype=float))
        if np.any(t < 0):
            raise DomainError("Densities are defined for t >= 0")
        idx = np.clip(np.searchsorted(self._starts, t, side="left") - 1, 0, len(self._starts) - 1)
        out = self._a[idx] + self._slopes[idx] * (t - self._starts[idx])
        out = np.where(t <= 0, self._a_zero, out)
        return np.where(t > self.blowup, np.inf, out)

    def evaluate(self, t) -> np.ndarray:
        t = np.atleast_1d(np.asarray(t, dtype=float))
        if np.any(t < 0):
            raise DomainError("Young functions are defined for t >= 0")
        idx = np.clip(np.searchsorted(self._starts, t, side="right") - 1, 0, len(self._starts) - 1)
        d = t - self._starts[idx]
        out = self._cum[idx] + self._a[idx] * d + 0.5 * self._slopes[idx] * d ** 2
        return np.where(t > self.blowup, np.inf, out)

    def density_sup(self) -> float:
        if not self.finite or self._slopes[-1] > 0:
            return np.inf
        return float(self._a[-1])

    def to_spec(self) -> dict:
        return {"form": "tabulated", "knots": [[t, a] for t, a in self.knots]}

    def __repr__(self):
        return f"Tabulated({len(self.knots)} knots)"


class Conjugate(YoungFunction):
    """Young conjugate via the left-continuous inverse of the density"""

    def __init__(self, base: YoungFunction):
        if not base.finite:
            raise UnsupportedFunctionError("Conjugation of infinite-valued Young functions is not supported")
        self.base = base
        self._sup = base.density_sup()
        self.finite = not np.isfinite(self._sup)
        self._a_zero = float(base.density(np.array([0.0]))[0])

    def density(self, y) -> np.ndarray:
        y = np.atleast_1d(np.asarray(y, dtype=float))
        if np.any(y < 0):
            raise DomainError("Densities are defined for t >= 0")
        out = np.zeros_like(y)
        above = y > self._a_zero
        out[y > self._sup] = np.inf
        solve = above & (y <= self._sup)
        if np.any(solve):
            # inf{tau : a(tau) >= y} = sup{tau : a(tau) < y}
            targets = np.nextafter(y[solve], -np.inf)
            try:
                out[solve] = invert_increasing(self.base.density, targets, abs_tol=0.0, rel_tol=1e-13)
            except RangeError:
                out[solve] = np.inf
        return out

    def evaluate(self, t) -> np.ndarray:
        t = np.atleast_1d(np.asarray(t, dtype=float))
        if np.any(t < 0):
            raise DomainError("Young functions are defined for t >= 0")
        b = self.density(t)
        out = np.full_like(t, np.inf)
        finite = np.isfinite(b)
        out[finite] = t[finite] * b[finite] - self.base.evaluate(b[finite])
        out = np.maximum(out, 0.0)
        return np.where(t == 0, 0.0, out)

    def density_sup(self) -> float:
        return np.inf

    def __repr__(self):
        return f"Conjugate({self.base!r})"


def young_from_spec(doc: Union[str, dict]) -> YoungFunction:
    """Build a Young function from its JSON document"""
    if isinstance(doc, str):
        doc = json.loads(doc)
    form = doc.get("form")
    if form == "powerlog":
        fields = {k: v for k, v in doc.items() if k != "form"}
        return PowerLog(**fields)
    if form == "tabulated":
        return Tabulated(doc["knots"])
    raise ParameterError(f"Unknown Young function form: {form!r}")


def young_to_spec(A: YoungFunction) -> dict:
    return A.to_spec()


def tabulate_young(A: YoungFunction, t_grid: Optional[np.ndarray] = None) -> dict:
    """Tabulated JSON document sampling the density of A"""
    if t_grid is None:
        t_grid = np.concatenate([[0.0], log_grid(1e-6, 1e6, 10)])
    a = A.density(t_grid)
    a = np.maximum.accumulate(np.where(np.isfinite(a), a, np.inf))
    return {"form": "tabulated", "knots": [[float(t), float(v)] for t, v in zip(t_grid, a)]}


def eval_young(A: YoungFunction, t: float) -> float:
    if t < 0:
        raise DomainError(f"Cannot evaluate a Young function at t={t}")
    return float(A.evaluate(np.array([float(t)]))[0])


def young_density(A: YoungFunction, t: float) -> float:
    if t < 0:
        raise DomainError(f"Cannot evaluate a density at t={t}")
    return float(A.density(np.array([float(t)]))[0])


def conjugate(A: YoungFunction) -> YoungFunction:
    logger.debug(f"Conjugating {A!r}")
    return Conjugate(A)


def generalized_inverse(A: YoungFunction, y) -> Union[float, np.ndarray]:
    """sup{t : A(t) <= y}"""
    y_arr = np.asarray(y, dtype=float)
    if np.any(y_arr < 0):
        raise DomainError(f"Generalized inverse needs y >= 0, got {y}")
    try:
        return invert_increasing(A.evaluate, y_arr)
    except RangeError as e:
        logger.error(f"Error inverting {A!r}: {str(e)}")
        raise RangeError(f"y={y} exceeds the range of {A!r}: {str(e)}")


def log_inverse(A: YoungFunction, v) -> np.ndarray:
    """log of sup{t : A(t) <= e^v}"""
    return A.log_inverse(v)


def matuszewska_index(A: YoungFunction, regime: Regime = Regime.GLOBAL,
                      lambdas: Optional[Iterable[float]] = None) -> IndexEstimate:
    """Growth exponent lim log(sup_t A(lt)/A(t)) / log l fitted over a grid of l"""
    regime = Regime(regime)
    if regime == Regime.NEAR_ZERO:
        raise ParameterError("Index estimates are defined globally or near infinity")
    if not A.finite:
        raise UnsupportedFunctionError(f"Index of infinite-valued {A!r} is not supported")
    lams = np.asarray(list(lambdas) if lambdas is not None else 10.0 ** np.arange(1.0, 6.01, 0.5))
    log_m = []
    for lam in lams:
        if regime == Regime.GLOBAL:
            u = np.log(log_grid(1e-8, 1e8, 40))
        else:
            base = 100.0 * lam ** 3
            u = np.log(log_grid(base, 10.0 * base, 40))
        ratio = A.log_eval(u + np.log(lam)) - A.log_eval(u)
        if not np.all(np.isfinite(ratio)):
            raise UnsupportedFunctionError(f"Non-finite ratios A(lt)/A(t) for {A!r} at lambda={lam:.3g}")
        log_m.append(float(np.max(ratio)))
    slope, residual = fit_slope(np.log(lams), np.array(log_m))
    logger.info(f"Index of {A!r} ({regime.value}): {slope:.6g} (residual {residual:.2e})")
    return IndexEstimate(value=slope, regime=regime, lambda_grid=[float(x) for x in lams], residual=residual)


def _trend_ok(u: np.ndarray, diff: np.ndarray, regime: Regime) -> Tuple[bool, dict]:
    trend = {}
    ends = []
    if regime in (Regime.NEAR_INFINITY, Regime.GLOBAL):
        ends.append(("infinity", u >= np.log(REGIME_WINDOWS[Regime.NEAR_INFINITY][0]), 1.0))
    if regime in (Regime.NEAR_ZERO, Regime.GLOBAL):
        ends.append(("zero", u <= np.log(REGIME_WINDOWS[Regime.NEAR_ZERO][1]), -1.0))
    ok = True
    for name, mask, sign in ends:
        mask = mask & np.isfinite(diff)
        if np.count_nonzero(mask) < 8:
            continue
        power, log_power = trend_exponents(sign * u[mask], diff[mask])
        trend[f"{name}_power"] = power
        trend[f"{name}_log"] = log_power
        ok &= stays_bounded(power, log_power)
    return ok, trend


def dominates(A: YoungFunction, B: YoungFunction, regime: Regime = Regime.GLOBAL,
              per_decade: int = 20, c_max: float = 1e4,
              window: Optional[Tuple[float, float]] = None) -> ComparisonVerdict:
    """Smallest C on the grid 10^(k/20) with B(t) <= A(Ct) over the regime samples"""
    regime = Regime(regime)
    lo, hi = window or REGIME_WINDOWS[regime]
    u = np.log(log_grid(lo, hi, per_decade))
    log_b = B.log_eval(u)
    examined = 0
    trend = {}
    for k in range(int(round(20 * np.log10(c_max))) + 1):
        c = 10.0 ** (k / 20.0)
        with np.errstate(invalid="ignore"):
            diff = log_b - A.log_eval(u + np.log(c))
        examined += len(u)
        samples_ok = bool(np.all((diff <= np.log1p(DOMINATION_SLACK)) | np.isneginf(log_b)))
        if not samples_ok:
            continue
        ok, trend = _trend_ok(u, diff, regime)
        if ok:
            threshold = {Regime.NEAR_ZERO: hi, Regime.NEAR_INFINITY: lo}.get(regime)
            logger.debug(f"{A!r} dominates {B!r} ({regime.value}) with C={c:.4g}")
            return ComparisonVerdict(regime=regime, dominates=True, constant=c, threshold=threshold,
                                     samples_examined=examined, trend=trend)
    return ComparisonVerdict(regime=regime, dominates=False, samples_examined=examined, trend=trend)


def equivalent(A: YoungFunction, B: YoungFunction,
               regime: Regime = Regime.GLOBAL) -> Tuple[ComparisonVerdict, ComparisonVerdict]:
    return dominates(A, B, regime), dominates(B, A, regime)


def grows_essentially_slower(B: YoungFunction, A: YoungFunction, lambdas: Sequence[float] = (0.1, 1.0, 10.0),
                             epsilon: float = GROWTH_EPSILON, t_max: float = GROWTH_T_MAX,
                             t_min: float = 1e2) -> GrowthEvidence:
    """Whether B(lt)/A(t) -> 0 as t -> inf for each sampled l.

    Each ratio must trend to 0, end at its smallest sample and fall below epsilon,
    either at t_max or where its fitted trend first crosses epsilon past t_max.
    """
    t = log_grid(t_min, t_max, 20)
    u = np.log(t)
    log_a = A.log_eval(u)
    ratios, exponents, crossings = {}, {}, {}
    result = True
    for lam in lambdas:
        with np.errstate(invalid="ignore", over="ignore"):
            log_r = B.log_eval(u + np.log(lam)) - log_a
            ratio = np.exp(log_r)
        key = f"{lam:g}"
        ratios[key] = [float(r) for r in ratio]
        finite = np.isfinite(log_r)
        if np.count_nonzero(finite) >= 8:
            power, log_power = trend_exponents(u[finite], log_r[finite])
        else:
            power, log_power = (-np.inf, 0.0) if np.all(np.isneginf(log_r)) else (np.inf, 0.0)
        exponents[key] = (float(power), float(log_power))
        if not tends_to_zero(power, log_power):
            crossings[key] = np.inf
            result = False
            continue
        last = log_r[-1]
        decreasing = bool(np.isneginf(last) or last <= np.min(log_r[finite]) + 1e-6)
        # a power within the band is read as a purely logarithmic trend
        slope = power if power < -POWER_BAND else 0.0
        crossing = crossing_point(u[-1], last, slope, log_power, np.log(epsilon)) if decreasing else np.inf
        crossings[key] = float(crossing)
        result &= decreasing and bool(np.isfinite(crossing))
    return GrowthEvidence(result=result, epsilon=epsilon, t_max=t_max, lambdas=list(lambdas),
                          t_grid=[float(x) for x in t], ratios=ratios, exponents=exponents,
                          crossings=crossings)
