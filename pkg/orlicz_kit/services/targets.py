import logging
from typing import Callable, Optional, Tuple

import numpy as np
from scipy.interpolate import PchipInterpolator

from orlicz_kit.exceptions import (
    AdmissibilityError,
    DomainError,
    IndeterminateError,
    PrecisionError,
    RangeError,
    UnsupportedFunctionError,
)
from orlicz_kit.models.schemas import CompactnessEvidence, FractionalParams, IntegralConditions
from orlicz_kit.services.young import YoungFunction, conjugate, grows_essentially_slower
from orlicz_kit.utils.helpers import (
    LogCumulativeIntegral,
    MemoTable,
    fit_linear,
    invert_on_bracket,
    log_grid,
    tail_verdict,
    tends_to_zero,
    trend_exponents,
)

logger = logging.getLogger(__name__)

# Tail windows for the integral conditions, in the log variable
TAIL_WINDOW = (np.log(1e4), np.log(1e16))

# Largest log-argument of a constructed target that is tabulated exactly
TARGET_LOG_MAX = 150.0
H_TABLE_CAP = 1e15

HAT_LOW = -70.0
HAT_TABLE_TOP = 200.0
HAT_TAIL_BUDGET = 1e-10


def _log_ratio_integrand(A: YoungFunction, fp: FractionalParams) -> Callable[[np.ndarray], np.ndarray]:
    """log of (t/A(t))^(s/(n-s)) * t in the variable u = log t"""
    rho = fp.rho

    def phi(u):
        u = np.atleast_1d(np.asarray(u, dtype=float))
        with np.errstate(invalid="ignore"):
            return u + rho * (u - A.log_eval(u))

    return phi


def dual_condition(A: YoungFunction, fp: FractionalParams) -> Tuple[Optional[bool], str, dict]:
    """Convergence at zero of the integral of conj(A)(t) / t^(1 + n/(n-s))"""
    tilde = conjugate(A)
    power = fp.n / (fp.n - fp.s)
    x = np.linspace(TAIL_WINDOW[0], TAIL_WINDOW[1], 200)

    def log_integrand(z):
        with np.errstate(invalid="ignore"):
            return tilde.log_eval(-z) + power * z

    verdict, diagnostics = tail_verdict(log_integrand, x)
    condition = {"convergent": True, "divergent": False}.get(verdict)
    return condition, verdict, diagnostics


def check_integral_conditions(A: YoungFunction, fp: FractionalParams) -> IntegralConditions:
    """Divergence at infinity and convergence at zero of the integral of (t/A(t))^(s/(n-s))"""
    if not A.finite:
        raise UnsupportedFunctionError(f"Integral conditions need a finite-valued Young function, got {A!r}")
    phi = _log_ratio_integrand(A, fp)
    x = np.linspace(TAIL_WINDOW[0], TAIL_WINDOW[1], 200)

    infinity_verdict, infinity_diag = tail_verdict(phi, x)
    zero_verdict, zero_diag = tail_verdict(lambda z: phi(-z), x)
    dual, dual_verdict, dual_diag = dual_condition(A, fp)

    infinity_condition = {"divergent": True, "convergent": False}.get(infinity_verdict)
    zero_condition = {"convergent": True, "divergent": False}.get(zero_verdict)
    agree = zero_condition is None or dual is None or zero_condition == dual
    if not agree:
        logger.warning(f"Zero condition ({zero_verdict}) and its dual form ({dual_verdict}) disagree for {A!r}")
    for name, verdict in (("infinity", infinity_verdict), ("zero", zero_verdict)):
        if verdict == "indeterminate":
            logger.warning(f"Integral condition at {name} is indeterminate for {A!r} (n={fp.n}, s={fp.s})")

    return IntegralConditions(
        infinity_condition=infinity_condition,
        zero_condition=zero_condition,
        dual_zero_condition=dual,
        infinity_verdict=infinity_verdict,
        zero_verdict=zero_verdict,
        dual_verdict=dual_verdict,
        agree=agree,
        diagnostics={"infinity": infinity_diag, "zero": zero_diag, "dual": dual_diag},
    )


def _require(condition: Optional[bool], name: str, A: YoungFunction):
    if condition is None:
        raise IndeterminateError(f"Condition at {name} is too close to critical to decide for {A!r}")
    if not condition:
        raise AdmissibilityError(f"Condition at {name} fails for {A!r}")


class MonotoneMap:
    """Strictly increasing map of (0, inf) given in the log variables.

    `log_forward` maps log t to log f(t); `log_inverse` maps log y back. Scalar
    evaluations are memoized.
    """

    def __init__(self, name: str, log_forward: Callable, log_inverse: Callable, log_sup: float = np.inf):
        self.name = name
        self._log_forward = log_forward
        self._log_inverse = log_inverse
        self.log_sup = float(log_sup)
        self._memo = MemoTable()

    def log_forward(self, u) -> np.ndarray:
        return self._log_forward(np.atleast_1d(np.asarray(u, dtype=float)))

    def log_inverse(self, v) -> np.ndarray:
        v = np.atleast_1d(np.asarray(v, dtype=float))
        if np.any(v >= self.log_sup):
            raise RangeError(f"{self.name}: value exp({float(np.max(v)):.6g}) is not below the supremum")
        return self._log_inverse(v)

    @property
    def sup(self) -> float:
        with np.errstate(over="ignore"):
            return float(np.exp(self.log_sup))

    def _apply(self, func, x) -> np.ndarray:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        if np.any(x < 0):
            raise DomainError(f"{self.name} is defined on [0, inf)")
        out = np.zeros_like(x)
        positive = x > 0
        with np.errstate(over="ignore"):
            out[positive] = np.exp(func(np.log(x[positive])))
        return out

    def __call__(self, t):
        if np.isscalar(t):
            return self._memo.get(("forward", float(t)), lambda: float(self._apply(self.log_forward, t)[0]))
        return self._apply(self.log_forward, t)

    def inverse(self, y):
        if np.isscalar(y):
            return self._memo.get(("inverse", float(y)), lambda: float(self._apply(self.log_inverse, y)[0]))
        return self._apply(self.log_inverse, y)

    def __repr__(self):
        return f"MonotoneMap({self.name})"


class ParametricYoung(YoungFunction):
    """Young function known through log A as a function of log t"""

    def __init__(self, label: str, log_eval: Callable, log_density: Optional[Callable] = None,
                 log_inverse: Optional[Callable] = None, log_sup: float = np.inf):
        self.label = label
        self._log_eval = log_eval
        self._log_density = log_density
        self._log_inverse = log_inverse
        self.log_sup = float(log_sup)
        self.finite = not np.isfinite(self.log_sup)
        self.details = {}

    def log_eval(self, u) -> np.ndarray:
        u = np.atleast_1d(np.asarray(u, dtype=float))
        out = np.full_like(u, np.inf)
        out[np.isneginf(u)] = -np.inf
        ok = np.isfinite(u) & (u < self.log_sup)
        if np.any(ok):
            out[ok] = self._log_eval(u[ok])
        return out

    def log_density(self, u) -> np.ndarray:
        u = np.atleast_1d(np.asarray(u, dtype=float))
        if self._log_density is not None:
            out = np.full_like(u, np.inf)
            ok = u < self.log_sup
            out[ok] = self._log_density(u[ok])
            return out
        # central difference with step t * 1e-5
        h = 1e-5
        with np.errstate(invalid="ignore", divide="ignore"):
            slope = (self.log_eval(u + h) - self.log_eval(u - h)) / (2.0 * h)
            return self.log_eval(u) - u + np.log(np.maximum(slope, 0.0))

    def log_inverse(self, v) -> np.ndarray:
        if self._log_inverse is not None:
            return self._log_inverse(np.atleast_1d(np.asarray(v, dtype=float)))
        return super().log_inverse(v)

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
        out = np.zeros_like(t)
        positive = t > 0
        with np.errstate(over="ignore"):
            out[positive] = np.exp(self.log_density(np.log(t[positive])))
        return out

    def density_sup(self) -> float:
        return np.inf

    def check_convexity(self, u: Optional[np.ndarray] = None, tolerance: float = 1e-6) -> bool:
        """Sampled density is non-decreasing"""
        if u is None:
            u = np.linspace(-15.0, 15.0, 301)
            u = u[u < self.log_sup]
        logs = self.log_density(u)
        logs = logs[np.isfinite(logs)]
        convex = bool(np.all(np.diff(logs) >= -tolerance * np.maximum(1.0, np.abs(logs[1:]))))
        if not convex:
            logger.warning(f"Sampled density of {self.label} decreases somewhere; convexity not certified")
        self.details["convex"] = convex
        return convex

    def __repr__(self):
        return self.label


def _table_top(phi: Callable, target: float, start: float = 100.0, cap: float = H_TABLE_CAP) -> float:
    """First point of a doubling grid where phi reaches target"""
    u = start * 2.0 ** np.arange(0, 64)
    u = u[u <= cap]
    with np.errstate(invalid="ignore"):
        values = phi(u)
    hits = np.nonzero(values >= target)[0]
    return float(u[hits[0]]) if hits.size else float(u[-1])


def _invert_cumulative(integral: LogCumulativeIntegral, w: np.ndarray) -> np.ndarray:
    """u with integral(u) = w for a cumulative table built from the bottom"""
    w = np.atleast_1d(np.asarray(w, dtype=float))
    out = np.empty_like(w)
    table, edges = integral.table, integral.edges
    below = w < table[0]
    above = w > table[-1]
    inside = ~below & ~above

    if np.any(below):
        if integral.low_slope <= 1e-12:
            raise AdmissibilityError("Cumulative integral does not vanish at zero")
        out[below] = integral.u_lo + (w[below] - table[0]) / integral.low_slope

    if np.any(inside):
        idx = np.clip(np.searchsorted(table, w[inside], side="left"), 1, len(table) - 1)
        out[inside] = invert_on_bracket(integral, w[inside], edges[idx - 1], edges[idx],
                                        abs_tol=1e-13, rel_tol=1e-15)

    if np.any(above):
        wa = w[above]
        lo = np.full_like(wa, integral.u_hi)
        step = max(1.0, abs(integral.u_hi))
        hi = lo + step
        short = integral(hi) < wa
        while np.any(short):
            if np.any(hi > 1e300):
                raise RangeError("Target value beyond the cumulative integral")
            hi = np.where(short, lo + 2.0 * (hi - lo), hi)
            short = integral(hi) < wa
        out[above] = invert_on_bracket(integral, wa, lo, hi, abs_tol=1e-13, rel_tol=1e-15)
    return out


def build_H(A: YoungFunction, fp: FractionalParams) -> MonotoneMap:
    """H(t) = (integral over (0, t) of (tau/A(tau))^(s/(n-s)) dtau)^((n-s)/n)"""
    conditions = check_integral_conditions(A, fp)
    _require(conditions.zero_condition, "zero", A)
    logger.info(f"Building H for {A!r} with n={fp.n}, s={fp.s}")

    phi = _log_ratio_integrand(A, fp)
    power = fp.n / (fp.n - fp.s)
    top = min(_table_top(phi, power * TARGET_LOG_MAX), 0.25 * A.log_domain[1])
    try:
        G = LogCumulativeIntegral(phi, u_lo=-70.0, u_hi=top)
    except ValueError as e:
        logger.error(f"Error tabulating H for {A!r}: {str(e)}")
        raise UnsupportedFunctionError(f"Cannot tabulate H for {A!r}: {str(e)}")
    if not np.isfinite(G.log_low_tail):
        raise UnsupportedFunctionError(f"Integral defining H for {A!r} is not closed near zero")

    def log_forward(u):
        return G(u) / power

    def log_inverse(v):
        return _invert_cumulative(G, power * v)

    H = MonotoneMap(f"H[{A!r}]", log_forward, log_inverse, log_sup=G.log_total / power)
    H.integral = G
    H.conditions = conditions
    return H


def build_sobolev_conjugate(A: YoungFunction, fp: FractionalParams, H: Optional[MonotoneMap] = None) -> ParametricYoung:
    """A_{n/s} = A composed with the inverse of H"""
    H = H or build_H(A, fp)

    def log_eval(v):
        return A.log_eval(H.log_inverse(v))

    def log_inverse(v):
        return H.log_forward(A.log_inverse(v))

    result = ParametricYoung(f"A_{fp.ratio:g}[{A!r}]", log_eval, log_inverse=log_inverse, log_sup=H.log_sup)
    result.H = H
    result.check_convexity()
    logger.info(f"Built {result.label}")
    return result


def build_hat(A: YoungFunction, fp: FractionalParams) -> ParametricYoung:
    """Young function whose density has the nested-integral inverse

        hat_a^{-1}(r) = J(a^{-1}(r))^(-s/(n-s)),
        J(b) = integral over (b, inf) of K(t)^(-n/s) a(t)^(-n/(n-s)) dt,
        K(t) = integral over (0, t) of a^(-s/(n-s)).

    Everything is tabulated in u = log b; hat_A follows from
    hat_A(y(b)) = integral over (0, b) of a dy.
    """
    conditions = check_integral_conditions(A, fp)
    _require(conditions.zero_condition, "zero", A)
    _require(conditions.infinity_condition, "infinity", A)
    logger.info(f"Building hat function for {A!r} with n={fp.n}, s={fp.s}")

    rho = fp.rho
    ns = fp.ratio
    power = fp.n / (fp.n - fp.s)
    if not np.isfinite(A.log_density(np.array([HAT_LOW]))[0]):
        raise UnsupportedFunctionError(f"Density of {A!r} vanishes near zero; hat function is not supported")

    top = HAT_TABLE_TOP + 40.0 / (ns - 1.0)

    def log_a(u):
        return A.log_density(u)

    K = LogCumulativeIntegral(lambda u: u - rho * log_a(u), u_lo=HAT_LOW, u_hi=top, switch=top)
    if not np.isfinite(K.log_low_tail):
        raise UnsupportedFunctionError(f"Integral of a^(-s/(n-s)) for {A!r} is not closed near zero")
    J = LogCumulativeIntegral(lambda u: u - ns * K(u) - power * log_a(u), u_lo=HAT_LOW, u_hi=top,
                              from_top=True, switch=top)

    # K(t) >= t a(t)^(-rho) bounds the integrand of J by t^(-n/s)
    log_tail_bound = (1.0 - ns) * J.u_hi - np.log(ns - 1.0)
    log_j_table_top = float(J(np.array([HAT_TABLE_TOP]))[0])
    tail_ratio = float(np.exp(log_tail_bound - log_j_table_top))
    if tail_ratio > HAT_TAIL_BUDGET:
        raise PrecisionError(f"Tail of the outer integral not controlled for {A!r}", achieved=tail_ratio)

    def psi(u):
        return np.log(rho) - rho * log_a(u) - (rho + 1.0) * J(u) - ns * K(u) + u

    Ahat = LogCumulativeIntegral(psi, u_lo=HAT_LOW, u_hi=HAT_TABLE_TOP, switch=HAT_TABLE_TOP)

    u = Ahat.edges
    log_y = -rho * J(u)
    log_A = Ahat.table
    log_da = log_a(u)
    keep = np.concatenate([[True], np.diff(log_y) > 0])
    log_y, log_A, log_da = log_y[keep], log_A[keep], log_da[keep]

    values = PchipInterpolator(log_y, log_A, extrapolate=False)
    densities = PchipInterpolator(log_y, log_da, extrapolate=False)
    slope_lo = (log_A[1] - log_A[0]) / (log_y[1] - log_y[0])
    slope_hi = (log_A[-1] - log_A[-2]) / (log_y[-1] - log_y[-2])
    dslope_lo = (log_da[1] - log_da[0]) / (log_y[1] - log_y[0])
    dslope_hi = (log_da[-1] - log_da[-2]) / (log_y[-1] - log_y[-2])

    def extend(interp, v, s_lo, s_hi, first, last):
        out = interp(v)
        low = v < log_y[0]
        high = v > log_y[-1]
        out[low] = first + s_lo * (v[low] - log_y[0])
        out[high] = last + s_hi * (v[high] - log_y[-1])
        return out

    result = ParametricYoung(
        f"hat[{A!r}; n={fp.n}, s={fp.s:g}]",
        lambda v: extend(values, v, slope_lo, slope_hi, log_A[0], log_A[-1]),
        log_density=lambda v: extend(densities, v, dslope_lo, dslope_hi, log_da[0], log_da[-1]),
    )
    result.details.update({"tail_ratio": tail_ratio, "log_y_range": [float(log_y[0]), float(log_y[-1])]})
    logger.info(f"Built {result.label} (outer tail ratio {tail_ratio:.2e})")
    return result


def inverse_ratio_test(A_ns: YoungFunction, B: YoungFunction, t_min: float = 1e2,
                       t_max: float = 1e8) -> Tuple[bool, Tuple[float, float]]:
    """Whether A_ns^{-1}(t) / B^{-1}(t) -> 0 as t -> inf"""
    v = np.log(log_grid(t_min, t_max, 20))
    log_ratio = A_ns.log_inverse(v) - B.log_inverse(v)
    power, log_power = trend_exponents(v, log_ratio)
    return tends_to_zero(power, log_power), (power, log_power)


def compact_target_test(A: YoungFunction, B: YoungFunction, fp: FractionalParams,
                        A_ns: Optional[YoungFunction] = None) -> CompactnessEvidence:
    """B grows essentially more slowly than A_{n/s}, decided by two routes"""
    A_ns = A_ns or build_sobolev_conjugate(A, fp)
    growth = grows_essentially_slower(B, A_ns)
    inverse_route, exponents = inverse_ratio_test(A_ns, B)
    agree = growth.result == inverse_route
    if not agree:
        logger.warning(f"Compactness routes disagree for {A!r} and {B!r}: growth={growth.result}, "
                       f"inverse={inverse_route}")
    return CompactnessEvidence(result=growth.result if agree else None, growth_route=growth.result,
                               inverse_route=inverse_route, agree=agree, growth=growth,
                               inverse_exponents=exponents)


def asymptotic_exponent(F: YoungFunction, t_lo: float = 1e4, t_hi: float = 1e8) -> float:
    """Limit of the local log-log slope of F, extrapolated past log corrections"""
    v = np.log(log_grid(t_lo, t_hi, 20))
    h = 1e-4
    slope = (F.log_eval(v + h) - F.log_eval(v - h)) / (2.0 * h)
    features = np.column_stack([1.0 / v, np.log(v) / v ** 2, 1.0 / v ** 2])
    _, intercept, _ = fit_linear(features, slope)
    return intercept


def double_log_exponent(F: YoungFunction, t: float = 1e6) -> float:
    """Local slope of log log F against log t"""
    v = np.log(t)
    h = 1e-3
    values = F.log_eval(np.array([v - h, v + h]))
    return float((np.log(values[1]) - np.log(values[0])) / (2.0 * h))
