import os
import logging
import threading
from functools import lru_cache
from collections import OrderedDict
from typing import Callable, Optional, Tuple

import numpy as np
from scipy.special import logsumexp
from sklearn.linear_model import LinearRegression

from orlicz_kit.exceptions import RangeError

logger = logging.getLogger(__name__)

LOG_FILE = os.getenv("ORLICZ_KIT_LOG_FILE", "orlicz_kit.log")

# Monotone inversion defaults
ABS_TOL = 1e-12
REL_TOL = 1e-10
BRACKET_LIMIT = 1e300
MAX_ITER = 200

# Thresholds for exponent verdicts
POWER_BAND = 0.01
LOG_BAND = 0.1
# Largest log t a fitted ratio trend is followed to
CROSSING_HORIZON = 1e12

# Pass threshold for existence-of-constant checks
C_CAP = float(os.getenv("ORLICZ_KIT_C_CAP", "1e3"))
C_MIN = 1e-3


def setup_logging(level: int = logging.INFO):
    """Setup logging configuration"""
    logging.basicConfig(
        level=level,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=[
            logging.FileHandler(LOG_FILE),
            logging.StreamHandler()
        ]
    )


def ensure_directory_exists(directory: str) -> None:
    """Ensure directory exists, create if it doesn't"""
    os.makedirs(directory, exist_ok=True)


def thread_count() -> int:
    """Number of worker threads allowed by the environment"""
    value = os.getenv("ORLICZ_KIT_THREADS")
    if value:
        try:
            return max(1, int(value))
        except ValueError:
            logger.warning(f"Ignoring malformed ORLICZ_KIT_THREADS={value!r}")
    return os.cpu_count() or 1


def log_grid(lo: float, hi: float, per_decade: int = 20) -> np.ndarray:
    """Log-spaced points between lo and hi, endpoints included"""
    decades = np.log10(hi) - np.log10(lo)
    count = max(2, int(round(decades * per_decade)) + 1)
    return np.logspace(np.log10(lo), np.log10(hi), count)


@lru_cache(maxsize=32)
def gauss_legendre(order: int) -> Tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on [0, 1]"""
    nodes, weights = np.polynomial.legendre.leggauss(order)
    return 0.5 * (nodes + 1.0), 0.5 * weights


def composite_nodes(edges: np.ndarray, order: int) -> Tuple[np.ndarray, np.ndarray]:
    """Flattened composite Gauss-Legendre nodes and weights over consecutive edges"""
    x, w = gauss_legendre(order)
    left = edges[:-1, None]
    width = np.diff(edges)[:, None]
    return (left + width * x).ravel(), (width * w).ravel()


def _bisect(func, targets, lo, hi, abs_tol, rel_tol, max_iter):
    # Invariant: func(lo) <= target < func(hi)
    for _ in range(max_iter):
        width = hi - lo
        tol = np.maximum(abs_tol, rel_tol * hi)
        active = width > tol
        if not np.any(active):
            break
        mid = lo + 0.5 * width
        stalled = (mid <= lo) | (mid >= hi)
        active &= ~stalled
        if not np.any(active):
            break
        below = func(mid) <= targets
        lo = np.where(active & below, mid, lo)
        hi = np.where(active & ~below, mid, hi)
    return lo, hi


def invert_increasing(
    func: Callable[[np.ndarray], np.ndarray],
    targets,
    start: float = 1.0,
    abs_tol: float = ABS_TOL,
    rel_tol: float = REL_TOL,
    limit: float = BRACKET_LIMIT,
    max_iter: int = MAX_ITER,
) -> np.ndarray:
    """Vectorized sup{t >= 0 : func(t) <= y} for a non-decreasing func with func(0) <= y.

    The upper bracket doubles from `start` and the lower bracket halves from it,
    so the bisection always works on a bracket of relative width at most two.
    """
    targets = np.asarray(targets, dtype=float)
    scalar = targets.ndim == 0
    targets = np.atleast_1d(targets)

    hi = np.full_like(targets, start)
    ok = func(hi) <= targets
    lo = np.where(ok, hi, 0.0)

    grow = ok.copy()
    while np.any(grow):
        if np.any(hi[grow] > limit):
            worst = float(targets[grow & (hi > limit)][0])
            raise RangeError(f"Value {worst:.6g} lies beyond the range of the function (bracket passed {limit:.1e})")
        hi = np.where(grow, 2.0 * hi, hi)
        lo = np.where(grow, 0.5 * hi, lo)
        grow &= func(hi) <= targets

    shrink = ~ok
    while np.any(shrink):
        candidate = 0.5 * hi
        passed = func(candidate) <= targets
        lo = np.where(shrink & passed, candidate, lo)
        hi = np.where(shrink & ~passed, candidate, hi)
        shrink &= ~passed & (candidate > 1e-300)

    lo, _ = _bisect(func, targets, lo, hi, abs_tol, rel_tol, max_iter)
    return float(lo[0]) if scalar else lo


def invert_on_bracket(func, targets, lo, hi, abs_tol=0.0, rel_tol=REL_TOL, max_iter=MAX_ITER) -> np.ndarray:
    """Bisection for sup{t in [lo, hi] : func(t) <= y} on a known bracket"""
    targets = np.atleast_1d(np.asarray(targets, dtype=float))
    lo = np.broadcast_to(np.asarray(lo, dtype=float), targets.shape).copy()
    hi = np.broadcast_to(np.asarray(hi, dtype=float), targets.shape).copy()
    lo, _ = _bisect(func, targets, lo, hi, abs_tol, rel_tol, max_iter)
    return lo


def fit_linear(features: np.ndarray, y: np.ndarray) -> Tuple[np.ndarray, float, float]:
    """Least-squares fit; returns coefficients, intercept and max abs residual"""
    features = np.asarray(features, dtype=float)
    if features.ndim == 1:
        features = features[:, None]
    model = LinearRegression().fit(features, y)
    residual = float(np.max(np.abs(model.predict(features) - y))) if len(y) else 0.0
    return model.coef_, float(model.intercept_), residual


def fit_slope(x: np.ndarray, y: np.ndarray) -> Tuple[float, float]:
    """Slope of y against x and the max residual of the fit"""
    coef, _, residual = fit_linear(np.asarray(x)[:, None], np.asarray(y))
    return float(coef[0]), residual


def trend_exponents(x: np.ndarray, y: np.ndarray) -> Tuple[float, float]:
    """Power and log exponents of exp(y) as a function of exp(x), x -> infinity.

    Fits y ~ c0 + b*x + g*log x + k1*log(x)/x + k2/x and returns (b, g).
    """
    x = np.asarray(x, dtype=float)
    lx = np.log(x)
    features = np.column_stack([x, lx, lx / x, 1.0 / x])
    coef, _, _ = fit_linear(features, np.asarray(y, dtype=float))
    return float(coef[0]), float(coef[1])


def tends_to_zero(power: float, log_power: float) -> bool:
    """Decide vanishing of exp(b*x) * x**g from fitted exponents"""
    if power < -POWER_BAND:
        return True
    return abs(power) <= POWER_BAND and log_power < -LOG_BAND


def crossing_point(x_end: float, y_end: float, power: float, log_power: float, level: float,
                   horizon: float = CROSSING_HORIZON) -> float:
    """First x >= x_end where b*x + g*log x, anchored at (x_end, y_end), drops below level; inf if none by horizon"""
    if y_end < level:
        return float(x_end)
    x = np.geomspace(x_end, horizon, 400)
    y = y_end + power * (x - x_end) + log_power * np.log(x / x_end)
    below = np.flatnonzero(y < level)
    return float(x[below[0]]) if below.size else np.inf


def stays_bounded(power: float, log_power: float) -> bool:
    """Decide boundedness of exp(b*x) * x**g from fitted exponents"""
    if power < -POWER_BAND:
        return True
    return power <= POWER_BAND and log_power <= LOG_BAND


def tail_verdict(log_integrand: Callable[[np.ndarray], np.ndarray], x: np.ndarray) -> Tuple[str, dict]:
    """Convergence verdict for the integral of exp(phi(x)) dx as x -> infinity.

    The verdict comes from a hierarchy of fits: the power part of phi first,
    then the log factor, then the log-log factor. Returns "convergent",
    "divergent" or "indeterminate" along with the fitted exponents.
    """
    x = np.asarray(x, dtype=float)
    phi = np.asarray(log_integrand(x), dtype=float)
    diagnostics = {"window": [float(x[0]), float(x[-1])]}
    if np.all(np.isneginf(phi)):
        diagnostics["stage"] = "vanishing"
        return "convergent", diagnostics
    if not np.all(np.isfinite(phi)):
        diagnostics["stage"] = "non-finite"
        return "divergent", diagnostics

    lx = np.log(x)
    coef, _, _ = fit_linear(np.column_stack([x, lx]), phi)
    diagnostics["power"] = float(coef[0])
    if coef[0] > POWER_BAND:
        return "divergent", diagnostics
    if coef[0] < -POWER_BAND:
        return "convergent", diagnostics

    llx = np.log(lx)
    coef, _, _ = fit_linear(np.column_stack([lx, llx]), phi)
    beta = -float(coef[0])
    diagnostics["log_exponent"] = beta
    if beta < 1.0 - POWER_BAND:
        return "divergent", diagnostics
    if beta > 1.0 + POWER_BAND:
        return "convergent", diagnostics

    coef, _, _ = fit_linear(llx[:, None], phi + lx)
    gamma = -float(coef[0])
    diagnostics["loglog_exponent"] = gamma
    if gamma < 1.0 - POWER_BAND:
        return "divergent", diagnostics
    if gamma > 1.0 + POWER_BAND:
        return "convergent", diagnostics
    return "indeterminate", diagnostics


def log_nodes(u_lo: float, u_hi: float, step: float = 1.0 / 16, ratio: float = 1.0 + 1.0 / 64,
              switch: float = 100.0) -> np.ndarray:
    """Interval edges in the log variable: uniform up to `switch`, geometric beyond"""
    u_lo = float(u_lo)
    u_hi = float(u_hi)
    uniform_top = min(u_hi, switch)
    count = max(2, int(np.ceil((uniform_top - u_lo) / step)) + 1)
    edges = np.linspace(u_lo, uniform_top, count)
    if u_hi > switch:
        steps = int(np.ceil(np.log(u_hi / switch) / np.log(ratio)))
        edges = np.concatenate([edges, switch * ratio ** np.arange(1, steps + 1)])
    return edges


class LogCumulativeIntegral:
    """Cumulative integral of exp(phi(U)) dU tabulated in the log domain.

    Used for integrals in t = e^U whose integrands span hundreds of orders of
    magnitude. Tails beyond the tabulated range are closed analytically from
    the local slope of phi: power-type tails converge, anything slower is
    reported as divergent (+inf).
    """

    def __init__(self, phi: Callable[[np.ndarray], np.ndarray], u_lo: float = -70.0, u_hi: float = 100.0,
                 from_top: bool = False, order: int = 8, switch: float = 100.0):
        self.phi = phi
        self.order = order
        self.from_top = from_top
        self.edges = log_nodes(u_lo, u_hi, switch=switch)
        self.u_lo = float(self.edges[0])
        self.u_hi = float(self.edges[-1])

        nodes, weights = composite_nodes(self.edges, order)
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            values = np.asarray(phi(nodes), dtype=float)
            pieces = logsumexp((values + np.log(weights)).reshape(-1, order), axis=1)
        if np.any(np.isnan(pieces)):
            raise ValueError("Integrand produced NaN values")
        self.log_pieces = pieces

        self.low_slope = self._slope(self.u_lo, 1.0)
        self.high_slope = self._slope(self.u_hi, -1.0)
        self.log_low_tail = self._low_tail()
        self.log_high_tail = self._high_tail()

        if from_top:
            acc = np.logaddexp.accumulate(pieces[::-1])[::-1]
            self.table = np.append(np.logaddexp(acc, self.log_high_tail), self.log_high_tail)
        else:
            acc = np.logaddexp.accumulate(pieces)
            self.table = np.insert(np.logaddexp(acc, self.log_low_tail), 0, self.log_low_tail)
        logger.debug(f"Tabulated log integral on [{self.u_lo:.3g}, {self.u_hi:.3g}] with {len(pieces)} intervals")

    def _slope(self, u: float, direction: float) -> float:
        delta = 1e-3 * max(1.0, abs(u))
        with np.errstate(divide="ignore", invalid="ignore"):
            a, b = np.asarray(self.phi(np.array([u, u + direction * delta])), dtype=float)
        if not (np.isfinite(a) and np.isfinite(b)):
            return 0.0 if a == b else (np.inf if b > a else -np.inf) * direction
        return float((b - a) / (direction * delta))

    def _low_tail(self) -> float:
        value = float(self.phi(np.array([self.u_lo]))[0])
        if np.isneginf(value):
            return -np.inf
        if self.low_slope > 1e-12:
            return value - np.log(self.low_slope)
        return np.inf

    def _high_tail(self) -> float:
        value = float(self.phi(np.array([self.u_hi]))[0])
        if np.isneginf(value):
            return -np.inf
        # phi ~ -k log U near the top covers both power and exponential decay in t
        k = -self.high_slope * self.u_hi
        if k > 1.0 + POWER_BAND:
            return value + np.log(self.u_hi) - np.log(k - 1.0)
        return np.inf

    @property
    def log_total(self) -> float:
        """Log of the integral over the whole line"""
        if self.from_top:
            return float(np.logaddexp(self.table[0], self.log_low_tail))
        return float(np.logaddexp(self.table[-1], self.log_high_tail))

    def _partial(self, left: np.ndarray, right: np.ndarray) -> np.ndarray:
        x, w = gauss_legendre(self.order)
        width = right - left
        pts = left[:, None] + width[:, None] * x[None, :]
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            vals = np.asarray(self.phi(pts.ravel()), dtype=float).reshape(pts.shape)
            out = logsumexp(vals + np.log(w)[None, :], axis=1) + np.log(np.where(width > 0, width, 1.0))
        return np.where(width > 0, out, -np.inf)

    def __call__(self, u) -> np.ndarray:
        """Log of the integral from -inf to u (or from u to +inf when from_top)"""
        u = np.atleast_1d(np.asarray(u, dtype=float))
        out = np.empty_like(u)
        inside = (u >= self.u_lo) & (u <= self.u_hi)
        below = u < self.u_lo
        above = u > self.u_hi

        if np.any(inside):
            ui = u[inside]
            idx = np.clip(np.searchsorted(self.edges, ui, side="right") - 1, 0, len(self.edges) - 2)
            if self.from_top:
                right = self.edges[idx + 1]
                out[inside] = np.logaddexp(self.table[idx + 1], self._partial(ui, right))
            else:
                left = self.edges[idx]
                out[inside] = np.logaddexp(self.table[idx], self._partial(left, ui))

        if np.any(below):
            ub = u[below]
            phi_lo = float(self.phi(np.array([self.u_lo]))[0])
            if self.from_top:
                extra = phi_lo + _log_exp_integral(self.low_slope, ub - self.u_lo)
                out[below] = np.logaddexp(self.table[0], extra)
            elif self.low_slope > 1e-12:
                out[below] = phi_lo + self.low_slope * (ub - self.u_lo) - np.log(self.low_slope)
            else:
                out[below] = np.inf

        if np.any(above):
            ua = u[above]
            phi_hi = float(self.phi(np.array([self.u_hi]))[0])
            s = self.high_slope
            if self.from_top:
                out[above] = phi_hi + s * (ua - self.u_hi) - np.log(-s) if s < -1e-12 else np.inf
            else:
                extra = phi_hi + _log_exp_integral(s, ua - self.u_hi)
                out[above] = np.logaddexp(self.table[-1], extra)
        return out


def _log_exp_integral(slope: float, span: np.ndarray) -> np.ndarray:
    """log |integral of exp(slope * v) dv over [0, span]| for either sign of span"""
    span = np.asarray(span, dtype=float)
    x = slope * span
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        if abs(slope) < 1e-300:
            return np.log(np.abs(span))
        # |expm1(x)| / |slope| computed without overflow
        big = x > 30.0
        safe = np.where(big, 0.0, x)
        small_part = np.log(np.abs(np.expm1(safe)))
        return np.where(big, x + np.log1p(-np.exp(-x)), small_part) - np.log(abs(slope))


class MemoTable:
    """Small thread-safe memo for scalar evaluations, evicting least recently used keys"""

    def __init__(self, limit: int = 4096):
        self._lock = threading.Lock()
        self._data = OrderedDict()
        self._limit = limit

    def get(self, key, compute: Callable[[], float]) -> float:
        with self._lock:
            if key in self._data:
                self._data.move_to_end(key)
                return self._data[key]
        value = compute()
        with self._lock:
            self._data[key] = value
            self._data.move_to_end(key)
            while len(self._data) > self._limit:
                self._data.popitem(last=False)
        return value


def jsonable(value):
    """Replace non-finite floats by string markers for JSON output"""
    if isinstance(value, dict):
        return {k: jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return jsonable(value.tolist())
    if isinstance(value, (np.floating, float)):
        value = float(value)
        if np.isnan(value):
            return "nan"
        if np.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.bool_):
        return bool(value)
    return value


def smallest_constant(
    lhs: float,
    rhs: Callable[[float], float],
    budget: float = 0.0,
    tolerance: float = 0.0,
    c_min: float = C_MIN,
    c_max: float = C_CAP,
    per_decade: int = 20,
    refine: int = 30,
) -> Tuple[Optional[float], float]:
    """Smallest C on a log grid with lhs <= rhs(C) * (1 + tolerance) + budget.

    rhs must be non-decreasing in C. The first grid hit is refined by
    geometric bisection against the previous grid point. Returns (None, rhs
    at c_max) when no C up to c_max works.
    """
    def holds(c):
        value = rhs(c)
        return lhs <= value * (1.0 + tolerance) + budget, value

    grid = log_grid(c_min, c_max, per_decade)
    previous = None
    for c in grid:
        ok, value = holds(c)
        if ok:
            break
        previous = c
    else:
        return None, value
    if previous is None:
        return float(c), value

    lo, hi, hi_value = previous, c, value
    for _ in range(refine):
        mid = float(np.sqrt(lo * hi))
        ok, mid_value = holds(mid)
        if ok:
            hi, hi_value = mid, mid_value
        else:
            lo = mid
    return float(hi), hi_value
