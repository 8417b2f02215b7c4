import logging
from math import comb, factorial
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.special import gamma

from orlicz_kit.exceptions import ParameterError, PreconditionError
from orlicz_kit.models.grid import GridFunction, Interpolation, MonotoneProfile
from orlicz_kit.models.schemas import Domain, FractionalParams, HardyReport
from orlicz_kit.services.norms import luxemburg_norm, orlicz_lorentz_norm, profile_nodes
from orlicz_kit.services.targets import build_hat, build_sobolev_conjugate
from orlicz_kit.services.young import YoungFunction
from orlicz_kit.utils.helpers import C_CAP, smallest_constant

logger = logging.getLogger(__name__)

HARDY_TOLERANCE = 1e-6


def unit_ball_volume(n: int) -> float:
    """omega_n, the measure of the unit ball of R^n"""
    return float(np.pi ** (n / 2.0) / gamma(n / 2.0 + 1.0))


def _cells(f: GridFunction) -> Tuple[np.ndarray, np.ndarray]:
    if f.dim != 1 or f.domain.kind == "radial" or f.domain.bounds[0][0] != 0.0:
        raise ParameterError("Hardy operators act on grid functions over (0, L)")
    edges = np.linspace(0.0, f.domain.bounds[0][1], f.values.size + 1)
    return edges, f.values


def _require_nonnegative(f: GridFunction, name: str, strict: bool = True):
    if np.any(f.values < 0):
        if strict:
            raise PreconditionError(f"{name} needs a non-negative function")
        logger.warning(f"{name} applied to a function with negative values")


def _power_tails(edges: np.ndarray, values: np.ndarray, q: float) -> np.ndarray:
    """tails[k] = integral over (e_k, L) of f(r) r^(q-1) dr"""
    with np.errstate(divide="ignore", invalid="ignore"):
        pieces = values * (edges[1:] ** q - edges[:-1] ** q) / q
    return np.append(np.cumsum(pieces[::-1])[::-1], 0.0)


def _tail_integral(edges: np.ndarray, values: np.ndarray, q: float, a) -> np.ndarray:
    """Integral over (a, L) of f(r) r^(q-1) dr for a > 0, exact for step f"""
    a = np.atleast_1d(np.asarray(a, dtype=float))
    tails = _power_tails(edges, values, q)
    idx = np.clip(np.searchsorted(edges, a, side="right") - 1, 0, len(values) - 1)
    safe = np.where(a > 0, a, edges[1])
    inside = tails[idx + 1] + values[idx] * (edges[idx + 1] ** q - safe ** q) / q
    return np.where(a >= edges[-1], 0.0, inside)


def _nested_integral(edges: np.ndarray, values: np.ndarray, theta: float, m: int, a) -> np.ndarray:
    """(1/m!) integral over (a, L) of f(r) r^(theta-m-1) (r-a)^m dr, by binomial expansion"""
    a = np.atleast_1d(np.asarray(a, dtype=float))
    out = np.zeros_like(a)
    positive = a > 0
    ap = a[positive]
    for j in range(m + 1):
        out[positive] += comb(m, j) * (-ap) ** (m - j) * _tail_integral(edges, values, j - m + theta, ap)
    if np.any(~positive):
        out[~positive] = _power_tails(edges, values, theta)[0]
    return out / factorial(m)


def hardy_Ts(f: GridFunction, fp: FractionalParams) -> GridFunction:
    """Cell averages of T_s f(r) = integral over (r, L) of rho^(-1+s/n) f(rho) drho"""
    _require_nonnegative(f, "T_s", strict=False)
    edges, v = _cells(f)
    theta = fp.theta
    h = edges[1] - edges[0]
    tails = _power_tails(edges, v, theta)
    lo, hi = edges[:-1], edges[1:]
    own = v / theta * (hi ** theta - (hi ** (theta + 1.0) - lo ** (theta + 1.0)) / ((theta + 1.0) * h))
    return GridFunction(domain=f.domain, values=tails[1:] + own)


def hardy_profile(f: GridFunction, fp: FractionalParams) -> MonotoneProfile:
    """T_s f as an exact function of r"""
    edges, v = _cells(f)
    theta = fp.theta
    return MonotoneProfile(func=lambda r: _nested_integral(edges, v, theta, 0, r), edges=edges)


def radial_profile(f: GridFunction, fp: FractionalParams, m: int = 0) -> MonotoneProfile:
    """Decreasing rearrangement r -> u*(r) of the radial test function built from f"""
    edges, v = _cells(f)
    theta = fp.theta
    return MonotoneProfile(func=lambda r: _nested_integral(edges, v, theta, m, r), edges=edges)


def make_test_function(f: GridFunction, fp: FractionalParams, m: Optional[int] = None,
                       cells: int = 64, interpolation: Interpolation = "linear") -> GridFunction:
    """Radial function u(x) = U(omega_n |x|^n) on a grid over the ball carrying its support.

    U(a) = (1/m!) * integral over (a, inf) of f(r) r^(-m-1+s/n) (r-a)^m dr, which
    is the closed form of the m-fold iterated integral.
    """
    m = fp.integer_part if m is None else int(m)
    if m < 0 or m > fp.integer_part:
        raise ParameterError(f"Test functions need 0 <= m <= [s] = {fp.integer_part}, got m={m}")
    if fp.n not in (1, 2):
        raise ParameterError(f"Test functions are sampled for n in {{1, 2}}, got n={fp.n}")
    _require_nonnegative(f, "make_test_function")
    if np.any(np.diff(f.values) > 0):
        raise PreconditionError("make_test_function needs a non-increasing f")

    edges, v = _cells(f)
    omega = unit_ball_volume(fp.n)
    radius = (edges[-1] / omega) ** (1.0 / fp.n)
    theta = fp.theta

    def u(*x):
        norm = np.sqrt(sum(c ** 2 for c in x))
        a = omega * norm ** fp.n
        return _nested_integral(edges, v, theta, m, a.ravel()).reshape(np.shape(a))

    domain = Domain.interval(-radius, radius) if fp.n == 1 else Domain.box(-radius, radius, -radius, radius)
    logger.debug(f"Sampling test function with m={m} on radius {radius:.4g}")
    return GridFunction.from_callable(u, domain, cells, interpolation=interpolation)


def nested_lower_constant(f: GridFunction, fp: FractionalParams, m: int = 1, points: int = 200) -> float:
    """Largest c with U(a) >= c * integral over (2a, inf) of f r^(-1+s/n) dr, sampled in a"""
    edges, v = _cells(f)
    a = np.geomspace(edges[-1] * 1e-6, 0.5 * edges[-1], points)
    lower = _tail_integral(edges, v, fp.theta, 2.0 * a)
    upper = _nested_integral(edges, v, fp.theta, m, a)
    keep = lower > 0
    if not np.any(keep):
        return np.inf
    return float(np.min(upper[keep] / lower[keep]))


def _cell_index(edges: np.ndarray, r: np.ndarray, count: int) -> np.ndarray:
    return np.clip(np.searchsorted(edges, r, side="right") - 1, 0, count - 1)


def _sum(weights: np.ndarray, values: np.ndarray) -> float:
    with np.errstate(invalid="ignore", over="ignore"):
        total = float(np.dot(weights, values))
    return total if np.isfinite(total) else np.inf


def verify_hardy_down(A: YoungFunction, s: float, f: GridFunction, order: int = 8,
                      tolerance: float = HARDY_TOLERANCE) -> HardyReport:
    """Integral of A(r^-s int_0^r f) dr/r against that of A(r^(1-s) f / s) dr/r, constant 1/s"""
    if not 0.0 < s < 1.0:
        raise ParameterError(f"Exponent s must lie in (0, 1), got {s}")
    _require_nonnegative(f, "verify_hardy_down")
    edges, v = _cells(f)
    cumulative = np.concatenate([[0.0], np.cumsum(v * np.diff(edges))])

    def sides(k):
        r, w = profile_nodes(edges, k)
        idx = _cell_index(edges, r, len(v))
        inner = cumulative[idx] + v[idx] * (r - edges[idx])
        with np.errstate(over="ignore"):
            lhs = _sum(w / r, A.evaluate(r ** (-s) * inner))
            rhs = _sum(w / r, A.evaluate(r ** (1.0 - s) * v[idx] / s))
        return lhs, rhs

    lhs, rhs = sides(order)
    lhs_coarse, rhs_coarse = sides(max(2, order // 2))
    budget = abs(lhs - lhs_coarse) + abs(rhs - rhs_coarse) if np.isfinite(lhs + rhs) else 0.0
    if not np.isfinite(rhs):
        logger.warning("Right-hand side of the Hardy inequality is infinite; check is vacuous")
        passed = True
    else:
        passed = bool(lhs <= rhs * (1.0 + tolerance) + budget)
    return HardyReport(kind="L1-modular", check_id="hardy-down",
                       statement="int A(r^-s int_0^r f) dr/r <= int A(r^(1-s) f / s) dr/r",
                       lhs=lhs, rhs=rhs, constant=1.0 / s, passed=passed, error_budget=budget,
                       tolerance=tolerance, details={"s": s, "cells": int(v.size)})


def verify_hardy_up(A: YoungFunction, fp: FractionalParams, f: GridFunction, A_hat: Optional[YoungFunction] = None,
                    c_cap: float = C_CAP, order: int = 8, tolerance: float = HARDY_TOLERANCE) -> HardyReport:
    """Smallest C with int hat_A(r^-s int_r^L f) r^(n-1) dr <= int A(C r^(1-s) f) r^(n-1) dr"""
    _require_nonnegative(f, "verify_hardy_up")
    A_hat = A_hat or build_hat(A, fp)
    edges, v = _cells(f)
    n, s = fp.n, fp.s

    def lhs_at(k):
        r, w = profile_nodes(edges, k)
        inner = _tail_integral(edges, v, 1.0, r)
        with np.errstate(over="ignore"):
            return _sum(w * r ** (n - 1), A_hat.evaluate(r ** (-s) * inner))

    r, w = profile_nodes(edges, order)
    weights = w * r ** (n - 1)
    amp = r ** (1.0 - s) * v[_cell_index(edges, r, len(v))]

    def rhs(c):
        with np.errstate(over="ignore"):
            return _sum(weights, A.evaluate(c * amp))

    lhs = lhs_at(order)
    budget = abs(lhs - lhs_at(max(2, order // 2))) if np.isfinite(lhs) else 0.0
    constant, rhs_value = smallest_constant(lhs, rhs, budget=budget, tolerance=tolerance, c_max=c_cap)
    if constant is None:
        logger.warning(f"No constant up to {c_cap:g} found for the hat-function Hardy inequality with {A!r}")
    return HardyReport(kind="L2-modular", check_id="hardy-up",
                       statement="int hatA(r^-s int_r^L f) r^(n-1) dr <= int A(C r^(1-s) f) r^(n-1) dr",
                       lhs=lhs, rhs=rhs_value, constant=constant, passed=constant is not None,
                       error_budget=budget, tolerance=tolerance,
                       details={"n": n, "s": s, "c_cap": c_cap, "cells": int(v.size)})


def _norm_ratio(lhs: float, rhs: float) -> float:
    if rhs > 0:
        return lhs / rhs
    return 0.0 if lhs == 0 else np.inf


def verify_thmA(A: YoungFunction, fp: FractionalParams, f: GridFunction, A_ns: Optional[YoungFunction] = None,
                c_cap: float = C_CAP) -> HardyReport:
    """||T_s f|| in L^{A_{n/s}}(0, L) against ||f|| in L^A(0, L)"""
    A_ns = A_ns or build_sobolev_conjugate(A, fp)
    target = luxemburg_norm(A_ns, hardy_profile(f, fp))
    source = luxemburg_norm(A, f)
    ratio = _norm_ratio(target.value, source.value)
    logger.info(f"Orlicz target ratio for {A!r}: {ratio:.6g}")
    return HardyReport(kind="thmA-norm", check_id="hardy-thmA",
                       statement="||T_s f||_{L^A_{n/s}} <= C ||f||_{L^A}",
                       lhs=target.value, rhs=c_cap * source.value, constant=ratio, passed=bool(ratio <= c_cap),
                       error_budget=target.quadrature_error,
                       details={"target_norm": target.value, "source_norm": source.value, "c_cap": c_cap})


def verify_thmB(A: YoungFunction, fp: FractionalParams, f: GridFunction, A_hat: Optional[YoungFunction] = None,
                A_ns: Optional[YoungFunction] = None, c_cap: float = C_CAP) -> HardyReport:
    """||T_s f|| in L(hat_A, n/s)(0, L) against ||f|| in L^A, with the Orlicz target as a lower bound"""
    A_hat = A_hat or build_hat(A, fp)
    A_ns = A_ns or build_sobolev_conjugate(A, fp)
    profile = hardy_profile(f, fp)
    lorentz = orlicz_lorentz_norm(A_hat, fp.ratio, profile)
    orlicz = luxemburg_norm(A_ns, profile)
    source = luxemburg_norm(A, f)
    ratio = _norm_ratio(lorentz.value, source.value)
    embedding = _norm_ratio(lorentz.value, orlicz.value) if orlicz.value > 0 else None
    passed = ratio <= c_cap and (embedding is None or embedding >= 1.0 / c_cap)
    logger.info(f"Orlicz-Lorentz target ratio for {A!r}: {ratio:.6g}, embedding constant {embedding}")
    return HardyReport(kind="thmB-norm", check_id="hardy-thmB",
                       statement="||T_s f||_{L(hatA, n/s)} <= C ||f||_{L^A} and >= c ||T_s f||_{L^A_{n/s}}",
                       lhs=lorentz.value, rhs=c_cap * source.value, constant=ratio, passed=bool(passed),
                       error_budget=lorentz.quadrature_error,
                       details={"lorentz_norm": lorentz.value, "orlicz_norm": orlicz.value,
                                "source_norm": source.value, "embedding_constant": embedding, "c_cap": c_cap})


def _monomial_ratio(x: np.ndarray, y: np.ndarray, alpha: Sequence[int], beta: float) -> np.ndarray:
    """|x_a1...x_ai |x|^b - y_a1...y_ai |y|^b| / (|x-y| |x|^(b+i-1))"""
    i = len(alpha)
    nx = np.linalg.norm(x, axis=1)
    ny = np.linalg.norm(y, axis=1)
    px = np.prod(x[:, list(alpha)], axis=1) * nx ** beta
    py = np.prod(y[:, list(alpha)], axis=1) * ny ** beta
    gap = np.linalg.norm(x - y, axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.abs(px - py) / (gap * nx ** (beta + i - 1))
    return np.where(gap > 1e-8, ratio, 0.0)


def _pairs(rng: np.random.Generator, count: int, n: int) -> Tuple[np.ndarray, np.ndarray]:
    x = rng.standard_normal((count, n))
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    direction = rng.standard_normal((count, n))
    direction /= np.linalg.norm(direction, axis=1, keepdims=True)
    return x, direction * rng.uniform(1.0, 2.0, (count, 1))


def algebraic_lemma_constant(n: int, i: int, beta: float, alpha: Optional[Sequence[int]] = None,
                             samples: int = 1000, seed: Optional[int] = None, climb_steps: int = 200) -> float:
    """Sampled supremum K of the monomial difference ratio over |x| <= |y| <= 2|x|.

    The ratio is scale invariant, so x is drawn on the unit sphere. The best
    samples are then improved by a shrinking random hill climb.
    """
    if i < 0 or i > n:
        raise ParameterError(f"Monomial degree must lie in [0, n], got i={i}")
    if beta < -i:
        raise ParameterError(f"Exponent beta must be at least -i, got {beta}")
    alpha = tuple(k % n for k in range(i)) if alpha is None else tuple(alpha)
    if len(alpha) != i or any(not 0 <= k < n for k in alpha):
        raise ParameterError(f"Index tuple {alpha} does not match i={i}, n={n}")

    rng = np.random.default_rng(seed)
    x, y = _pairs(rng, samples, n)
    ratios = _monomial_ratio(x, y, alpha, beta)
    best = float(np.max(ratios))

    for start in np.argsort(ratios)[-10:]:
        cx, cy, current = x[start], y[start], ratios[start]
        step = 0.1
        for _ in range(climb_steps):
            tx = cx + step * rng.standard_normal(n)
            tx /= np.linalg.norm(tx)
            ty = cy + step * rng.standard_normal(n)
            radius = np.clip(np.linalg.norm(ty), 1.0, 2.0)
            ty = ty / np.linalg.norm(ty) * radius
            value = float(_monomial_ratio(tx[None, :], ty[None, :], alpha, beta)[0])
            if value > current:
                cx, cy, current = tx, ty, value
            else:
                step = max(step * 0.97, 1e-4)
        best = max(best, float(current))
    logger.debug(f"Monomial constant for n={n}, i={i}, beta={beta}: {best:.6g}")
    return best
