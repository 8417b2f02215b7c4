import logging
from typing import Callable, Optional, Tuple, Union

import numpy as np

from orlicz_kit.exceptions import NotNormableError, ParameterError
from orlicz_kit.models.grid import GridFunction, MonotoneProfile, RearrangedProfile
from orlicz_kit.models.schemas import Domain, NormResult
from orlicz_kit.services.rearrange import decreasing_rearrangement, maximal_average
from orlicz_kit.services.young import YoungFunction
from orlicz_kit.utils.helpers import composite_nodes, tail_verdict

logger = logging.getLogger(__name__)

NORM_REL_TOL = 1e-10
BRACKET_LIMIT = 1e300
# The first cell of a weighted profile is integrated in z = log r over this span
SINGULAR_SPAN = 80.0
SINGULAR_PANEL = 2.0
TAIL_WINDOW = (np.log(1e4), np.log(1e16))

Source = Union[GridFunction, RearrangedProfile, MonotoneProfile]


def luxemburg_from_modular(modular: Callable[[float], float], guess: float, quadrature_error: float = 0.0,
                           rel_tol: float = NORM_REL_TOL) -> NormResult:
    """inf{lam > 0 : modular(lam) <= 1} for a modular non-increasing in lam"""
    lo, hi = guess / 10.0, guess * 10.0
    iterations = 0
    while modular(lo) <= 1.0:
        lo /= 10.0
        iterations += 1
        if lo < 1e-300:
            return NormResult(value=0.0, modular=0.0, iterations=iterations, quadrature_error=quadrature_error)
    while modular(hi) > 1.0:
        hi *= 10.0
        iterations += 1
        if hi > BRACKET_LIMIT:
            logger.warning("Modular stays above 1 on the whole bracket; reporting an infinite norm")
            return NormResult(value=np.inf, modular=np.inf, iterations=iterations,
                              quadrature_error=quadrature_error)
    while hi / lo - 1.0 > rel_tol:
        mid = np.sqrt(lo * hi)
        if modular(mid) > 1.0:
            lo = mid
        else:
            hi = mid
        iterations += 1
    return NormResult(value=hi, modular=modular(hi), iterations=iterations, quadrature_error=quadrature_error)


def luxemburg_from_samples(A: YoungFunction, amp: np.ndarray, weight: np.ndarray,
                           quadrature_error: float = 0.0) -> NormResult:
    """inf{lam > 0 : sum of weight * A(amp / lam) <= 1}"""
    amp = np.abs(np.asarray(amp, dtype=float)).ravel()
    weight = np.asarray(weight, dtype=float).ravel()
    keep = (amp > 0) & (weight > 0)
    amp, weight = amp[keep], weight[keep]
    if amp.size == 0:
        return NormResult(value=0.0, modular=0.0, iterations=0, quadrature_error=quadrature_error)

    def modular(lam):
        with np.errstate(over="ignore", invalid="ignore"):
            return float(np.dot(weight, A.evaluate(amp / lam)))

    return luxemburg_from_modular(modular, float(np.dot(weight, amp) / weight.sum()), quadrature_error)


def profile_nodes(edges: np.ndarray, order: int = 8) -> Tuple[np.ndarray, np.ndarray]:
    """Quadrature nodes for integrals over (0, edges[-1]) with a possible singularity at 0.

    edges[0] must be 0. The first cell is integrated in z = log r, the others
    with Gauss-Legendre on each cell.
    """
    edges = np.asarray(edges, dtype=float)
    first = edges[1]
    z_edges = np.arange(np.log(first) - SINGULAR_SPAN, np.log(first) + 1e-12, SINGULAR_PANEL)
    if z_edges[-1] < np.log(first):
        z_edges = np.append(z_edges, np.log(first))
    z, wz = composite_nodes(z_edges, order)
    r_first, w_first = np.exp(z), wz * np.exp(z)
    if len(edges) > 2:
        r_rest, w_rest = composite_nodes(edges[1:], order)
    else:
        r_rest, w_rest = np.empty(0), np.empty(0)
    return np.concatenate([r_first, r_rest]), np.concatenate([w_first, w_rest])


def _profile(f: Source):
    if isinstance(f, (RearrangedProfile, MonotoneProfile)):
        return f
    return decreasing_rearrangement(f)


def _profile_edges(p) -> np.ndarray:
    return np.concatenate([[0.0], p.breakpoints])


def orlicz_modular(A: YoungFunction, f: Source, lam: float = 1.0) -> float:
    """Integral of A(|f| / lam)"""
    if isinstance(f, RearrangedProfile) and f.kind == "star":
        return float(np.dot(f.widths, A.evaluate(f.values / lam)))
    if isinstance(f, (RearrangedProfile, MonotoneProfile)):
        r, w = profile_nodes(_profile_edges(f))
        return float(np.dot(w, A.evaluate(f.evaluate(r) / lam)))
    return float(f.cell_measure * np.sum(A.evaluate(np.abs(f.values).ravel() / lam)))


def luxemburg_norm(A: YoungFunction, f: Source) -> NormResult:
    if isinstance(f, RearrangedProfile) and f.kind == "star":
        return luxemburg_from_samples(A, f.values, f.widths)
    if isinstance(f, (RearrangedProfile, MonotoneProfile)):
        r, w = profile_nodes(_profile_edges(f))
        return luxemburg_from_samples(A, f.evaluate(r), w)
    return luxemburg_from_samples(A, f.values, np.full(f.values.size, f.cell_measure))


def weighted_profile_norm(A: YoungFunction, p: Union[RearrangedProfile, MonotoneProfile],
                          weight: Callable[[np.ndarray], np.ndarray], order: int = 8) -> NormResult:
    """Luxemburg norm of weight(r) * p(r) over (0, L)"""
    edges = _profile_edges(p)
    r, w = profile_nodes(edges, order)
    amp = weight(r) * p.evaluate(r)
    result = luxemburg_from_samples(A, amp, w)
    if order > 4 and np.isfinite(result.value) and result.value > 0:
        coarse = weighted_profile_norm(A, p, weight, order=4).value
        result.quadrature_error = abs(result.value - coarse)
    return result


def _check_upper_tail(A: YoungFunction, q: float):
    """Integral of A(t) / t^(1+q) over (1, inf) converges"""
    verdict, diagnostics = tail_verdict(lambda x: A.log_eval(x) - q * x, np.linspace(*TAIL_WINDOW, 200))
    if verdict != "convergent":
        raise NotNormableError(f"L({A!r}, {q}) is not normable: tail integral is {verdict} ({diagnostics})")


def _check_lower_tail(A: YoungFunction, q: float):
    """Integral of A(t) / t^(1 + q/(q+1)) over (0, 1) converges"""
    power = q / (q + 1.0)
    verdict, diagnostics = tail_verdict(lambda x: A.log_eval(-x) + power * x, np.linspace(*TAIL_WINDOW, 200))
    if verdict != "convergent":
        raise NotNormableError(f"L[{A!r}, {q}] on an infinite half-line is not normable: "
                               f"integral at zero is {verdict} ({diagnostics})")


def orlicz_lorentz_norm(A: YoungFunction, q: float, f: Source) -> NormResult:
    """||r^(-1/q) f*(r)|| in L^A(0, L)"""
    if not q > 1:
        raise ParameterError(f"Orlicz-Lorentz norms L(A, q) need q > 1, got {q}")
    _check_upper_tail(A, q)
    return weighted_profile_norm(A, _profile(f), lambda r: r ** (-1.0 / q))


def orlicz_lorentz_dual_norm(A: YoungFunction, q: float, f: Source) -> NormResult:
    """||r^(-1/q) f**(r)|| in L^A(0, L)"""
    if not q < -1:
        raise ParameterError(f"Orlicz-Lorentz norms L[A, q] need q < -1, got {q}")
    p = _profile(f)
    if p.infinite:
        _check_lower_tail(A, q)
    return weighted_profile_norm(A, maximal_average(p), lambda r: r ** (-1.0 / q))


def _check_lz_regime(sigma: float, p: float, gamma: float):
    if not 1.0 <= p <= np.inf or not 1.0 <= sigma <= np.inf:
        raise NotNormableError(f"Lorentz-Zygmund exponents must lie in [1, inf], got sigma={sigma}, p={p}")
    if sigma == 1.0 and p == 1.0 and gamma >= 0:
        return
    if 1.0 < sigma < np.inf:
        return
    if sigma == np.inf and p < np.inf and gamma + 1.0 / p < 0:
        return
    if sigma == np.inf and p == np.inf and gamma <= 0:
        return
    raise NotNormableError(f"Lorentz-Zygmund parameters sigma={sigma}, p={p}, gamma={gamma} "
                           f"are outside the supported regimes")


def lorentz_zygmund_norm(sigma: float, p: float, gamma: float, delta: float, f: Source,
                         L: Optional[float] = None) -> NormResult:
    """||r^(1/sigma - 1/p) log(1 + L/r)^gamma log(1 + log(1 + L/r))^delta f*(r)|| in L^p(0, L)"""
    _check_lz_regime(sigma, p, gamma)
    prof = _profile(f)
    L = prof.total_measure if L is None else float(L)
    inv_p = 0.0 if p == np.inf else 1.0 / p

    def weight(r):
        ell = np.log1p(L / r)
        return r ** (1.0 / sigma - inv_p) * ell ** gamma * np.log1p(ell) ** delta

    edges = _profile_edges(prof)
    if p == np.inf:
        if gamma == 0 and delta > 0 and 1.0 / sigma == 0.0 and prof.evaluate(0.0)[0] > 0:
            return NormResult(value=np.inf, modular=np.inf, iterations=0)
        r, _ = profile_nodes(edges)
        r = np.concatenate([r, prof.breakpoints])
        value = float(np.max(weight(r) * prof.evaluate(r)))
        return NormResult(value=value, modular=1.0 if value > 0 else 0.0, iterations=0)

    r, w = profile_nodes(edges)
    integral = float(np.dot(w, (weight(r) * prof.evaluate(r)) ** p))
    if not np.isfinite(integral):
        return NormResult(value=np.inf, modular=np.inf, iterations=0)
    value = integral ** inv_p
    return NormResult(value=value, modular=1.0 if value > 0 else 0.0, iterations=0)


def lorentz_norm(r: float, q: float, f: Source) -> NormResult:
    """Classical Lorentz L^{r,q} functional ||t^(1/r - 1/q) f*(t)|| in L^q"""
    return lorentz_zygmund_norm(r, q, 0.0, 0.0, f)


def l1_norm(f: Source) -> float:
    prof = _profile(f)
    if isinstance(prof, RearrangedProfile) and prof.kind == "star":
        return float(np.dot(prof.widths, prof.values))
    r, w = profile_nodes(_profile_edges(prof))
    return float(np.dot(w, prof.evaluate(r)))


def embedding_constant(norm: Callable[[GridFunction], NormResult], cells: int = 64) -> float:
    """c with ||f||_1 <= c ||f||_X on (0, 1), from the norm of the characteristic function"""
    chi = GridFunction(domain=Domain.interval(0.0, 1.0), values=np.ones(cells))
    return 1.0 / norm(chi).value


