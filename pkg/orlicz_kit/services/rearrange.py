import logging
from typing import Optional

import numpy as np

from orlicz_kit.exceptions import ParameterError
from orlicz_kit.models.grid import GridFunction, RearrangedProfile
from orlicz_kit.models.schemas import Domain, VerificationReport
from orlicz_kit.services.young import YoungFunction

logger = logging.getLogger(__name__)

HL_TOLERANCE = 1e-12


def decreasing_rearrangement(u: GridFunction) -> RearrangedProfile:
    """Sort |u| in decreasing order; each cell keeps its measure"""
    values = np.abs(u.values.ravel())
    order = np.argsort(-values, kind="stable")
    cell = u.cell_measure
    breakpoints = cell * np.arange(1, values.size + 1)
    return RearrangedProfile(breakpoints=breakpoints, values=values[order], total_measure=u.total_measure,
                             kind="star", infinite=u.domain.infinite)


def maximal_average(p: RearrangedProfile) -> RearrangedProfile:
    """u**(r) = (1/r) * integral of u* over (0, r), exact for step profiles"""
    if p.kind != "star":
        raise ParameterError("Maximal average needs a decreasing rearrangement")
    if np.any(np.diff(p.values) > 0):
        raise ParameterError("Profile is not non-increasing")
    averages = p.cumulative() / p.breakpoints
    return RearrangedProfile(breakpoints=p.breakpoints, values=averages, total_measure=p.total_measure,
                             kind="doublestar", base=p.values, infinite=p.infinite)


def symmetric_rearrangement(u: GridFunction, n: int) -> GridFunction:
    """Radially non-increasing function equimeasurable with |u|.

    n=1 gives an interval centred at 0 with half-size cells, so that the
    pair of cells at each distance carries exactly one cell of u*. n=2 gives
    a radial grid of equal-measure annuli.
    """
    star = decreasing_rearrangement(u)
    total = star.total_measure
    if n == 1:
        values = np.concatenate([star.values[::-1], star.values])
        domain = Domain.interval(-0.5 * total, 0.5 * total)
        return GridFunction(domain=domain, values=values)
    if n == 2:
        radius = float(np.sqrt(total / np.pi))
        return GridFunction(domain=Domain(kind="radial", bounds=[(0.0, radius)]), values=star.values)
    raise ParameterError(f"Symmetric rearrangement supports n in {{1, 2}}, got {n}")


def equimeasurable(u: GridFunction, v: GridFunction, rtol: float = 1e-12) -> bool:
    """Distribution functions of |u| and |v| agree"""
    # compare the two rearrangements as step functions of r
    pu, pv = decreasing_rearrangement(u), decreasing_rearrangement(v)
    if not np.isclose(pu.total_measure, pv.total_measure, rtol=rtol):
        return False
    edges = np.union1d(pu.breakpoints, pv.breakpoints)
    mids = 0.5 * (np.concatenate([[0.0], edges[:-1]]) + edges)
    return bool(np.allclose(pu.evaluate(mids), pv.evaluate(mids), rtol=rtol, atol=0.0))


def dilate(f: GridFunction, lam: float) -> GridFunction:
    """(E_lam f)(t) = f(t/lam) on the same grid over (0, L), as exact cell averages"""
    if lam <= 0:
        raise ParameterError(f"Dilation factor must be positive, got {lam}")
    if f.dim != 1 or f.domain.bounds[0][0] != 0.0:
        raise ParameterError("Dilation acts on grid functions over (0, L)")
    h = float(f.widths[0])
    edges = h * np.arange(f.values.size + 1)
    cumulative = np.concatenate([[0.0], np.cumsum(f.values) * h])

    def antiderivative(x):
        x = np.clip(x, 0.0, edges[-1])
        idx = np.clip(np.searchsorted(edges, x, side="right") - 1, 0, f.values.size - 1)
        return cumulative[idx] + f.values[idx] * (x - edges[idx])

    values = lam / h * (antiderivative(edges[1:] / lam) - antiderivative(edges[:-1] / lam))
    return GridFunction(domain=f.domain, values=values)


def hardy_littlewood_check(u: GridFunction, v: GridFunction, A: Optional[YoungFunction] = None) -> VerificationReport:
    """Integral of |u v| (or of A(|u v|)) is at most that of u* v* (or A(u* v*))"""
    if u.shape != v.shape or not np.isclose(u.cell_measure, v.cell_measure):
        raise ParameterError("Hardy-Littlewood check needs functions on the same grid")
    cell = u.cell_measure
    product = np.abs(u.values * v.values).ravel()
    sorted_product = np.sort(np.abs(u.values).ravel())[::-1] * np.sort(np.abs(v.values).ravel())[::-1]
    if A is None:
        lhs, rhs = cell * float(product.sum()), cell * float(sorted_product.sum())
        check_id, statement = "hardy-littlewood", "int |uv| <= int u* v*"
    else:
        lhs = cell * float(np.sum(A.evaluate(product)))
        rhs = cell * float(np.sum(A.evaluate(sorted_product)))
        check_id, statement = "hardy-littlewood-modular", "int A(|uv|) <= int A(u* v*)"
    budget = HL_TOLERANCE * max(abs(rhs), 1.0)
    return VerificationReport(check_id=check_id, statement=statement, lhs=lhs, rhs=rhs,
                              passed=bool(lhs <= rhs + budget), error_budget=budget, provenance="exact")
