import io
import json
import logging
from dataclasses import dataclass, field
from typing import Callable, List, Literal, Optional

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from orlicz_kit.exceptions import ParameterError
from orlicz_kit.models.schemas import Domain

logger = logging.getLogger(__name__)

Interpolation = Literal["constant", "linear"]


@dataclass(frozen=True)
class GridFunction:
    """Function sampled on a uniform grid of cells.

    `constant` interpolation reads the samples as a step function; `linear`
    reads them as samples of a continuous function at the cell centres.
    Radial domains hold one value per annulus of equal measure.
    """

    domain: Domain
    values: np.ndarray
    interpolation: Interpolation = "constant"
    derivative: Optional[np.ndarray] = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != self.domain.dim:
            raise ParameterError(f"Values of shape {values.shape} do not match a {self.domain.dim}-D domain")
        if not np.all(np.isfinite(values)):
            raise ParameterError("Grid values must be finite")
        if values.size == 0:
            raise ParameterError("Grid needs at least one cell")
        object.__setattr__(self, "values", values)
        if self.derivative is not None:
            derivative = np.asarray(self.derivative, dtype=float)
            if derivative.shape != values.shape:
                raise ParameterError("Derivative samples must match the value grid")
            object.__setattr__(self, "derivative", derivative)

    @classmethod
    def from_callable(cls, func: Callable, domain: Domain, cells, interpolation: Interpolation = "constant",
                      derivative: Optional[Callable] = None) -> "GridFunction":
        """Sample func at cell centres"""
        cells = (cells,) * domain.dim if np.isscalar(cells) else tuple(cells)
        axes = [lo + (np.arange(k) + 0.5) * (hi - lo) / k for (lo, hi), k in zip(domain.bounds, cells)]
        if domain.dim == 1:
            pts = (axes[0],)
        else:
            pts = tuple(np.meshgrid(*axes, indexing="ij"))
        values = np.asarray(func(*pts), dtype=float) * np.ones(cells)
        deriv = None if derivative is None else np.asarray(derivative(*pts), dtype=float) * np.ones(cells)
        return cls(domain=domain, values=values, interpolation=interpolation, derivative=deriv)

    @property
    def dim(self) -> int:
        return self.domain.dim

    @property
    def shape(self):
        return self.values.shape

    @property
    def widths(self) -> np.ndarray:
        return np.array([(hi - lo) / k for (lo, hi), k in zip(self.domain.bounds, self.values.shape)])

    @property
    def cell_measure(self) -> float:
        if self.domain.kind == "radial":
            return np.pi * self.domain.bounds[0][1] ** 2 / self.values.size
        return float(np.prod(self.widths))

    @property
    def total_measure(self) -> float:
        return self.cell_measure * self.values.size

    def axes(self) -> List[np.ndarray]:
        """Cell-centre coordinates along each axis"""
        return [lo + (np.arange(k) + 0.5) * w for (lo, _), k, w in
                zip(self.domain.bounds, self.values.shape, self.widths)]

    def centers(self) -> np.ndarray:
        """Cell-centre coordinates, shape (cells, dim)"""
        if self.domain.kind == "radial":
            edges = self.radial_edges()
            return (0.5 * (edges[:-1] + edges[1:]))[:, None]
        grids = np.meshgrid(*self.axes(), indexing="ij")
        return np.stack([g.ravel() for g in grids], axis=1)

    def radial_edges(self) -> np.ndarray:
        """Annulus radii of a radial grid (equal-measure annuli)"""
        k = np.arange(self.values.size + 1)
        return np.sqrt(k * self.cell_measure / np.pi)

    def evaluate(self, points) -> np.ndarray:
        """Point values, zero outside the domain. Points have shape (m, dim); radial grids take 2-D points."""
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        if self.domain.kind == "radial":
            r = np.linalg.norm(pts, axis=1)
            edges = self.radial_edges()
            idx = np.clip(np.searchsorted(edges, r, side="right") - 1, 0, self.values.size - 1)
            return np.where(r < edges[-1], self.values[idx], 0.0)

        inside = np.ones(len(pts), dtype=bool)
        for axis, (lo, hi) in enumerate(self.domain.bounds):
            inside &= (pts[:, axis] >= lo) & (pts[:, axis] < hi)
        if self.interpolation == "linear":
            axes = self.axes()
            clipped = np.column_stack([np.clip(pts[:, i], ax[0], ax[-1]) for i, ax in enumerate(axes)])
            if self.dim == 1:
                out = np.interp(clipped[:, 0], axes[0], self.values)
            else:
                out = RegularGridInterpolator(axes, self.values)(clipped)
        else:
            idx = [np.clip(((pts[:, i] - lo) / w).astype(int), 0, k - 1) for i, ((lo, _), w, k) in
                   enumerate(zip(self.domain.bounds, self.widths, self.values.shape))]
            out = self.values[tuple(idx)]
        return np.where(inside, out, 0.0)

    def with_values(self, values: np.ndarray, interpolation: Optional[Interpolation] = None) -> "GridFunction":
        return GridFunction(domain=self.domain, values=values,
                            interpolation=interpolation or self.interpolation)

    def scaled(self, factor: float) -> "GridFunction":
        derivative = None if self.derivative is None else factor * self.derivative
        return GridFunction(domain=self.domain, values=factor * self.values,
                            interpolation=self.interpolation, derivative=derivative)

    def mean(self) -> float:
        return float(np.mean(self.values))

    def to_csv(self) -> str:
        """CSV rows: cell index, coordinates, value"""
        buffer = io.StringIO()
        coords = self.centers()
        header = ["index"] + [f"x{i + 1}" for i in range(coords.shape[1])] + ["value"]
        buffer.write(",".join(header) + "\n")
        for i, (point, value) in enumerate(zip(coords, self.values.ravel())):
            buffer.write(",".join([str(i)] + [repr(float(c)) for c in point] + [repr(float(value))]) + "\n")
        return buffer.getvalue()

    def header_json(self) -> str:
        return json.dumps({
            "schema": 1,
            "domain": self.domain.model_dump(),
            "cells": list(self.values.shape),
            "cell_measure": self.cell_measure,
            "interpolation": self.interpolation,
        })

    @classmethod
    def from_csv(cls, header: str, body: str) -> "GridFunction":
        meta = json.loads(header)
        rows = [line.split(",") for line in body.strip().splitlines()[1:]]
        values = np.array([float(r[-1]) for r in rows]).reshape(meta["cells"])
        return cls(domain=Domain(**meta["domain"]), values=values, interpolation=meta["interpolation"])


@dataclass(frozen=True)
class RearrangedProfile:
    """Non-increasing profile on (0, L).

    kind="star": right-continuous step function, value[k] on [r_{k-1}, r_k).
    kind="doublestar": running average of the step profile `base`, with
    values[k] = u**(r_k) and exact evaluation in between.
    """

    breakpoints: np.ndarray
    values: np.ndarray
    total_measure: float
    kind: Literal["star", "doublestar"] = "star"
    base: Optional[np.ndarray] = field(default=None, repr=False)
    infinite: bool = False

    def __post_init__(self):
        object.__setattr__(self, "breakpoints", np.asarray(self.breakpoints, dtype=float))
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        if len(self.breakpoints) != len(self.values):
            raise ParameterError("Profile needs one value per breakpoint")
        if np.any(np.diff(self.breakpoints) <= 0):
            raise ParameterError("Profile breakpoints must increase")

    @property
    def left_edges(self) -> np.ndarray:
        return np.concatenate([[0.0], self.breakpoints[:-1]])

    @property
    def widths(self) -> np.ndarray:
        return np.diff(np.concatenate([[0.0], self.breakpoints]))

    def step_values(self) -> np.ndarray:
        """Values of the underlying step profile"""
        return self.values if self.kind == "star" else self.base

    def cumulative(self) -> np.ndarray:
        """Integral of the step profile from 0 to each breakpoint"""
        return np.cumsum(self.step_values() * self.widths)

    def integral_to(self, r) -> np.ndarray:
        """Exact integral of the step profile over (0, r)"""
        r = np.atleast_1d(np.asarray(r, dtype=float))
        steps = self.step_values()
        cum = np.concatenate([[0.0], self.cumulative()])
        idx = np.clip(np.searchsorted(self.breakpoints, r, side="right"), 0, len(steps) - 1)
        inside = cum[idx] + steps[idx] * (np.minimum(r, self.breakpoints[-1]) - self.left_edges[idx])
        return np.where(r >= self.breakpoints[-1], cum[-1], inside)

    def evaluate(self, r) -> np.ndarray:
        r = np.atleast_1d(np.asarray(r, dtype=float))
        if self.kind == "star":
            idx = np.searchsorted(self.breakpoints, r, side="right")
            padded = np.append(self.values, 0.0)
            return padded[np.clip(idx, 0, len(self.values))]
        steps = self.base
        with np.errstate(divide="ignore", invalid="ignore"):
            out = self.integral_to(r) / r
        return np.where(r > 0, out, steps[0])


@dataclass(frozen=True)
class MonotoneProfile:
    """Non-increasing function on (0, L) known in closed form.

    `edges` starts at 0 and lists the points where the function may fail to
    be smooth; quadrature works cell by cell between them.
    """

    func: Callable[[np.ndarray], np.ndarray]
    edges: np.ndarray
    kind: Literal["exact"] = "exact"
    infinite: bool = False

    def __post_init__(self):
        edges = np.asarray(self.edges, dtype=float)
        if edges[0] != 0.0 or np.any(np.diff(edges) <= 0):
            raise ParameterError("Profile edges must start at 0 and increase")
        object.__setattr__(self, "edges", edges)

    @property
    def breakpoints(self) -> np.ndarray:
        return self.edges[1:]

    @property
    def total_measure(self) -> float:
        return float(self.edges[-1])

    def evaluate(self, r) -> np.ndarray:
        r = np.atleast_1d(np.asarray(r, dtype=float))
        return np.where(r < self.edges[-1], np.asarray(self.func(r), dtype=float), 0.0)
