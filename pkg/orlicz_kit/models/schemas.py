from enum import Enum
from typing import Any, Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, Field, field_validator, model_validator


class Regime(str, Enum):
    GLOBAL = "global"
    NEAR_ZERO = "near-zero"
    NEAR_INFINITY = "near-infinity"


class Domain(BaseModel):
    kind: Literal["interval", "box", "halfline", "radial"]
    bounds: List[Tuple[float, float]]
    infinite: bool = False

    @field_validator("bounds")
    @classmethod
    def validate_bounds(cls, v):
        if not v or len(v) > 2:
            raise ValueError("Domain needs one or two coordinate ranges")
        for lo, hi in v:
            if not hi > lo:
                raise ValueError(f"Empty coordinate range ({lo}, {hi})")
        return v

    @model_validator(mode="after")
    def validate_kind(self):
        expected = 2 if self.kind == "box" else 1
        if len(self.bounds) != expected:
            raise ValueError(f"Domain kind {self.kind} needs {expected} coordinate range(s)")
        if self.kind == "halfline" and self.bounds[0][0] != 0.0:
            raise ValueError("Half-line domains start at 0")
        return self

    @property
    def dim(self) -> int:
        return len(self.bounds)

    @property
    def measure(self) -> float:
        result = 1.0
        for lo, hi in self.bounds:
            result *= hi - lo
        return result

    @classmethod
    def interval(cls, a: float, b: float) -> "Domain":
        return cls(kind="interval", bounds=[(a, b)])

    @classmethod
    def box(cls, a1: float, b1: float, a2: float, b2: float) -> "Domain":
        return cls(kind="box", bounds=[(a1, b1), (a2, b2)])

    @classmethod
    def halfline(cls, length: float, infinite: bool = False) -> "Domain":
        return cls(kind="halfline", bounds=[(0.0, length)], infinite=infinite)


class FractionalParams(BaseModel):
    n: int = Field(..., ge=1)
    s: float

    @model_validator(mode="after")
    def validate_order(self):
        if not 0.0 < self.s < self.n:
            raise ValueError(f"Smoothness s={self.s} must lie in (0, {self.n})")
        return self

    @property
    def ratio(self) -> float:
        """n/s"""
        return self.n / self.s

    @property
    def rho(self) -> float:
        """s/(n-s)"""
        return self.s / (self.n - self.s)

    @property
    def theta(self) -> float:
        """s/n"""
        return self.s / self.n

    @property
    def integer_part(self) -> int:
        return int(self.s)


class PowerLogSpec(BaseModel):
    form: Literal["powerlog"] = "powerlog"
    p: float
    alpha: float = 0.0
    p0: Optional[float] = None
    alpha0: float = 0.0
    scale: float = 1.0
    t0: float = 1.0

    @field_validator("p")
    @classmethod
    def validate_p(cls, v):
        if v < 1.0:
            raise ValueError("Exponent p must be at least 1")
        return v

    @field_validator("scale", "t0")
    @classmethod
    def validate_positive(cls, v):
        if not v > 0:
            raise ValueError("Scale and splice point must be positive")
        return v


class TabulatedSpec(BaseModel):
    form: Literal["tabulated"] = "tabulated"
    knots: List[Tuple[float, float]]

    @field_validator("knots")
    @classmethod
    def validate_knots(cls, v):
        if not v:
            raise ValueError("At least one knot is required")
        ts = [t for t, _ in v]
        if any(b < a for a, b in zip(ts, ts[1:])):
            raise ValueError("Knot abscissae must be non-decreasing")
        if ts[0] != 0.0:
            raise ValueError("First knot must sit at t=0")
        densities = [a for _, a in v]
        if any(a < 0 for a in densities):
            raise ValueError("Densities must be non-negative")
        if any(b < a for a, b in zip(densities, densities[1:])):
            raise ValueError("Densities must be non-decreasing")
        return v


class ComparisonVerdict(BaseModel):
    regime: Regime
    dominates: bool
    constant: Optional[float] = None
    threshold: Optional[float] = None
    samples_examined: int
    trend: Dict[str, float] = {}


class IndexEstimate(BaseModel):
    value: float
    regime: Regime
    lambda_grid: List[float]
    residual: float


class GrowthEvidence(BaseModel):
    result: bool
    epsilon: float
    t_max: float
    lambdas: List[float]
    t_grid: List[float]
    ratios: Dict[str, List[float]]
    exponents: Dict[str, Tuple[float, float]]
    # log t at which each ratio falls below epsilon
    crossings: Dict[str, float] = {}

    def __bool__(self) -> bool:
        return self.result


class IntegralConditions(BaseModel):
    infinity_condition: Optional[bool]
    zero_condition: Optional[bool]
    dual_zero_condition: Optional[bool]
    infinity_verdict: str
    zero_verdict: str
    dual_verdict: str
    agree: bool
    diagnostics: Dict[str, Any] = {}


class CompactnessEvidence(BaseModel):
    result: Optional[bool]
    growth_route: bool
    inverse_route: bool
    agree: bool
    growth: GrowthEvidence
    inverse_exponents: Tuple[float, float]

    def __bool__(self) -> bool:
        return bool(self.result)


class NormResult(BaseModel):
    value: float
    modular: float
    iterations: int
    quadrature_error: float = 0.0

    @property
    def infinite(self) -> bool:
        return self.value == float("inf")


class ModularResult(BaseModel):
    value: float
    method: Literal["tensor-quadrature", "monte-carlo"]
    resolution: int
    error: float
    divergent: bool = False

    @field_validator("value")
    @classmethod
    def validate_value(cls, v):
        if v < 0:
            raise ValueError("Modular values are non-negative")
        return v


class VerificationReport(BaseModel):
    check_id: str
    statement: str
    paper_ref: str = ""
    lhs: float
    rhs: float
    constant: Optional[float] = None
    passed: bool
    error_budget: float = 0.0
    tolerance: float = 0.0
    provenance: str = "quadrature"
    details: Dict[str, Any] = {}


class HardyReport(VerificationReport):
    kind: Literal["L1-modular", "L2-modular", "thmA-norm", "thmB-norm"]


class TrendReport(BaseModel):
    s_values: List[float]
    scaled_modulars: List[float]
    target: float
    gaps: List[float]
    passed: bool


class SuiteConfig(BaseModel):
    seed: int = 42
    trials: Optional[int] = None
    tolerances: Dict[str, float] = {}
    n_grid: List[int] = [1, 2]
    s_grid: List[float] = [0.25, 0.5, 0.75]
    family: Dict[str, Any] = {}
    output_dir: str = "reports"
    cells: int = 64
    mc_budget: Optional[int] = None

    @field_validator("seed")
    @classmethod
    def validate_seed(cls, v):
        if not 0 <= v < 2 ** 64:
            raise ValueError("Seed must be a 64-bit unsigned integer")
        return v

    @field_validator("s_grid")
    @classmethod
    def validate_s_grid(cls, v):
        if any(not 0 < s < 1 for s in v):
            raise ValueError("Suite smoothness values must lie in (0, 1)")
        return v

    def tolerance(self, name: str, default: float) -> float:
        return float(self.tolerances.get(name, default))


class SuiteResult(BaseModel):
    suite: str
    checks: List[VerificationReport] = []
    rows: List[Dict[str, Any]] = []
    plots: List[Dict[str, Any]] = []

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)
