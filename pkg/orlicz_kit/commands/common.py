import argparse
import json
import logging
import os
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel

from orlicz_kit.exceptions import ParameterError
from orlicz_kit.models.grid import GridFunction
from orlicz_kit.models.schemas import Domain, FractionalParams
from orlicz_kit.services.young import PowerLog, Tabulated, YoungFunction, young_from_spec
from orlicz_kit.utils.helpers import jsonable

logger = logging.getLogger(__name__)

YOUNG_HELP = ("Young function: powerlog:p=2,alpha=1[,p0=..,alpha0=..] | tabulated:t0,a0;t1,a1;... | "
              "a JSON document | @path to a JSON document")
GRID_HELP = "grid function: chi:a,b | tent:a,b | bump:a,b | exp:a,b | steps:v1,v2,... | file:path (grid CSV)"


def _numbers(text: str) -> List[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ParameterError(f"Expected comma-separated numbers, got {text!r}")


def parse_pair(text: str) -> Tuple[float, float]:
    values = _numbers(text)
    if len(values) != 2:
        raise ParameterError(f"Expected two numbers a,b, got {text!r}")
    return values[0], values[1]


def parse_young(text: str) -> YoungFunction:
    """Young function from the CLI mini-syntax or a JSON document"""
    text = text.strip()
    if text.startswith("@"):
        with open(text[1:]) as handle:
            return young_from_spec(json.load(handle))
    if text.startswith("{"):
        return young_from_spec(text)
    form, _, body = text.partition(":")
    if form == "powerlog":
        fields: Dict[str, float] = {}
        for item in filter(None, body.split(",")):
            key, _, value = item.partition("=")
            try:
                fields[key.strip()] = float(value)
            except ValueError:
                raise ParameterError(f"Malformed power-log field {item!r}")
        if "p" not in fields:
            raise ParameterError("powerlog needs p=...")
        return PowerLog(**fields)
    if form == "tabulated":
        knots = [_numbers(pair) for pair in body.split(";") if pair.strip()]
        if any(len(k) != 2 for k in knots):
            raise ParameterError(f"Tabulated knots must be t,a pairs, got {body!r}")
        return Tabulated(knots)
    raise ParameterError(f"Unknown Young function form {form!r}")


def _bump(x: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", over="ignore"):
        inner = np.where(np.abs(x) < 1, np.exp(1.0 - 1.0 / np.maximum(1.0 - x ** 2, 1e-300)), 0.0)
    return inner


def _bump_slope(x: np.ndarray) -> np.ndarray:
    core = np.maximum(1.0 - x ** 2, 1e-300)
    return np.where(np.abs(x) < 1, _bump(x) * (-2.0 * x) / core ** 2, 0.0)


def parse_grid(text: str, cells: int = 64, domain: Optional[Tuple[float, float]] = None) -> GridFunction:
    """Grid function on an interval from the CLI mini-syntax"""
    form, _, body = text.strip().partition(":")
    if form == "file":
        with open(body) as handle:
            header, rest = handle.read().split("\n", 1)
        return GridFunction.from_csv(header.lstrip("# "), rest)
    if form == "steps":
        values = _numbers(body)
        lo, hi = domain or (0.0, 1.0)
        return GridFunction(domain=Domain.interval(lo, hi), values=np.asarray(values))
    a, b = parse_pair(body)
    if not a < b:
        raise ParameterError(f"Need a < b, got {a}, {b}")
    if domain is None:
        domain = (min(a, 0.0), b) if form == "chi" else (a, b)
    lo, hi = domain
    interval = Domain.interval(lo, hi)
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    if form == "chi":
        return GridFunction.from_callable(lambda x: ((x >= a) & (x < b)).astype(float), interval, cells)
    if form == "tent":
        return GridFunction.from_callable(lambda x: np.clip(1.0 - np.abs(x - mid) / half, 0.0, None), interval,
                                          cells, interpolation="linear",
                                          derivative=lambda x: np.where(np.abs(x - mid) < half,
                                                                        -np.sign(x - mid) / half, 0.0))
    if form == "bump":
        return GridFunction.from_callable(lambda x: _bump((x - mid) / half), interval, cells,
                                          interpolation="linear",
                                          derivative=lambda x: _bump_slope((x - mid) / half) / half)
    if form == "exp":
        return GridFunction.from_callable(lambda x: np.exp(-(x - a)), interval, cells, interpolation="linear",
                                          derivative=lambda x: -np.exp(-(x - a)))
    raise ParameterError(f"Unknown grid function form {form!r}")


def add_young(parser: argparse.ArgumentParser, name: str = "--A", required: bool = True):
    parser.add_argument(name, dest=name.lstrip("-").replace("-", "_"), required=required, help=YOUNG_HELP)


def add_grid(parser: argparse.ArgumentParser, name: str = "--f"):
    parser.add_argument(name, dest=name.lstrip("-"), required=True, help=GRID_HELP)
    parser.add_argument("--cells", type=int, default=64, help="cells of the sampling grid (default 64)")
    parser.add_argument("--domain", default=None, help="interval a,b carrying the grid (default from the form)")


def add_fractional(parser: argparse.ArgumentParser, n_default: Optional[int] = None):
    parser.add_argument("--n", type=int, default=n_default, required=n_default is None, help="dimension")
    parser.add_argument("--s", type=float, required=True, help="smoothness")


def grid_from_args(args: argparse.Namespace, name: str = "f") -> GridFunction:
    domain = parse_pair(args.domain) if getattr(args, "domain", None) else None
    return parse_grid(getattr(args, name), args.cells, domain)


def fractional_from_args(args: argparse.Namespace) -> FractionalParams:
    return FractionalParams(n=args.n, s=args.s)


def payload(obj: Any) -> Any:
    """JSON-ready form of reports, models and arrays"""
    if isinstance(obj, BaseModel):
        return payload(obj.model_dump(mode="python"))
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, dict):
        return {k: payload(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [payload(v) for v in obj]
    return jsonable(obj)


def write_grid(u: GridFunction, path: Optional[str]):
    """Grid CSV with its JSON header line, when a path is given"""
    if not path:
        return
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "w") as handle:
        handle.write("# " + u.header_json() + "\n")
        handle.write(u.to_csv())
    logger.info(f"Grid written to {path}")
