import argparse
import logging

from orlicz_kit.commands.common import add_grid, add_young, grid_from_args, parse_young, payload
from orlicz_kit.services.norms import (
    lorentz_zygmund_norm,
    luxemburg_norm,
    orlicz_lorentz_dual_norm,
    orlicz_lorentz_norm,
)

logger = logging.getLogger(__name__)


def norm_luxemburg(args: argparse.Namespace) -> dict:
    return payload(luxemburg_norm(parse_young(args.A), grid_from_args(args)))


def norm_orlicz_lorentz(args: argparse.Namespace) -> dict:
    norm = orlicz_lorentz_dual_norm if args.q < 0 else orlicz_lorentz_norm
    return payload(norm(parse_young(args.A), args.q, grid_from_args(args)))


def norm_lorentz_zygmund(args: argparse.Namespace) -> dict:
    return payload(lorentz_zygmund_norm(args.sigma, args.p, args.gamma, args.delta, grid_from_args(args)))


def register(subparsers):
    parser = subparsers.add_parser("norm", help="Luxemburg, Orlicz-Lorentz and Lorentz-Zygmund norms")
    actions = parser.add_subparsers(dest="action", required=True)

    sub = actions.add_parser("luxemburg", help="Luxemburg norm in L^A")
    add_young(sub)
    add_grid(sub)
    sub.set_defaults(handler=norm_luxemburg)

    sub = actions.add_parser("orlicz-lorentz", help="norm in L(A, q); q < -1 selects the dual form")
    add_young(sub)
    add_grid(sub)
    sub.add_argument("--q", type=float, required=True)
    sub.set_defaults(handler=norm_orlicz_lorentz)

    sub = actions.add_parser("lorentz-zygmund", help="Lorentz-Zygmund functional")
    add_grid(sub)
    sub.add_argument("--sigma", type=float, required=True)
    sub.add_argument("--p", type=float, required=True, help="exponent; inf allowed")
    sub.add_argument("--gamma", type=float, default=0.0)
    sub.add_argument("--delta", type=float, default=0.0)
    sub.set_defaults(handler=norm_lorentz_zygmund)
