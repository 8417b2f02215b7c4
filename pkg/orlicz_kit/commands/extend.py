import argparse
import logging

from orlicz_kit.commands.common import add_grid, add_young, grid_from_args, parse_pair, parse_young, payload, write_grid
from orlicz_kit.models.schemas import Domain
from orlicz_kit.services.extension import (
    CutoffFunction,
    cutoff_multiply,
    extension_pipeline,
    verify_extend_zero,
    verify_reflection,
)
from orlicz_kit.utils.helpers import C_CAP

logger = logging.getLogger(__name__)


def extend_zero_command(args: argparse.Namespace) -> dict:
    u = grid_from_args(args)
    support, ambient = Domain.interval(*parse_pair(args.support)), Domain.interval(*parse_pair(args.ambient))
    return payload(verify_extend_zero(u, support, ambient, args.s, parse_young(args.A)))


def extend_reflect(args: argparse.Namespace) -> dict:
    return payload(verify_reflection(grid_from_args(args), args.s, parse_young(args.A)))


def extend_cutoff(args: argparse.Namespace) -> dict:
    zeta = CutoffFunction.ramp(args.plateau, args.radius, center=args.center)
    product, report = cutoff_multiply(grid_from_args(args), zeta, args.s, parse_young(args.A), c_cap=args.c_cap)
    write_grid(product, args.csv)
    return payload(report)


def extend_pipeline(args: argparse.Namespace) -> dict:
    extended, report = extension_pipeline(grid_from_args(args), args.s, parse_young(args.A), c_cap=args.c_cap)
    write_grid(extended, args.csv)
    return payload(report)


def register(subparsers):
    parser = subparsers.add_parser("extend", help="zero extension, reflection, cutoff and the composite extension")
    actions = parser.add_subparsers(dest="action", required=True)

    def base(name, text, handler):
        sub = actions.add_parser(name, help=text)
        add_young(sub)
        add_grid(sub)
        sub.add_argument("--s", type=float, required=True)
        sub.set_defaults(handler=handler)
        return sub

    sub = base("zero", "extension by zero with the cross-term bound", extend_zero_command)
    sub.add_argument("--support", required=True, help="interval a,b carrying the support of u")
    sub.add_argument("--ambient", required=True, help="ambient interval a,b aligned with the grid")

    base("reflect", "even reflection across 0 of u on (0, b)", extend_reflect)

    sub = base("cutoff", "multiplication by a Lipschitz ramp", extend_cutoff)
    sub.add_argument("--plateau", type=float, default=0.25)
    sub.add_argument("--radius", type=float, default=0.75)
    sub.add_argument("--center", type=float, default=0.0)
    sub.add_argument("--c-cap", dest="c_cap", type=float, default=C_CAP)
    sub.add_argument("--csv", default=None)

    sub = base("pipeline", "composite extension from (0, 1) to R", extend_pipeline)
    sub.add_argument("--c-cap", dest="c_cap", type=float, default=C_CAP)
    sub.add_argument("--csv", default=None)
