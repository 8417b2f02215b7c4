import argparse
import logging

from orlicz_kit.commands.common import add_grid, grid_from_args, write_grid
from orlicz_kit.services.rearrange import decreasing_rearrangement, maximal_average, symmetric_rearrangement

logger = logging.getLogger(__name__)


def _profile_payload(profile) -> dict:
    return {"kind": profile.kind, "breakpoints": profile.breakpoints.tolist(), "values": profile.values.tolist(),
            "total_measure": profile.total_measure}


def rearrange_star(args: argparse.Namespace) -> dict:
    return _profile_payload(decreasing_rearrangement(grid_from_args(args)))


def rearrange_doublestar(args: argparse.Namespace) -> dict:
    return _profile_payload(maximal_average(decreasing_rearrangement(grid_from_args(args))))


def rearrange_symmetric(args: argparse.Namespace) -> dict:
    star = symmetric_rearrangement(grid_from_args(args), args.n)
    write_grid(star, args.csv)
    return {"domain": star.domain.model_dump(), "cells": list(star.shape), "values": star.values.tolist()}


def register(subparsers):
    parser = subparsers.add_parser("rearrange", help="decreasing and symmetric rearrangements")
    actions = parser.add_subparsers(dest="action", required=True)

    for name, handler in (("star", rearrange_star), ("doublestar", rearrange_doublestar)):
        sub = actions.add_parser(name, help=f"u{'*' if name == 'star' else '**'} as a step profile")
        add_grid(sub)
        sub.set_defaults(handler=handler)

    sub = actions.add_parser("symmetric", help="symmetric decreasing rearrangement")
    add_grid(sub)
    sub.add_argument("--n", type=int, default=1, choices=[1, 2])
    sub.add_argument("--csv", default=None, help="write the rearranged grid to this CSV file")
    sub.set_defaults(handler=rearrange_symmetric)
