import argparse
import logging

from orlicz_kit.commands.common import (
    add_fractional,
    add_grid,
    add_young,
    fractional_from_args,
    grid_from_args,
    parse_young,
    payload,
    write_grid,
)
from orlicz_kit.services.operators1d import (
    hardy_Ts,
    make_test_function,
    verify_hardy_down,
    verify_hardy_up,
    verify_thmA,
    verify_thmB,
)
from orlicz_kit.utils.helpers import C_CAP

logger = logging.getLogger(__name__)


def hardy_ts(args: argparse.Namespace) -> dict:
    g = hardy_Ts(grid_from_args(args), fractional_from_args(args))
    write_grid(g, args.csv)
    return {"values": g.values.tolist()}


def hardy_down(args: argparse.Namespace) -> dict:
    return payload(verify_hardy_down(parse_young(args.A), args.s, grid_from_args(args)))


def hardy_up(args: argparse.Namespace) -> dict:
    return payload(verify_hardy_up(parse_young(args.A), fractional_from_args(args), grid_from_args(args),
                                   c_cap=args.c_cap))


def hardy_thmA(args: argparse.Namespace) -> dict:
    return payload(verify_thmA(parse_young(args.A), fractional_from_args(args), grid_from_args(args),
                               c_cap=args.c_cap))


def hardy_thmB(args: argparse.Namespace) -> dict:
    return payload(verify_thmB(parse_young(args.A), fractional_from_args(args), grid_from_args(args),
                               c_cap=args.c_cap))


def hardy_testfn(args: argparse.Namespace) -> dict:
    u = make_test_function(grid_from_args(args), fractional_from_args(args), m=args.m, cells=args.out_cells)
    write_grid(u, args.csv)
    return {"domain": u.domain.model_dump(), "cells": list(u.shape), "max": float(u.values.max())}


def register(subparsers):
    parser = subparsers.add_parser("hardy", help="one-dimensional Hardy operators and target inequalities")
    actions = parser.add_subparsers(dest="action", required=True)

    sub = actions.add_parser("ts", help="T_s f as exact cell averages")
    add_grid(sub)
    add_fractional(sub)
    sub.add_argument("--csv", default=None)
    sub.set_defaults(handler=hardy_ts)

    sub = actions.add_parser("down", help="modular Hardy inequality with constant 1/s")
    add_young(sub)
    add_grid(sub)
    sub.add_argument("--s", type=float, required=True)
    sub.set_defaults(handler=hardy_down)

    for name, handler in (("up", hardy_up), ("thmA", hardy_thmA), ("thmB", hardy_thmB)):
        sub = actions.add_parser(name, help=f"{name} inequality with a searched constant")
        add_young(sub)
        add_grid(sub)
        add_fractional(sub)
        sub.add_argument("--c-cap", dest="c_cap", type=float, default=C_CAP)
        sub.set_defaults(handler=handler)

    sub = actions.add_parser("testfn", help="radial test function built from a monotone f")
    add_grid(sub)
    add_fractional(sub)
    sub.add_argument("--m", type=int, default=None)
    sub.add_argument("--out-cells", dest="out_cells", type=int, default=64)
    sub.add_argument("--csv", default=None)
    sub.set_defaults(handler=hardy_testfn)
