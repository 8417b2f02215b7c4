import argparse
import logging

from orlicz_kit.commands.common import add_fractional, add_young, fractional_from_args, parse_young, payload
from orlicz_kit.services.targets import (
    build_H,
    build_hat,
    build_sobolev_conjugate,
    check_integral_conditions,
    compact_target_test,
)
from orlicz_kit.services.young import eval_young

logger = logging.getLogger(__name__)


def _points(args):
    return [float(t) for t in args.at.split(",")]


def target_check(args: argparse.Namespace) -> dict:
    conditions = check_integral_conditions(parse_young(args.A), fractional_from_args(args))
    return {**payload(conditions), "passed": conditions.infinity_condition is not None and conditions.agree}


def target_H(args: argparse.Namespace) -> dict:
    H = build_H(parse_young(args.A), fractional_from_args(args))
    return {"H": {str(t): H(t) for t in _points(args)}, "sup": H.sup}


def target_sobolev_conjugate(args: argparse.Namespace) -> dict:
    A_ns = build_sobolev_conjugate(parse_young(args.A), fractional_from_args(args))
    return {"sobolev_conjugate": {str(t): eval_young(A_ns, t) for t in _points(args)}}


def target_hat(args: argparse.Namespace) -> dict:
    A_hat = build_hat(parse_young(args.A), fractional_from_args(args))
    return {"hat": {str(t): eval_young(A_hat, t) for t in _points(args)}}


def target_compact(args: argparse.Namespace) -> dict:
    evidence = compact_target_test(parse_young(args.A), parse_young(args.B), fractional_from_args(args))
    return {**payload(evidence), "compact": evidence.result}


def register(subparsers):
    parser = subparsers.add_parser("target", help="optimal Orlicz and Orlicz-Lorentz targets")
    actions = parser.add_subparsers(dest="action", required=True)

    sub = actions.add_parser("check", help="integral conditions at zero and infinity")
    add_young(sub)
    add_fractional(sub)
    sub.set_defaults(handler=target_check)

    for name, handler, text in (("H", target_H, "the map H"),
                                ("sobolev-conjugate", target_sobolev_conjugate, "the Orlicz target A_{n/s}"),
                                ("hat", target_hat, "the Orlicz-Lorentz generator")):
        sub = actions.add_parser(name, help=f"evaluate {text}")
        add_young(sub)
        add_fractional(sub)
        sub.add_argument("--at", required=True, help="comma-separated points")
        sub.set_defaults(handler=handler)

    sub = actions.add_parser("compact", help="compact embedding into L^B")
    add_young(sub)
    add_young(sub, "--B")
    add_fractional(sub)
    sub.set_defaults(handler=target_compact)
