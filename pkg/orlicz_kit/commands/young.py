import argparse
import logging

from orlicz_kit.commands.common import add_young, parse_young, payload
from orlicz_kit.models.schemas import Regime
from orlicz_kit.services.young import conjugate, dominates, eval_young, matuszewska_index

logger = logging.getLogger(__name__)


def _points(text: str):
    return [float(t) for t in text.split(",")]


def young_eval(args: argparse.Namespace) -> dict:
    A = parse_young(args.A)
    return {"young": repr(A), "values": {str(t): eval_young(A, t) for t in _points(args.t)}}


def young_conjugate(args: argparse.Namespace) -> dict:
    A = parse_young(args.A)
    dual = conjugate(A)
    return {"young": repr(A), "conjugate": {str(t): eval_young(dual, t) for t in _points(args.t)}}


def young_index(args: argparse.Namespace) -> dict:
    return payload(matuszewska_index(parse_young(args.A), Regime(args.regime)))


def young_compare(args: argparse.Namespace) -> dict:
    A, B = parse_young(args.A), parse_young(args.B)
    regime = Regime(args.regime)
    forward, backward = dominates(A, B, regime), dominates(B, A, regime)
    return {"A_dominates_B": payload(forward), "B_dominates_A": payload(backward),
            "equivalent": forward.dominates and backward.dominates}


def register(subparsers):
    parser = subparsers.add_parser("young", help="Young functions, conjugates, indices, comparison")
    actions = parser.add_subparsers(dest="action", required=True)

    sub = actions.add_parser("eval", help="A(t) at the given points")
    add_young(sub)
    sub.add_argument("--t", required=True, help="comma-separated points")
    sub.set_defaults(handler=young_eval)

    sub = actions.add_parser("conjugate", help="conjugate function at the given points")
    add_young(sub)
    sub.add_argument("--t", required=True, help="comma-separated points")
    sub.set_defaults(handler=young_conjugate)

    sub = actions.add_parser("index", help="Matuszewska-Orlicz index")
    add_young(sub)
    sub.add_argument("--regime", default="near-infinity", choices=[r.value for r in Regime if r != Regime.NEAR_ZERO])
    sub.set_defaults(handler=young_index)

    sub = actions.add_parser("compare", help="domination in both directions")
    add_young(sub)
    add_young(sub, "--B")
    sub.add_argument("--regime", default="global", choices=[r.value for r in Regime])
    sub.set_defaults(handler=young_compare)
