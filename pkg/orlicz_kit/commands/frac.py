import argparse
import logging

from orlicz_kit.commands.common import add_grid, add_young, grid_from_args, parse_young, payload
from orlicz_kit.models.schemas import FractionalParams
from orlicz_kit.services.gagliardo import (
    bbm_limit_check,
    fractional_modular,
    gagliardo_seminorm,
    verify_fractional_hardy,
    verify_poincare,
    verify_polya_szego,
    verify_sobolev_embedding,
)
from orlicz_kit.utils.helpers import C_CAP

logger = logging.getLogger(__name__)


def _inputs(args):
    u = grid_from_args(args)
    n = 2 if u.domain.kind == "radial" else u.dim
    return u, parse_young(args.A), FractionalParams(n=n, s=args.s)


def frac_modular(args: argparse.Namespace) -> dict:
    u, A, fp = _inputs(args)
    return payload(fractional_modular(u, fp.s, A, lam=args.lam, whole_space=args.whole_space, seed=args.seed,
                                      budget=args.budget))


def frac_seminorm(args: argparse.Namespace) -> dict:
    u, A, fp = _inputs(args)
    return payload(gagliardo_seminorm(u, fp.s, A, whole_space=args.whole_space, seed=args.seed,
                                      budget=args.budget))


def frac_polya(args: argparse.Namespace) -> dict:
    u, A, fp = _inputs(args)
    return payload(verify_polya_szego(u, fp.s, A, seed=args.seed, budget=args.budget))


def frac_hardy_rn(args: argparse.Namespace) -> dict:
    u, A, fp = _inputs(args)
    return payload(verify_fractional_hardy(u, fp, A, c_cap=args.c_cap, seed=args.seed, budget=args.budget))


def frac_poincare(args: argparse.Namespace) -> dict:
    u, A, fp = _inputs(args)
    return payload(verify_poincare(u, fp.s, A, c_cap=args.c_cap, seed=args.seed, budget=args.budget))


def frac_embed(args: argparse.Namespace) -> dict:
    u, A, fp = _inputs(args)
    return payload(verify_sobolev_embedding(u, fp, A, c_cap=args.c_cap, seed=args.seed, budget=args.budget))


def frac_bbm(args: argparse.Namespace) -> dict:
    u = grid_from_args(args)
    s_list = [float(s) for s in args.s_list.split(",")]
    return payload(bbm_limit_check(u, parse_young(args.A), s_list))


def _common(sub, with_s: bool = True):
    add_young(sub)
    add_grid(sub)
    if with_s:
        sub.add_argument("--s", type=float, required=True, help="smoothness in (0, 1)")
    sub.add_argument("--budget", type=int, default=None, help="Monte Carlo samples for 2-D grids")


def register(subparsers):
    parser = subparsers.add_parser("frac", help="fractional Orlicz-Sobolev modulars, seminorms and inequalities")
    actions = parser.add_subparsers(dest="action", required=True)

    for name, handler in (("modular", frac_modular), ("seminorm", frac_seminorm)):
        sub = actions.add_parser(name, help=f"fractional {name}")
        _common(sub)
        sub.add_argument("--whole-space", dest="whole_space", action="store_true",
                         help="integrate over R^n with u extended by zero")
        if name == "modular":
            sub.add_argument("--lam", type=float, default=1.0)
        sub.set_defaults(handler=handler)

    sub = actions.add_parser("polya", help="modular does not increase under symmetric rearrangement")
    _common(sub)
    sub.set_defaults(handler=frac_polya)

    for name, handler, text in (("hardy-rn", frac_hardy_rn, "fractional Hardy inequality on R^n"),
                                ("poincare", frac_poincare, "Poincare inequality with mean and median"),
                                ("embed", frac_embed, "Orlicz and Orlicz-Lorentz embeddings")):
        sub = actions.add_parser(name, help=text)
        _common(sub)
        sub.add_argument("--c-cap", dest="c_cap", type=float, default=C_CAP)
        sub.set_defaults(handler=handler)

    sub = actions.add_parser("bbm", help="(1 - s) modular against the limit integral as s -> 1")
    _common(sub, with_s=False)
    sub.add_argument("--s-list", dest="s_list", default="0.9,0.99,0.999")
    sub.set_defaults(handler=frac_bbm)
