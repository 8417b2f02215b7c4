import argparse
import json
import logging
import os

from orlicz_kit.models.schemas import SuiteConfig
from orlicz_kit.services.suites import SUITES, export_report, run_suite

logger = logging.getLogger(__name__)

OUTPUT_DIR = os.getenv("ORLICZ_KIT_OUTPUT_DIR", "reports")


def load_config(args: argparse.Namespace) -> SuiteConfig:
    """Flat JSON config file first, command-line flags on top"""
    doc = {}
    if args.config:
        with open(args.config) as handle:
            doc = json.load(handle)
    overrides = {"seed": args.seed, "trials": args.trials, "output_dir": args.output_dir}
    doc.update({k: v for k, v in overrides.items() if v is not None})
    doc.setdefault("output_dir", OUTPUT_DIR)
    return SuiteConfig(**doc)


def suite_run(args: argparse.Namespace) -> dict:
    if args.name == "list":
        return {"suites": list(SUITES)}
    if args.name != "all" and args.name not in SUITES:
        raise argparse.ArgumentTypeError(f"unknown suite {args.name!r}; try 'suite list'")
    config = load_config(args)
    names = list(SUITES) if args.name == "all" else [args.name]
    results = [run_suite(name, config) for name in names]
    paths = export_report(results, config.output_dir, config)
    return {
        "suites": {r.suite: {"passed": r.passed, "pass_count": sum(c.passed for c in r.checks),
                             "check_count": len(r.checks)} for r in results},
        "artifacts": paths,
        "passed": all(r.passed for r in results),
    }


def register(subparsers):
    parser = subparsers.add_parser("suite", help="acceptance suites; 'suite list' names them")
    parser.add_argument("name", help="suite name, 'all' or 'list'")
    parser.set_defaults(handler=suite_run)
