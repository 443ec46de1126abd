"""Command line entry point: ``catmine <stage> [options]``."""

from __future__ import annotations

import argparse
import logging
import sys

from .artifacts import MissingArtifactError
from .config import ConfigError, load_config
from .kg_store import OntologyCycleError
from .category_graph import CategoryGraphError
from .pipeline import STAGES, run_stage

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_MISSING_PREREQUISITE = 2
EXIT_IO = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="catmine",
        description="Mine relation and type axioms for categories and derive new assertions.",
    )
    parser.add_argument("stage", choices=(*STAGES, "all"), help="pipeline stage to run")
    parser.add_argument("--config", help="YAML (or JSON) configuration file")
    parser.add_argument("--tau", type=float, help="minimum axiom confidence (default 0.05)")
    parser.add_argument("--functional-threshold", type=float,
                        help="maximum multi-valued subject share of a functional property (default 0.05)")
    parser.add_argument("--min-set-size", type=int, help="smallest candidate set kept (default 2)")
    parser.add_argument("--root", help="root category id (default Main_topic_classifications)")
    parser.add_argument("--stopwords", help="comma separated words marking administrative categories")
    parser.add_argument("--seed", type=int, help="seed for report sampling")
    parser.add_argument("--out", help="output directory")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    overrides = {
        "tau": args.tau,
        "functional_threshold": args.functional_threshold,
        "min_set_size": args.min_set_size,
        "root": args.root,
        "stopwords": args.stopwords,
        "seed": args.seed,
        "out": args.out,
    }
    try:
        config = load_config(args.config, overrides)
        config.validate()
    except ConfigError as exc:
        print(f"catmine: configuration error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    try:
        run_stage(args.stage, config)
    except MissingArtifactError as exc:
        print(f"catmine: {exc}", file=sys.stderr)
        return EXIT_MISSING_PREREQUISITE
    except (OntologyCycleError, CategoryGraphError) as exc:
        print(f"catmine: invalid input: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"catmine: I/O failure: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
