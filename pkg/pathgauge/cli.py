"""
Command-line entry point.

    pathgauge run CONFIG [--out DIR]
    pathgauge preset NAME [--out DIR] [--show]
    pathgauge list

Exit codes: 0 success, 2 invalid config or preset, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from typing import Optional, Sequence

from pydantic import ValidationError

from pathgauge.config import DEFAULT_OUTPUT_DIR
from pathgauge.errors import PathGaugeError, ScenarioError, TaskFailed
from pathgauge.output.tables import render_scenario
from pathgauge.runner import run_scenario, threads_from_env
from pathgauge.scenarios import Scenario, dump_scenario, list_presets, load_preset, load_scenario
from pathgauge.strings import t

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NUMERICAL = 3


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", default=DEFAULT_OUTPUT_DIR, help=t("out_help"))
    parser.add_argument("--tol", type=float, default=None, help=t("tol_help"))
    parser.add_argument("--quad-order", type=int, default=None, help=t("quad_order_help"))
    parser.add_argument("--seed", type=int, default=None, help=t("seed_help"))
    parser.add_argument("--threads", type=int, default=None, help=t("threads_help"))
    parser.add_argument("-v", "--verbose", action="count", default=0, help=t("verbose_help"))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pathgauge", description=t("prog_description"))
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help=t("run_help"))
    run.add_argument("config", help=t("config_help"))
    _common(run)

    preset = sub.add_parser("preset", help=t("preset_help"))
    preset.add_argument("name", help=t("preset_name_help"))
    preset.add_argument("--show", action="store_true", help=t("show_help"))
    _common(preset)

    sub.add_parser("list", help=t("list_help"))
    return parser


def _configure_logging(verbosity: int) -> None:
    level = logging.WARNING if verbosity <= 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)


def _execute(scenario: Scenario, args) -> int:
    scenario = scenario.with_overrides(tol=args.tol, quad_order=args.quad_order, seed=args.seed)
    workers = args.threads if args.threads is not None else threads_from_env()
    outputs, files = run_scenario(scenario, args.out, workers)
    print(render_scenario(scenario.name, outputs))
    print()
    print(t("files_written", count=len(files), path=f"{args.out}/{scenario.name}"))
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    _configure_logging(getattr(args, "verbose", 0))

    try:
        if args.command == "list":
            for name, description in list_presets():
                print(t("preset_line", name=name, description=description))
            return EXIT_OK
        if args.command == "preset":
            scenario = load_preset(args.name)
            if args.show:
                sys.stdout.write(dump_scenario(scenario))
                return EXIT_OK
        else:
            scenario = load_scenario(args.config)
        return _execute(scenario, args)
    except FileNotFoundError as e:
        print(str(e), file=sys.stderr)
        return EXIT_INVALID
    except ValidationError as e:
        print(t("schema_error", error=e), file=sys.stderr)
        return EXIT_INVALID
    except ScenarioError as e:
        print(t("semantic_error", error=e), file=sys.stderr)
        return EXIT_INVALID
    except json.JSONDecodeError as e:
        print(t("config_unreadable", path=getattr(args, "config", "?"), error=e), file=sys.stderr)
        return EXIT_INVALID
    except TaskFailed as e:
        print(t("numerical_failure", task=e.task, error=e.cause), file=sys.stderr)
        return EXIT_NUMERICAL
    except PathGaugeError as e:
        print(t("numerical_failure", task="?", error=e), file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
