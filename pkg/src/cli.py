"""
Command Line Interface for the SCBO experiments.
"""

import argparse
import sys
from pathlib import Path
from typing import List, Optional

from dotenv import load_dotenv

# Add project root to path
project_root = str(Path(__file__).parent.parent)
if project_root not in sys.path:
    sys.path.append(project_root)

from src.runner.experiment_runner import ExperimentRunner  # noqa: E402
from src.runner.schema import Command, Subcommand  # noqa: E402
from src.utils.errors import ScboError  # noqa: E402

DEFAULT_SETTINGS = "config/settings.yaml"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Smoothing consensus-based optimization experiments")
    parser.add_argument("--settings", "-s", help="Path to application settings (default: config/settings.yaml if present)")

    subparsers = parser.add_subparsers(dest="subcommand", required=True, metavar="SUBCOMMAND")
    for sub in Subcommand:
        p = subparsers.add_parser(sub.value, help=f"Run the '{sub.section}' section of an experiment document")
        p.add_argument("--config", "-c", required=True, help="Path to the experiment document")
        p.add_argument("--output", "-o", help="Output directory (default: $SCBO_OUTPUT_DIR or settings)")
        p.add_argument("--seed", type=int, help="Override the document's seed")
        p.add_argument("--workers", "-w", type=int, help="Worker processes (default: machine parallelism)")
        p.add_argument("--verbose", "-v", action="count", default=0, help="More logging (-v info, -vv debug)")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    load_dotenv()
    parser = build_parser()
    args = parser.parse_args(argv)

    settings = args.settings or (DEFAULT_SETTINGS if Path(DEFAULT_SETTINGS).exists() else None)
    try:
        runner = ExperimentRunner(config_path=settings, verbosity=args.verbose)
    except (FileNotFoundError, ScboError) as e:
        print(f"Error: {e}", file=sys.stderr)
        return getattr(e, "exit_code", 2)
    cmd = Command(
        subcommand=Subcommand(args.subcommand),
        config_path=args.config,
        output=args.output,
        seed=args.seed,
        verbosity=args.verbose,
        workers=args.workers,
    )

    result = runner.execute(cmd)
    if result["status"] == "success":
        for line in result["summary"]:
            print(line)
    else:
        print(f"Error ({result['error_type']}): {result['error']}", file=sys.stderr)
    return result["exit_code"]


if __name__ == "__main__":
    sys.exit(main())
