"""
Command-line entry point for the STRAIN pipeline

Subcommands: ingest, strain, curves, leaderboard, fit, bootstrap, report, selfcheck.
Exit status is 0 on success, 1 on a data problem, 2 on any other failure.
"""
import argparse
import logging
import sys
from typing import List, Optional, Tuple

from config.settings import (
    LOG_LEVEL,
    STRAIN_BOOTSTRAP_REPLICATES,
    STRAIN_BOOTSTRAP_SEED,
    STRAIN_DATA_DIR,
    STRAIN_DISTANCE_FLOOR,
    STRAIN_MAX_FRAME,
    STRAIN_MIN_SNAPS,
    STRAIN_OUTPUT_DIR,
    STRAIN_WORKERS,
)
from models.bootstrap import BootstrapConfig
from utils.errors import DataError

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_DATA_ERROR = 1
EXIT_FAILURE = 2

COMMANDS = ["ingest", "strain", "curves", "leaderboard", "fit", "bootstrap", "report", "selfcheck"]


def parse_play(value: str) -> Tuple[int, int]:
    """GAME:PLAY -> (game_id, play_id)"""
    try:
        game, play = value.split(":")
        return int(game), int(play)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected GAME:PLAY, got {value!r}")


def positive_int(value: str) -> int:
    """Replicate counts must be at least one"""
    try:
        number = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {value!r}")
    if number < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {number}")
    return number


def parse_weeks(value: str) -> List[int]:
    """Week list such as 1,2,5 or 1-4 -> sorted weeks"""
    weeks = set()
    try:
        for part in value.split(","):
            if "-" in part:
                lo, hi = part.split("-")
                weeks.update(range(int(lo), int(hi) + 1))
            elif part.strip():
                weeks.add(int(part))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad week list {value!r}")
    return sorted(weeks)


def build_parser():
    parser = argparse.ArgumentParser(
        description="Pass-rush STRAIN metric: ingest, curves, leaderboards and mixed-model fit"
    )
    parser.add_argument(
        "command",
        choices=COMMANDS,
        help="Pipeline stage to run"
    )
    parser.add_argument(
        "--data",
        default=STRAIN_DATA_DIR,
        help=f"Directory with tracking, plays, scouting, players and games files (default: {STRAIN_DATA_DIR})"
    )
    parser.add_argument(
        "--out",
        default=STRAIN_OUTPUT_DIR,
        help=f"Output directory (default: {STRAIN_OUTPUT_DIR})"
    )
    parser.add_argument(
        "--weeks",
        type=parse_weeks,
        default=None,
        help="Weeks to load, e.g. 1-4 or 1,3,5 (default: all)"
    )
    parser.add_argument(
        "--min-snaps",
        type=int,
        default=STRAIN_MIN_SNAPS,
        help=f"Minimum snaps for leaderboards and correlations (default: {STRAIN_MIN_SNAPS})"
    )
    parser.add_argument(
        "--max-frame",
        type=int,
        default=STRAIN_MAX_FRAME,
        help=f"Frames after the snap covered by curves (default: {STRAIN_MAX_FRAME})"
    )
    parser.add_argument(
        "--distance-floor",
        type=float,
        default=STRAIN_DISTANCE_FLOOR,
        help=f"Distance clamp in yards for the STRAIN denominator (default: {STRAIN_DISTANCE_FLOOR})"
    )
    parser.add_argument(
        "--bootstrap",
        type=positive_int,
        default=None,
        help=f"Drive bootstrap replicates for fit/report (default: none; bootstrap command: "
             f"{STRAIN_BOOTSTRAP_REPLICATES})"
    )
    parser.add_argument(
        "--seed",
        type=int,
        default=STRAIN_BOOTSTRAP_SEED,
        help=f"Bootstrap seed (default: {STRAIN_BOOTSTRAP_SEED})"
    )
    parser.add_argument(
        "--workers",
        type=int,
        default=STRAIN_WORKERS,
        help=f"Bootstrap worker processes (default: {STRAIN_WORKERS})"
    )
    parser.add_argument(
        "--play",
        type=parse_play,
        default=None,
        help="GAME:PLAY for a single-play feature table (strain/report)"
    )
    parser.add_argument(
        "--coverage",
        action="store_true",
        help="selfcheck: also run the bootstrap coverage Monte Carlo (slow)"
    )
    return parser


def _selfcheck(args) -> int:
    from analysis.synthetic import run_selfcheck

    print(f"\n{'='*60}")
    print("🧪 SELF-CHECK: synthetic oracles")
    print(f"{'='*60}")
    results = run_selfcheck(include_bootstrap=args.coverage)
    for result in results:
        mark = "✅" if result.passed else "❌"
        print(f"{mark} {result.name:<32} {result.detail}")
    failed = [r.name for r in results if not r.passed]
    if failed:
        print(f"\n❌ {len(failed)} of {len(results)} checks failed")
        return EXIT_FAILURE
    print(f"\n✅ All {len(results)} checks passed")
    return EXIT_OK


def run(args) -> int:
    if args.command == "selfcheck":
        return _selfcheck(args)

    from strain_workflow import StrainWorkflow

    workflow = StrainWorkflow(
        data_dir=args.data,
        output_dir=args.out,
        weeks=args.weeks,
        distance_floor=args.distance_floor,
        max_frame=args.max_frame,
        min_snaps=args.min_snaps,
    )

    bootstrap = None
    if args.bootstrap is not None or args.command == "bootstrap":
        bootstrap = BootstrapConfig(
            n_replicates=args.bootstrap if args.bootstrap is not None else STRAIN_BOOTSTRAP_REPLICATES,
            seed=args.seed,
            parallelism=args.workers,
        )

    if args.command == "ingest":
        workflow.run_ingest()
    elif args.command == "strain":
        workflow.run_strain(args.play)
    elif args.command == "curves":
        workflow.run_curves()
    elif args.command == "leaderboard":
        workflow.run_leaderboard()
    elif args.command == "fit":
        workflow.run_fit()
        if bootstrap is not None:
            workflow.run_bootstrap(bootstrap)
    elif args.command == "bootstrap":
        workflow.run_bootstrap(bootstrap)
    elif args.command == "report":
        workflow.run_report(bootstrap, args.play)
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point"""
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, LOG_LEVEL.upper(), logging.INFO),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )

    try:
        return run(args)
    except DataError as e:
        logger.error("%s", e)
        print(f"❌ Data error: {e}")
        return EXIT_DATA_ERROR
    except KeyboardInterrupt:
        print("\n\n⚠️  Interrupted by user")
        return EXIT_FAILURE
    except Exception as e:
        logger.exception("unexpected failure in %s", args.command)
        print(f"❌ {type(e).__name__}: {e}")
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
