import argparse
from pathlib import Path
from typing import Sequence

from .constants import DEFAULT_DELAY, DEFAULT_INTERNAL_CAP, SCRIPT_SUFFIX, VERSION


def parse_arguments(args: Sequence[str]) -> argparse.Namespace:
    def _parse_patterns(arg: str):
        return arg.split(",")

    parser = argparse.ArgumentParser(
        prog="superloops",
        description=f"""
            Run the verification script <path> and print its report.\n
            A directory runs every {SCRIPT_SUFFIX} script inside it as a suite.
        """,
        allow_abbrev=False,
    )
    parser.add_argument(
        "path", type=Path, help=f"A {SCRIPT_SUFFIX} script or a directory of scripts."
    )
    parser.add_argument(
        "--json", action="store_true", help="Print reports as JSON instead of text"
    )
    parser.add_argument(
        "--golden",
        type=Path,
        required=False,
        help="Compare JSON reports with the files stored in this directory",
    )
    parser.add_argument(
        "--update-golden",
        action="store_true",
        help="Write the reports to the golden directory instead of comparing",
    )
    parser.add_argument(
        "--seed",
        type=int,
        required=False,
        help="Seed for randomized property checks (default: 0)",
    )
    parser.add_argument(
        "--caps",
        type=int,
        required=False,
        help=f"Internal degree cap for bigraded slices (default: {DEFAULT_INTERNAL_CAP})",
    )
    parser.add_argument(
        "--timing", action="store_true", help="Include wall-clock timing in reports"
    )
    parser.add_argument(
        "--verbose", action="store_true", help="Log sizes of bases and expansions"
    )
    parser.add_argument(
        "--watch",
        action="store_true",
        help="Rerun the scripts whenever a watched file changes",
    )
    parser.add_argument(
        "--delay",
        type=float,
        required=False,
        help="The delay (in seconds) before rerunning "
        f"in watch mode (default: {DEFAULT_DELAY})",
    )
    parser.add_argument(
        "--patterns",
        type=_parse_patterns,
        required=False,
        help="File patterns to watch, specified as comma-separated "
        f"Unix-style patterns (default: '*{SCRIPT_SUFFIX}')",
    )
    parser.add_argument(
        "--ignore-patterns",
        type=_parse_patterns,
        required=False,
        help="File patterns to ignore, specified as comma-separated "
        "Unix-style patterns (default: '')",
    )
    parser.add_argument("--version", action="version", version=VERSION)

    return parser.parse_args(args)
