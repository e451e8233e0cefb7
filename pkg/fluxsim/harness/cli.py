"""Command line entry point: ``fluxsim <subcommand> --config <path>``."""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

from fluxsim.classes import ConfigError
from fluxsim.constants import (
    EXIT_CONFIG_ERROR,
    EXIT_PARTIAL_FAILURE,
    EXIT_SUCCESS,
    SUBCOMMANDS,
)

from .config import SHIPPED_CONFIGS, load_config
from .runner import run


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fluxsim",
        description="Spectra, transition catalogs and steady-state transmission maps "
        "of a heavy fluxonium coupled to a readout resonator.",
    )
    parser.add_argument("subcommand", choices=SUBCOMMANDS)
    parser.add_argument(
        "--config",
        required=True,
        help="Path to a JSON configuration file, or the name of a shipped one "
        f"({', '.join(SHIPPED_CONFIGS)}).",
    )
    parser.add_argument(
        "--out", default=None, help="Output directory, overrides output.directory."
    )
    parser.add_argument(
        "--jobs",
        type=int,
        default=None,
        help="Number of worker processes, overrides output.parallelism.",
    )
    parser.add_argument(
        "--no-cache",
        action="store_true",
        help="Neither read nor write the cell cache.",
    )
    parser.add_argument(
        "--quiet", action="store_true", help="Hide progress bars."
    )
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    r"""Runs the command line interface.

    :param argv: command line arguments. (default: ``sys.argv[1:]``)
    :return: the exit code, 0 on success, 2 on configuration error and 3 when some
        cells failed.
    """
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config)
        manifest = run(
            args.subcommand,
            config,
            out_dir=args.out,
            jobs=args.jobs,
            use_cache=not args.no_cache,
            verbose=not args.quiet,
        )
    except (ConfigError, FileNotFoundError, ValueError) as err:
        print(f"fluxsim: configuration error: {err}", file=sys.stderr)  # noqa: T201
        return EXIT_CONFIG_ERROR

    if manifest.failed_cells:
        print(  # noqa: T201
            f"fluxsim: {len(manifest.failed_cells)} cells failed, see the manifest",
            file=sys.stderr,
        )
        return EXIT_PARTIAL_FAILURE
    return EXIT_SUCCESS


if __name__ == "__main__":
    sys.exit(main())
