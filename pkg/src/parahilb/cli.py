"""Command-line front end.

Every subcommand prints one JSON document (sorted keys) to stdout or to
--out. Exit codes: 0 computed or verified, 1 usage or invalid input,
2 verification found violations.
"""

import argparse
import json
import logging
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Optional, Sequence

from . import __version__, cells, weights
from .errors import ParahilbError
from .fock import verify_heisenberg
from .genfun import (
    BettiData,
    local_punctual_series,
    parabolic_poincare_series,
    series_json,
    verify_cell_vs_product,
    verify_shift_invariance,
)
from .lattice import (
    IndexVector,
    ShiftConvention,
    Window,
    classify_generator,
    degree,
    g_value,
    mu,
    shift_index,
    verify_dimension_lemmas,
)
from .report import Report
from .series import L, Z, TruncationOrder, format_poly

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VIOLATION = 2

DEFAULT_WINDOW = "-1:2"
DEFAULT_ORDER = "4,2"
DEFAULT_BETTI = ("X=1,0,1,0,1", "D=1,0,1")

# Flags whose values may begin with "-".
SIGNED_VALUE_FLAGS = ("--window", "--beta", "--v", "--u", "--alpha-minus")

# Named bounds of the verification suites.
PRESETS = {
    "lemmas": {"small": 2, "medium": 3},
    "fock": {
        "small": (2, "-1:2", 1),
        "medium": (3, "-2:3", 1),
        "acceptance": (4, "-2:3", 1),
    },
}


class UsageError(ValueError):
    """Missing or inconsistent flags."""


@dataclass(frozen=True)
class RunConfig:
    """Settings shared by the subcommands."""

    window: Window
    order: TruncationOrder
    betti: Optional[BettiData]
    convention: ShiftConvention
    jobs: int
    out: Optional[Path]


class ArgumentParser(argparse.ArgumentParser):
    """argparse with usage errors mapped to exit code 1."""

    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_order(text: str, window: Window) -> TruncationOrder:
    """Parse "N0" or "N0,M" into a uniform order over the window."""
    parts = text.split(",")
    if len(parts) > 2:
        raise ValueError(f"order must look like N0 or N0,M, got {text!r}")
    n0 = int(parts[0])
    cap = int(parts[1]) if len(parts) == 2 else 2
    return TruncationOrder.uniform(n0, window, cap)


def _join_signed_values(argv: Sequence[str]) -> list[str]:
    joined: list[str] = []
    tokens = list(argv)
    k = 0
    while k < len(tokens):
        token = tokens[k]
        if token in SIGNED_VALUE_FLAGS and k + 1 < len(tokens) and tokens[k + 1].startswith("-"):
            joined.append(f"{token}={tokens[k + 1]}")
            k += 2
            continue
        joined.append(token)
        k += 1
    return joined


def build_parser() -> ArgumentParser:
    parser = ArgumentParser(
        prog="parahilb",
        description="Cells, generating functions and Heisenberg relations "
        "of parabolic Hilbert schemes of points.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")

    common = ArgumentParser(add_help=False)
    common.add_argument("--window", default=DEFAULT_WINDOW, help="levels lo:hi (default -1:2)")
    common.add_argument("--order", default=DEFAULT_ORDER, help="truncation N0[,M]")
    common.add_argument("--betti", nargs="+", metavar="S=b0,...", help="X=b0,..,b4 D=b0,b1,b2")
    common.add_argument(
        "--convention",
        choices=[c.value for c in ShiftConvention],
        default=ShiftConvention.D_PRESERVING.value,
    )
    common.add_argument("--jobs", type=int, default=1, help="worker processes, 0 = all CPUs")
    common.add_argument("--out", type=Path, help="write JSON here instead of stdout")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cells", parents=[common], help="fixed-point labels and cells of v")
    p.add_argument("--v", required=True, help='index vector, e.g. \'{"0":2,"1":1}\'')
    p.set_defaults(handler=cmd_cells)

    p = sub.add_parser("genfun", parents=[common], help="Poincare series of X^[v]")
    p.add_argument("--v", help="extract the coefficient of x^v")
    p.set_defaults(handler=cmd_genfun)

    p = sub.add_parser("local", parents=[common], help="punctual classes as polynomials in L")
    p.add_argument("--v", help="extract the coefficient of x^v")
    p.set_defaults(handler=cmd_local)

    p = sub.add_parser("weights", parents=[common], help="tangent weights at the fixed points")
    p.add_argument("--v", required=True)
    p.add_argument("--alpha-minus", type=int, help="lower window edge used by the formula")
    p.set_defaults(handler=cmd_weights)

    p = sub.add_parser("shift", parents=[common], help="index map v -> v'(beta)")
    p.add_argument("--v", required=True)
    p.add_argument("--beta", type=int, required=True)
    p.set_defaults(handler=cmd_shift)

    p = sub.add_parser("mu", parents=[common], help="class, g and mu of a generator")
    p.add_argument("--u", required=True)
    p.set_defaults(handler=cmd_mu)

    p = sub.add_parser("verify", parents=[common], help="run a verification suite")
    p.add_argument("suite", choices=["lemmas", "cells-vs-product", "weights", "fock", "shift"])
    p.add_argument(
        "--bound", default="small", help="integer, or small / medium / acceptance (fock)"
    )
    p.add_argument("--max-n", type=int, default=3, help="largest rho_0 enumerated")
    p.add_argument("--cap", type=int, default=1, help="largest jump multiplicity enumerated")
    p.set_defaults(handler=cmd_verify)
    return parser


def make_config(args: argparse.Namespace, require_betti: bool = False) -> RunConfig:
    window = Window.parse(args.window)
    if require_betti and not args.betti:
        raise UsageError("--betti X=b0,..,b4 D=b0,b1,b2 is required")
    betti = BettiData.parse(args.betti) if args.betti else None
    return RunConfig(
        window=window,
        order=parse_order(args.order, window),
        betti=betti,
        convention=ShiftConvention(args.convention),
        jobs=args.jobs,
        out=args.out,
    )


def cmd_cells(args: argparse.Namespace, config: RunConfig) -> tuple[dict[str, Any], int]:
    return cells.describe(IndexVector.from_json(args.v)), EXIT_OK


def cmd_genfun(args: argparse.Namespace, config: RunConfig) -> tuple[dict[str, Any], int]:
    config = make_config(args, require_betti=True)
    series = parabolic_poincare_series(config.betti, config.window, config.order)
    if args.v is None:
        return series_json(series, "z"), EXIT_OK
    v = IndexVector.from_json(args.v)
    data = {
        "betti": config.betti.to_json(),
        "v": v.to_json(),
        "poincare": format_poly(series.coefficient(v, Z)),
    }
    return data, EXIT_OK


def cmd_local(args: argparse.Namespace, config: RunConfig) -> tuple[dict[str, Any], int]:
    series = local_punctual_series(config.window, config.order)
    if args.v is not None:
        v = IndexVector.from_json(args.v)
        return {"v": v.to_json(), "motive": format_poly(series.coefficient(v, L))}, EXIT_OK
    return series_json(series, "L"), EXIT_OK


def cmd_weights(args: argparse.Namespace, config: RunConfig) -> tuple[dict[str, Any], int]:
    v = IndexVector.from_json(args.v)
    rows = weights.describe(v, args.alpha_minus)
    return {"v": v.to_json(), "degree": degree(v), "fixed_points": rows}, EXIT_OK


def cmd_shift(args: argparse.Namespace, config: RunConfig) -> tuple[dict[str, Any], int]:
    v = IndexVector.from_json(args.v)
    image, window = shift_index(v, args.beta, config.window, config.convention)
    data = {
        "v": v.to_json(),
        "beta": args.beta,
        "convention": config.convention.value,
        "image": image.to_json(),
        "window": window.to_json(),
        "degree": degree(v),
        "image_degree": degree(image),
    }
    return data, EXIT_OK


def cmd_mu(args: argparse.Namespace, config: RunConfig) -> tuple[dict[str, Any], int]:
    u = IndexVector.from_json(args.u)
    cls = classify_generator(u)
    data: dict[str, Any] = {"u": u.to_json(), "class": cls.to_json()}
    if cls.is_generator:
        data["g"] = g_value(u)
        data["mu"] = mu(u)
    return data, EXIT_OK


def _bound(suite: str, text: str) -> Any:
    presets = PRESETS.get(suite, {})
    if text in presets:
        return presets[text]
    try:
        return int(text)
    except ValueError as e:
        raise UsageError(f"--bound must be an integer or one of {sorted(presets)}") from e


def cmd_verify(args: argparse.Namespace, config: RunConfig) -> tuple[dict[str, Any], int]:
    suites: dict[str, Callable[[], Report]] = {
        "lemmas": lambda: verify_dimension_lemmas(_bound("lemmas", args.bound), config.jobs),
        "cells-vs-product": lambda: verify_cell_vs_product(
            config.window, args.max_n, args.cap, config.jobs
        ),
        "weights": lambda: weights.verify_tangent_weights(
            config.window, args.max_n, args.cap, config.jobs
        ),
        "fock": lambda: verify_heisenberg(
            config.betti or BettiData.parse(DEFAULT_BETTI),
            _fock_order(args, config),
            config.jobs,
        ),
        "shift": lambda: verify_shift_invariance(
            config.betti or BettiData.parse(DEFAULT_BETTI),
            config.window,
            args.max_n,
            args.cap,
            config.jobs,
        ),
    }
    report = suites[args.suite]()
    return report.to_json(), EXIT_OK if report.ok else EXIT_VIOLATION


def _fock_order(args: argparse.Namespace, config: RunConfig) -> TruncationOrder:
    bound = _bound("fock", args.bound)
    if isinstance(bound, tuple):
        n0, window, cap = bound
        return TruncationOrder.uniform(n0, Window.parse(window), cap)
    return TruncationOrder.uniform(bound, config.window, args.cap)


def emit(data: dict[str, Any], out: Optional[Path]) -> None:
    text = json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text, encoding="utf-8")
        logger.info("Wrote %s", out)


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Parse arguments, run one subcommand and return its exit code."""
    parser = build_parser()
    args = parser.parse_args(_join_signed_values(sys.argv[1:] if argv is None else argv))
    try:
        config = make_config(args)
        data, code = args.handler(args, config)
    except UsageError as e:
        parser.print_usage(sys.stderr)
        print(f"parahilb: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (ParahilbError, ValueError) as e:
        logger.error("%s failed: %s", args.command, e)
        print(f"parahilb: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    emit(data, config.out)
    return code
