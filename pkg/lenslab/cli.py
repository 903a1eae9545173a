# SPDX-FileCopyrightText: Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
"""Command line frontend.

Output goes to stdout and is a function of the arguments alone. Diagnostics go
to stderr. Exit codes: 0 on success, 2 on invalid input, 3 when an engine
precondition fails.
"""
import argparse
import sys
from collections.abc import Callable
from pathlib import Path
from typing import Any

import structlog
import yaml
from pydantic import ValidationError

from lenslab.app import setup
from lenslab.classify import ReportFormat
from lenslab.classify import classify_all
from lenslab.classify import decide
from lenslab.classify import render_report
from lenslab.classify import render_verdict
from lenslab.config import ConfigFile
from lenslab.config import Settings
from lenslab.exactlat import format_rational
from lenslab.exceptions import DegenerateForm
from lenslab.exceptions import EmptyBox
from lenslab.exceptions import InvalidParams
from lenslab.exceptions import NotApplicable
from lenslab.exceptions import NotSymmetric
from lenslab.exceptions import PreconditionViolated
from lenslab.exceptions import SingularMatrix
from lenslab.lens import d_lens_signed
from lenslab.lens import d_table
from lenslab.plumbing import d_plumbed
from lenslab.plumbing import load_graph
from lenslab.simpleknot import cone_diagram
from lenslab.simpleknot import render_signs
from lenslab.surgery import SurgeryProblem
from lenslab.surgery import h1_null
from lenslab.surgery import h1_order

logger = structlog.stdlib.get_logger()

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_PRECONDITION = 3

Command = Callable[[argparse.Namespace, Settings, ConfigFile], str]


def _d_lens(args: argparse.Namespace, settings: Settings, config: ConfigFile) -> str:
    if args.i is not None:
        return format_rational(d_lens_signed(args.p, args.q, args.i)) + "\n"
    sign = 1 if args.p > 0 else -1
    values = d_table(abs(args.p), args.q)
    return "".join(f"{i} {format_rational(sign * d)}\n" for i, d in enumerate(values))


def _d_plumbing(args: argparse.Namespace, settings: Settings, config: ConfigFile) -> str:
    table = d_plumbed(load_graph(Path(args.file)), settings.threads)
    return "".join(
        f"{' '.join(map(str, entry.spinc.canonical))} {format_rational(entry.d)}\n"
        for entry in table.entries
    )


def _h1(args: argparse.Namespace, settings: Settings, config: ConfigFile) -> str:
    sp = SurgeryProblem.of(args.p, args.k, args.m)
    if sp.k == 0:
        if sp.m == 0:
            raise InvalidParams("0-surgery on a null-homologous knot has infinite H_1")
        order = h1_null(sp.p, sp.m).order
    else:
        order = h1_order(sp)
    return f"{order} spin={str(order % 2 == 0).lower()}\n"


def _cone(args: argparse.Namespace, settings: Settings, config: ConfigFile) -> str:
    return render_signs(cone_diagram(args.p, args.k, args.m, args.r)) + "\n"


def _obstruct(args: argparse.Namespace, settings: Settings, config: ConfigFile) -> str:
    return render_verdict(decide(args.p, args.k, args.m, args.n, config)) + "\n"


def _classify(args: argparse.Namespace, settings: Settings, config: ConfigFile) -> str:
    m_bound = args.m_bound if args.m_bound is not None else settings.m_bound
    report = classify_all(args.p, m_bound, config, settings.threads)
    return render_report(report, ReportFormat(args.format))


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lenslab",
        description="d-invariant obstructions to distance one surgeries from L(p, 1).",
    )
    parser.add_argument("--log-level", default=None, help="Overrides LENSLAB_LOG_LEVEL")
    parser.add_argument("--threads", type=int, default=None, help="Overrides LENSLAB_THREADS")
    subparsers = parser.add_subparsers(dest="command", required=True)

    d_lens = subparsers.add_parser("d-lens", help="d-invariants of L(p, q).")
    d_lens.add_argument("p", type=int)
    d_lens.add_argument("q", type=int)
    d_lens.add_argument("i", type=int, nargs="?", default=None)
    d_lens.set_defaults(func=_d_lens)

    d_plumbing = subparsers.add_parser(
        "d-plumbing", help="d-invariants of the boundary of a plumbing graph file."
    )
    d_plumbing.add_argument("file")
    d_plumbing.set_defaults(func=_d_plumbing)

    h1 = subparsers.add_parser("h1", help="|H_1| of m*mu + lambda surgery and the Spin flag.")
    for name in ("p", "k", "m"):
        h1.add_argument(name, type=int)
    h1.set_defaults(func=_h1)

    cone = subparsers.add_parser("cone", help="Sign row of a simple knot cone diagram.")
    for name in ("p", "k", "m", "r"):
        cone.add_argument(name, type=int)
    cone.set_defaults(func=_cone)

    obstruct = subparsers.add_parser(
        "obstruct", help="Verdict for the surgery (k, m) from L(p, 1) to L(n, 1)."
    )
    for name in ("p", "k", "m", "n"):
        obstruct.add_argument(name, type=int)
    obstruct.set_defaults(func=_obstruct)

    classify = subparsers.add_parser("classify", help="Classification report for L(p, 1).")
    classify.add_argument("p", type=int)
    classify.add_argument("--m-bound", type=int, default=None)
    classify.add_argument(
        "--format", choices=[f.value for f in ReportFormat], default=ReportFormat.json.value
    )
    classify.set_defaults(func=_classify)
    return parser


def _settings(args: argparse.Namespace) -> Settings:
    overrides: dict[str, Any] = {}
    if args.log_level is not None:
        overrides["log_level"] = args.log_level
    if args.threads is not None:
        overrides["threads"] = args.threads
    return Settings(**overrides)


def _fail(code: int, error: Exception) -> int:
    print(f"lenslab: {error}", file=sys.stderr)
    return code


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    try:
        settings = _settings(args)
        config = setup(settings)
        command: Command = args.func
        output = command(args, settings, config)
    except (InvalidParams, ValidationError, yaml.YAMLError, OSError) as e:
        return _fail(EXIT_INVALID, e)
    except (
        PreconditionViolated,
        NotApplicable,
        EmptyBox,
        DegenerateForm,
        SingularMatrix,
        NotSymmetric,
    ) as e:
        logger.debug("Engine precondition failed", error=str(e))
        return _fail(EXIT_PRECONDITION, e)
    sys.stdout.write(output)
    return EXIT_OK
