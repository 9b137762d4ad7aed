import argparse
import logging
import sys
from typing import List, Optional

from pydantic import ValidationError

from app.config import get_settings
from app.models.models import CommandInvocation, ErrorDocument, TraceDocument
from app.routers import chabauty, compactify, group, groupoid, hyper, remetrize, sigma, simple_group, vectors
from app.routers.router import Outcome, dumps
from app.utils.errors import LclabError

logger = logging.getLogger("app")

ROUTERS = [sigma, remetrize, compactify, hyper, group, chabauty, simple_group, groupoid, vectors]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="Overrides LCLAB_SEED")
    common.add_argument("--verbose", action="store_true", help="Debug logging on stderr")
    common.add_argument("--json", action="store_true", help="Print the result as JSON")
    common.add_argument("--trace", default=None, metavar="PATH", help="Write a trace document")

    parser = argparse.ArgumentParser(
        prog="lclab",
        description="Computable topology of locally compact Polish spaces and groups",
    )
    subparsers = parser.add_subparsers(dest="group", metavar="group")
    subparsers.required = True

    # Include routers
    for module in ROUTERS:
        module.router.mount(subparsers, common)
    return parser


def configure_logging(verbose: bool) -> None:
    level = logging.DEBUG if verbose else getattr(logging, get_settings().log_level.upper(), logging.WARNING)
    logging.basicConfig(stream=sys.stderr, level=level, format="%(levelname)s %(name)s: %(message)s", force=True)


def invocation(args: argparse.Namespace) -> CommandInvocation:
    skip = {"handler", "command", "group", "action", "seed", "verbose", "json", "trace", "instance", "prec",
            "budget"}
    parameters = {k: v for k, v in sorted(vars(args).items()) if k not in skip and v is not None}
    return CommandInvocation(
        subcommand=args.command,
        instance=getattr(args, "instance", None),
        parameters=parameters,
        precision=getattr(args, "prec", None),
        budget=getattr(args, "budget", None),
        output=args.trace,
    )


def render(outcome: Outcome, as_json: bool) -> str:
    if isinstance(outcome.result, str):
        return dumps({"value": outcome.result}) if as_json else outcome.result
    return dumps(outcome.result)


def write_trace(path: str, inv: CommandInvocation, seed: int, outcome: Outcome) -> None:
    document = TraceDocument(
        schema_version=get_settings().schema_version,
        command=inv,
        seed=seed,
        steps=outcome.steps,
        summary={**outcome.summary, "exit_code": outcome.exit_code},
    )
    with open(path, "w") as handle:
        handle.write(dumps(document) + "\n")
    logger.info(f"trace written to {path}")


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    settings = get_settings()
    configure_logging(args.verbose)
    args.seed = settings.seed if args.seed is None else args.seed
    if getattr(args, "prec", False) is None:
        args.prec = settings.default_prec
    if getattr(args, "budget", False) is None:
        args.budget = settings.default_budget

    try:
        inv = invocation(args)
        logger.debug(f"dispatching {inv.subcommand} with seed {args.seed}")
        outcome = args.handler(args)
        print(render(outcome, args.json))
        if args.trace:
            write_trace(args.trace, inv, args.seed, outcome)
        return outcome.exit_code
    except LclabError as e:
        logger.error(f"{e.code}: {e.message}")
        print(dumps(ErrorDocument(error=e.code, message=e.message, details=e.details)))
        return e.exit_code
    except ValidationError as e:
        print(dumps(ErrorDocument(error="USAGE_ERROR", message=str(e))))
        return 2


if __name__ == "__main__":
    sys.exit(main())
