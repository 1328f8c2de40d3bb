import argparse
import logging
import sys
from typing import List, Optional

from pydantic import ValidationError

from vexleb import __version__
from vexleb.core.dependencies import is_number
from vexleb.core.errors import UsageError, VexlebError
from vexleb.routes import blowup, check, embed, estimate, norm, transform, verify
from vexleb.schemas.grid import ExponentField, GridFunction
from vexleb.schemas.run import RunConfig
from vexleb.utils.gridio import dumps_grid_function
from vexleb.utils.logging import log_run_event, setup_logging
from vexleb.utils.serialization import dumps, to_csv

logger = logging.getLogger(__name__)

ROUTES = (norm, transform, check, estimate, blowup, embed, verify)


class CliParser(argparse.ArgumentParser):
    """Argument errors become UsageError so every failure shares one exit-code path."""

    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _add_common_arguments(parser: argparse.ArgumentParser):
    parser.add_argument("--seed", type=int, default=0, help="seed for every random choice in the run")
    parser.add_argument("--output", help="write the report here instead of stdout")
    parser.add_argument("--format", dest="fmt", choices=("json", "csv"), default="json")
    parser.add_argument("--csv", dest="fmt", action="store_const", const="csv", help="shorthand for --format csv")
    parser.add_argument("--tol", type=float, help="Luxemburg norm tolerance (default from settings)")
    parser.add_argument("--threads", type=int, help="worker threads, 0 = one per CPU (default VEXLEB_THREADS)")
    parser.add_argument("--log-level", help="DEBUG, INFO, WARNING or ERROR")


def build_parser() -> CliParser:
    parser = CliParser(prog="vexleb", description="Variable-exponent Lebesgue space toolkit")
    parser.add_argument("--version", action="version", version=f"vexleb {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True, metavar="command")
    for route in ROUTES:
        route.register(subparsers)
    for sub in subparsers.choices.values():
        _add_common_arguments(sub)
    return parser


def build_config(args) -> RunConfig:
    inputs = {}
    for name in args.inputs:
        value = getattr(args, name, None)
        if value is not None and not is_number(value):
            inputs[name] = value
    params = {k: v for k, v in sorted(vars(args).items())
              if k not in ("handler", "inputs", "command", "output", "fmt", "seed") and k not in inputs}
    return RunConfig(command=args.command, inputs=inputs, params=params, output=args.output, fmt=args.fmt, seed=args.seed)


def render(result, fmt: str) -> str:
    if isinstance(result, (GridFunction, ExponentField)):
        return dumps_grid_function(result)
    if fmt == "csv":
        return to_csv(result)
    return dumps(result)


def write_output(text: str, output: Optional[str]):
    if output:
        with open(output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _fail(error: dict, exit_code: int) -> int:
    sys.stderr.write(dumps(error))
    return exit_code


def main(argv: Optional[List[str]] = None) -> int:
    setup_logging()
    try:
        args = build_parser().parse_args(argv)
        if args.log_level:
            setup_logging(args.log_level)
        config = build_config(args)
        log_run_event(config.command, {"params": config.params, "inputs": config.inputs, "seed": config.seed})
        result = args.handler(args)
        write_output(render(result, config.fmt), config.output)
        log_run_event(config.command, {"status": "ok", "output": config.output or "stdout"})
        return 0
    except VexlebError as e:
        level = logging.WARNING if e.exit_code == 2 else logging.ERROR
        logger.log(level, f"{type(e).__name__}: {e.detail}")
        return _fail(e.to_dict(), e.exit_code)
    except ValidationError as e:
        logger.error(f"Invalid input: {e}")
        return _fail({"error": "ValidationError", "detail": str(e.errors()[0]["msg"]), "context": {}}, 1)
    except OSError as e:
        logger.error(f"I/O error: {e}")
        return _fail({"error": type(e).__name__, "detail": str(e), "context": {}}, 1)


if __name__ == "__main__":
    sys.exit(main())
