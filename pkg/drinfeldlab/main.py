"""Main CLI entrypoint for DrinfeldLab.

Subcommands:
- height        canonical height of each point of an instance, both methods
- scan-zimmer   seeded scan of the height-difference sandwich
- scan-jplaces  enumeration scan of the ratio h_hat(x) / max{h(j), deg D}
- torsion       torsion submodule with annihilators
- family        specialization experiment over F_q(T)(u)
- enumerate     modules of bounded height up to isomorphism

Every command prints a text summary, writes the JSON report when `--out` is
given, and exits 0 when all checks pass, 2 on an inequality violation, 3 when
a resource guard trips and 4 on a schema error.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, List, Optional

import click
from dotenv import load_dotenv
from pydantic import ValidationError

from drinfeldlab import __version__
from drinfeldlab.heights.interval import parse_rational
from drinfeldlab.lab.experiments import (
    ScanReport,
    cmd_enumerate_modules,
    cmd_height,
    cmd_scan_jplaces,
    cmd_scan_zimmer,
    cmd_torsion,
)
from drinfeldlab.lab.family import cmd_family
from drinfeldlab.lab.schema import Instance, load_instance
from drinfeldlab.reporting.generator import generate_reports
from drinfeldlab.utils.config import AppConfig, load_config
from drinfeldlab.utils.errors import InequalityViolation, ResourceGuardError, SchemaError
from drinfeldlab.utils.logging import get_logger

load_dotenv()  # DRINFELDLAB_* variables from .env, if present

EXIT_OK = 0
EXIT_VIOLATION = 2
EXIT_GUARD = 3
EXIT_SCHEMA = 4


@dataclass
class CliState:
    config: AppConfig
    instance_path: Optional[Path] = None

    def instance(self, required: bool = True) -> Optional[Instance]:
        if self.instance_path is None:
            if required:
                raise SchemaError("--instance is required for this command", path="instance")
            return None
        return load_instance(self.instance_path)


class RationalType(click.ParamType):
    """Exact rationals on the command line: "3", "1/64"."""

    name = "rational"

    def convert(self, value: Any, param: Optional[click.Parameter], ctx: Optional[click.Context]) -> Fraction:
        if isinstance(value, Fraction):
            return value
        try:
            return parse_rational(str(value))
        except (ValueError, ZeroDivisionError):
            self.fail(f"{value!r} is not an exact rational", param, ctx)


RATIONAL = RationalType()


def _positive(name: str, value: Optional[Fraction]) -> Optional[Fraction]:
    if value is not None and value <= 0:
        raise SchemaError("must be positive", path=name)
    return value


def _pick(flag: Any, instance: Optional[Instance], attr: str, path: str) -> Any:
    """Flag first, then the instance's experiment block; never a silent default."""
    if flag is not None:
        return flag
    if instance is not None:
        value = getattr(instance.experiment, attr)
        if value is not None:
            return value
    raise SchemaError("missing parameter; pass the flag or set it in the instance", path=path)


def _q_from(flag: Optional[int], instance: Optional[Instance]) -> int:
    if flag is not None:
        return flag
    if instance is not None:
        return instance.descriptor.q
    raise SchemaError("missing field order; pass --q or an instance", path="field")


def _emit(state: CliState, report: ScanReport, out: Optional[Path]) -> int:
    logger = get_logger()
    text = generate_reports(report, out)
    click.echo(text)
    if out is not None:
        logger.info("Report written: %s", str(out))
    report.raise_for_violations()
    return EXIT_OK


common_out = click.option("--out", type=click.Path(dir_okay=False, path_type=Path), default=None, help="JSON report path")
common_tol = click.option("--tol", type=RATIONAL, default=None, help="Method A tolerance, e.g. 1/64")


@click.group(name="drinfeldlab")
@click.version_option(__version__, prog_name="drinfeldlab")
@click.option("--config", "config_path", type=str, default=None, help="Config file (YAML/JSON)")
@click.option("--instance", "instance_path", type=click.Path(path_type=Path), default=None, help="Instance JSON file")
@click.option("--workers", type=int, default=None, help="Worker processes for scans")
@click.option("--log-level", type=str, default=None, help="Override the configured log level")
@click.pass_context
def cli(
    ctx: click.Context,
    config_path: Optional[str],
    instance_path: Optional[Path],
    workers: Optional[int],
    log_level: Optional[str],
) -> None:
    """Exact heights and discriminants for Drinfeld modules over F_q(T)."""
    config = load_config(config_path, overrides={"scan": {"workers": workers}, "logging": {"level": log_level}})
    get_logger(config.logging.level, config.logging.file_path)
    ctx.obj = CliState(config, instance_path)


def _instance_option(fn: Callable[..., Any]) -> Callable[..., Any]:
    """`--instance` is accepted after the subcommand as well."""
    return click.option(
        "--instance", "sub_instance", type=click.Path(path_type=Path), default=None, help="Instance JSON file"
    )(fn)


def _state(ctx: click.Context, sub_instance: Optional[Path]) -> CliState:
    state: CliState = ctx.obj
    if sub_instance is not None:
        state.instance_path = sub_instance
    return state


@cli.command("height")
@_instance_option
@common_tol
@common_out
@click.pass_context
def height_command(ctx: click.Context, sub_instance: Optional[Path], tol: Optional[Fraction], out: Optional[Path]) -> int:
    """Canonical height, local decomposition and bounds for each point."""
    state = _state(ctx, sub_instance)
    instance = state.instance()
    report = cmd_height(instance, state.config, _positive("tol", tol))
    return _emit(state, report, out)


@cli.command("scan-zimmer")
@_instance_option
@click.option("--seed", type=click.IntRange(0, 2**64 - 1), default=None)
@click.option("--count", type=click.IntRange(min=1), default=None)
@click.option("--bound", type=click.IntRange(min=0), default=None, help="Coefficient and point height bound")
@click.option("--q", "q", type=int, default=None, help="Field order")
@click.option("--r", "r", type=click.IntRange(min=1), default=None, help="Rank")
@common_tol
@common_out
@click.pass_context
def scan_zimmer_command(
    ctx: click.Context,
    sub_instance: Optional[Path],
    seed: Optional[int],
    count: Optional[int],
    bound: Optional[int],
    q: Optional[int],
    r: Optional[int],
    tol: Optional[Fraction],
    out: Optional[Path],
) -> int:
    """Random modules and points against the height-difference sandwich."""
    state = _state(ctx, sub_instance)
    instance = state.instance(required=False)
    tol = _positive("tol", tol) or (instance.tol if instance else None)
    report = cmd_scan_zimmer(
        _pick(seed, instance, "seed", "experiment.seed"),
        _pick(count, instance, "count", "experiment.count"),
        _q_from(q, instance),
        _pick(r, instance, "rank", "experiment.rank"),
        _pick(bound, instance, "bound", "experiment.bound"),
        state.config,
        tol,
    )
    return _emit(state, report, out)


@cli.command("scan-jplaces")
@_instance_option
@click.option("--seed", type=click.IntRange(0, 2**64 - 1), default=None)
@click.option("--bound", type=click.IntRange(min=0), default=None, help="Coefficient height bound")
@click.option("--q", "q", type=int, default=None, help="Field order")
@click.option("--r", "r", type=click.IntRange(min=1), default=None, help="Rank")
@click.option("--s", "s", type=click.IntRange(min=0), default=None, help="Persistently bad places allowed")
@common_tol
@common_out
@click.pass_context
def scan_jplaces_command(
    ctx: click.Context,
    sub_instance: Optional[Path],
    seed: Optional[int],
    bound: Optional[int],
    q: Optional[int],
    r: Optional[int],
    s: Optional[int],
    tol: Optional[Fraction],
    out: Optional[Path],
) -> int:
    """Ratio scan over modules with few persistently bad places."""
    state = _state(ctx, sub_instance)
    instance = state.instance(required=False)
    tol = _positive("tol", tol) or (instance.tol if instance else None)
    report = cmd_scan_jplaces(
        _pick(seed, instance, "seed", "experiment.seed"),
        _q_from(q, instance),
        _pick(r, instance, "rank", "experiment.rank"),
        _pick(s, instance, "s", "experiment.s"),
        _pick(bound, instance, "bound", "experiment.bound"),
        state.config,
        tol,
        instance.experiment.point_height if instance else None,
    )
    return _emit(state, report, out)


@cli.command("torsion")
@_instance_option
@common_out
@click.pass_context
def torsion_command(ctx: click.Context, sub_instance: Optional[Path], out: Optional[Path]) -> int:
    """Full torsion submodule with annihilators."""
    state = _state(ctx, sub_instance)
    report = cmd_torsion(state.instance(), state.config)
    return _emit(state, report, out)


@cli.command("family")
@_instance_option
@common_tol
@common_out
@click.pass_context
def family_command(ctx: click.Context, sub_instance: Optional[Path], tol: Optional[Fraction], out: Optional[Path]) -> int:
    """Specializations of a family over F_q(T)(u) and the fitted slope."""
    state = _state(ctx, sub_instance)
    report = cmd_family(state.instance(), state.config, _positive("tol", tol))
    return _emit(state, report, out)


@cli.command("enumerate")
@_instance_option
@click.option("--bound", type=RATIONAL, default=None, help="Height bound on h(phi)")
@click.option("--seed", type=click.IntRange(0, 2**64 - 1), default=None, help="Traversal order")
@click.option("--q", "q", type=int, default=None, help="Field order")
@click.option("--r", "r", type=click.IntRange(min=1), default=None, help="Rank")
@common_out
@click.pass_context
def enumerate_command(
    ctx: click.Context,
    sub_instance: Optional[Path],
    bound: Optional[Fraction],
    seed: Optional[int],
    q: Optional[int],
    r: Optional[int],
    out: Optional[Path],
) -> int:
    """Modules with h(phi) <= bound up to isomorphism."""
    state = _state(ctx, sub_instance)
    instance = state.instance(required=False)
    height_bound = _pick(bound, instance, "bound", "experiment.bound")
    if height_bound < 0:
        raise SchemaError("must be nonnegative", path="bound")
    report = cmd_enumerate_modules(
        _q_from(q, instance),
        _pick(r, instance, "rank", "experiment.rank"),
        Fraction(height_bound),
        state.config,
        seed if seed is not None else ((instance.experiment.seed or 0) if instance else 0),
    )
    return _emit(state, report, out)


def main(argv: Optional[List[str]] = None) -> int:
    """Program entrypoint.

    Runs click without its own exit handling so the library errors can be
    mapped onto the documented exit codes.
    """
    logger = get_logger()
    try:
        result = cli.main(args=argv, prog_name="drinfeldlab", standalone_mode=False)
    except InequalityViolation as exc:
        logger.error("Inequality violation: %s", exc)
        return EXIT_VIOLATION
    except ResourceGuardError as exc:
        logger.error("Resource guard: %s (bound %s)", exc, exc.bound)
        return EXIT_GUARD
    except SchemaError as exc:
        logger.error("Schema error at %s: %s", exc.path or "<root>", exc.message)
        return EXIT_SCHEMA
    except ValidationError as exc:
        logger.error("Schema error: %s", exc)
        return EXIT_SCHEMA
    except click.UsageError as exc:
        exc.show()
        return EXIT_SCHEMA
    except click.Abort:
        return 1
    return result if isinstance(result, int) else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
