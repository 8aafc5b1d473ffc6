"""
Command line entry point: ``mdet run``, ``mdet ablate`` and ``mdet gradcheck``
"""
from __future__ import annotations

import sys
from pathlib import Path
from typing import Any, Final, List, Optional, Sequence

import click
from loguru import logger

from ..config import ExperimentConfig
from ..elements import ReportFormat
from ..elements import Setting
from ..elements import Variant
from ..exceptions import BaseMatchDetException
from .ablation import check_ablation, protocol_config, run_ablation
from .gradcheck_suite import INSTANCES, run_gradcheck_suite
from .report import emit_report
from .training import train

EXIT_CHECK_FAILED: Final = 2

DEFAULT_SETTINGS: Final = "gtboxr,preboxr,noboxr"
DEFAULT_VARIANTS: Final = ",".join(v.label for v in Variant)


def _configure_logging(verbose: bool) -> None:
    logger.remove()
    logger.add(sys.stderr, level="DEBUG" if verbose else "INFO")


def _split(ctx: click.Context, param: click.Parameter, value: str) -> List[str]:
    return [v.strip() for v in value.split(",") if v.strip()]


def _load_config(
    path: Optional[Path],
    seed: Optional[int],
    base: Optional[ExperimentConfig] = None,
    **overrides: Any,
) -> ExperimentConfig:
    """The config file when given, else base, else the defaults"""
    if path is not None:
        config = ExperimentConfig.from_json(path)
    else:
        config = base if base is not None else ExperimentConfig()
    if seed is not None:
        overrides["seed"] = seed
    return config.with_overrides(**overrides) if overrides else config


@click.group()
@click.option("--verbose", "-v", is_flag=True, help="Log at DEBUG level.")
@click.pass_context
def cli(ctx: click.Context, verbose: bool) -> None:
    """MatchDet experiments on synthetic warped scene pairs."""
    _configure_logging(verbose)
    ctx.ensure_object(dict)


@cli.command()
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--out", "out_dir", type=click.Path(file_okay=False, path_type=Path), help="Output directory.")
@click.option("--seed", type=int, help="Override the configured seed.")
def run(config_path: Optional[Path], out_dir: Optional[Path], seed: Optional[int]) -> None:
    """Train one configuration and write report.json, report.csv and params.json."""
    config = _load_config(config_path, seed)
    out = out_dir if out_dir is not None else config.out_dir
    params, report = train(config, out_dir=out)
    emit_report(report, out / "report.json", ReportFormat.JSON)
    emit_report(report, out / "report.csv", ReportFormat.CSV)
    params.save(out / "params.json")
    click.echo(",".join(report.row().values()))


@cli.command()
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--settings", default=DEFAULT_SETTINGS, callback=_split, help="Comma-separated settings.")
@click.option("--variants", default=DEFAULT_VARIANTS, callback=_split, help="Comma-separated variants.")
@click.option("--seeds", default=5, type=click.IntRange(min=1), help="Number of seeds, counted from --seed.")
@click.option("--seed", type=int, default=None, help="First seed (default: the configured seed).")
@click.option("--out", "out_dir", type=click.Path(file_okay=False, path_type=Path), help="Output directory.")
@click.option("--assert", "assert_", is_flag=True, help="Exit with status 2 when a directional check fails.")
@click.option("--wall-time", is_flag=True, help="Record wall time (reports are then not byte-stable).")
@click.pass_context
def ablate(
    ctx: click.Context,
    config_path: Optional[Path],
    settings: Sequence[str],
    variants: Sequence[str],
    seeds: int,
    seed: Optional[int],
    out_dir: Optional[Path],
    assert_: bool,
    wall_time: bool,
) -> None:
    """
    Train the variant x setting x seed matrix and write ablation.csv and runs.jsonl.
    Without --config the reduced ablation protocol is used.
    """
    config = _load_config(config_path, None, protocol_config(), record_wall_time=wall_time)
    first = config.seed if seed is None else seed
    try:
        parsed_settings = [Setting.parse(s) for s in settings]
        parsed_variants = [Variant.parse(v) for v in variants]
    except BaseMatchDetException as e:
        raise click.BadParameter(str(e)) from e
    out = out_dir if out_dir is not None else config.out_dir
    reports = run_ablation(config, parsed_variants, parsed_settings, range(first, first + seeds), out)
    failures = check_ablation(reports)
    for f in failures:
        click.echo(f"FAILED: {f}", err=True)
    if assert_ and failures:
        ctx.exit(EXIT_CHECK_FAILED)


@cli.command()
@click.option("--instances", default=INSTANCES, type=click.IntRange(min=1), help="Random instances per stage.")
@click.option("--seed", default=0, type=int)
@click.pass_context
def gradcheck(ctx: click.Context, instances: int, seed: int) -> None:
    """Compare tape gradients with central finite differences for every differentiable stage."""
    results = run_gradcheck_suite(instances, seed)
    for r in results:
        click.echo(f"{r.name:<20} {r.worst:.3e} {'ok' if r.passed else 'FAILED'}")
    if not all(r.passed for r in results):
        ctx.exit(EXIT_CHECK_FAILED)


def main() -> None:
    try:
        cli(obj={})
    except BaseMatchDetException as e:
        logger.error("{kind}: {e}", kind=type(e).__name__, e=e)
        sys.exit(1)
