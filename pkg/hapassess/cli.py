"""
Command-line driver.

Exit codes: 0 success, 1 unreadable input or output, 2 invalid scenario
or arguments, 3 infeasible architecture or exceeded capacity. Reports go
to stdout or ``--out``; diagnostics go to stderr.
"""

import functools
import json
import logging
import sys
from datetime import datetime, timezone
from decimal import Decimal
from pathlib import Path
from typing import Any, Callable, Optional, TypeVar

import click

from . import __version__
from .architectures import assess
from .errors import HapAssessError, InfeasibleArchitectureError, MissingParameterError
from .reliability import downtime_per_year, offer_path, path_availability, simulate_availability
from .report import (
    FORMATS,
    Tabular,
    compare,
    feasibility_record,
    flatten,
    forecast_record,
    money_record,
    platform_records,
    render,
    report_record,
)
from .scenario import IntegratedConfig, Scenario, bundled_scenario_path, load_scenario
from .types import AssessmentSettings, Availability, round_half_up, to_decimal

logger = logging.getLogger(__name__)

F = TypeVar("F", bound=Callable[..., Any])


class DecimalParam(click.ParamType):
    """A click parameter parsed as an exact Decimal."""

    name = "decimal"

    def convert(self, value: Any, param: Optional[click.Parameter], ctx: Optional[click.Context]) -> Decimal:
        try:
            return to_decimal(value)
        except ValueError:
            self.fail(f"{value!r} is not a decimal number", param, ctx)


DECIMAL = DecimalParam()


def _configure_logging(verbose: int) -> None:
    level = logging.WARNING if verbose == 0 else logging.INFO if verbose == 1 else logging.DEBUG
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr, force=True)


def scenario_options(func: F) -> F:
    """Options shared by every report command."""
    decorators = [
        click.option("--scenario", "scenario_path", type=click.Path(path_type=Path),
                     default=None, help="Scenario TOML file (default: the bundled case study)."),
        click.option("--format", "fmt", type=click.Choice(FORMATS), default="table", show_default=True,
                     help="Output format."),
        click.option("--out", type=click.Path(dir_okay=False, path_type=Path), default=None,
                     help="Write the report to this file instead of stdout."),
        click.option("--timestamp", is_flag=True, default=False,
                     help="Add generated_at to structured and tson output."),
    ]
    for decorator in reversed(decorators):
        func = decorator(func)
    return func


def handle_errors(func: F) -> F:
    """Map engine errors to their exit codes."""

    @functools.wraps(func)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        try:
            return func(*args, **kwargs)
        except InfeasibleArchitectureError as exc:
            click.echo(f"error: {exc}", err=True)
            click.echo(json.dumps(feasibility_record(exc.feasibility), sort_keys=True), err=True)
            sys.exit(exc.exit_code)
        except HapAssessError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(exc.exit_code)

    return wrapper  # type: ignore[return-value]


def _load(path: Optional[Path]) -> Scenario:
    return load_scenario(path if path is not None else bundled_scenario_path())


def _emit(text: str, out: Optional[Path]) -> None:
    if out is None:
        click.echo(text, nl=False)
        return
    try:
        out.write_text(text, encoding="utf-8")
    except OSError as exc:
        click.echo(f"error: [IO] cannot write '{out}': {exc.strerror or exc}", err=True)
        sys.exit(1)


def _timestamp(enabled: bool) -> Optional[datetime]:
    return datetime.now(timezone.utc).replace(microsecond=0) if enabled else None


def _integrated_id(scenario: Scenario, arch_id: Optional[str]) -> str:
    if arch_id is not None:
        return arch_id
    for arch in scenario.architectures:
        if isinstance(arch, IntegratedConfig):
            return arch.id
    raise MissingParameterError("architectures", "the scenario has no integrated architecture")


@click.group()
@click.version_option(__version__, prog_name="hapassess")
@click.option("-v", "--verbose", count=True, help="Log to stderr (-v info, -vv debug).")
def cli(verbose: int) -> None:
    """Techno-economic assessment of satellite and HAP rural backhaul."""
    _configure_logging(verbose)


@cli.command("assess")
@scenario_options
@click.option("--arch", "arch_id", required=True, help="Architecture id.")
@click.option("--years", type=click.IntRange(min=1), default=None, help="Cash-flow horizon in years.")
@click.option("--discount-rate", type=DECIMAL, default=None, help="Yearly discount rate for NPV.")
@handle_errors
def assess_command(scenario_path: Optional[Path], fmt: str, out: Optional[Path], timestamp: bool,
                   arch_id: str, years: Optional[int], discount_rate: Optional[Decimal]) -> None:
    """Assess one architecture."""
    scenario = _load(scenario_path)
    settings = _settings(scenario, horizon_years=years, discount_rate=discount_rate)
    record = report_record(assess(scenario, arch_id, settings))
    _emit(render(fmt, record, Tabular.from_pairs(flatten(record)), scenario, _timestamp(timestamp)), out)


@cli.command("compare")
@scenario_options
@click.option("--arch", "arch_ids", multiple=True, required=True, help="Architecture id (repeat).")
@click.option("--years", type=click.IntRange(min=1), default=None, help="Cash-flow horizon in years.")
@click.option("--discount-rate", type=DECIMAL, default=None, help="Yearly discount rate for NPV.")
@click.option("--workers", type=click.IntRange(min=1), default=None, help="Assess architectures in parallel.")
@handle_errors
def compare_command(scenario_path: Optional[Path], fmt: str, out: Optional[Path], timestamp: bool,
                    arch_ids: tuple[str, ...], years: Optional[int], discount_rate: Optional[Decimal],
                    workers: Optional[int]) -> None:
    """Compare architectures side by side."""
    if len(arch_ids) < 2:
        raise click.UsageError("compare needs at least two --arch options")
    scenario = _load(scenario_path)
    settings = _settings(scenario, horizon_years=years, discount_rate=discount_rate, workers=workers)
    table = compare(scenario, arch_ids, settings)
    records = table.records()
    body = {"arpu_monthly": money_record(table.arpu_monthly, "eur"), "rows": records}
    _emit(render(fmt, body, Tabular.from_records(records), scenario, _timestamp(timestamp)), out)


@cli.command("forecast")
@scenario_options
@click.option("--arch", "arch_id", default=None, help="Integrated architecture id (default: the first).")
@click.option("--years", type=click.IntRange(min=1), default=None, help="Years to forecast.")
@handle_errors
def forecast_command(scenario_path: Optional[Path], fmt: str, out: Optional[Path], timestamp: bool,
                     arch_id: Optional[str], years: Optional[int]) -> None:
    """Wholesale link demand, platform utilization and income per year."""
    scenario = _load(scenario_path)
    arch_id = _integrated_id(scenario, arch_id)
    report = assess(scenario, arch_id, _settings(scenario, horizon_years=years))
    records = [forecast_record(row) for row in report.forecast]
    body = {"architecture": arch_id, "sellable_links": report.sellable_links, "rows": records}
    _emit(render(fmt, body, Tabular.from_records(records), scenario, _timestamp(timestamp)), out)


@cli.command("platforms")
@scenario_options
@click.option("--availability", "target", type=DECIMAL, default=Decimal("0.999"), show_default=True,
              help="Availability the derated fronthaul column is looked up at.")
@handle_errors
def platforms_command(scenario_path: Optional[Path], fmt: str, out: Optional[Path], timestamp: bool,
                      target: Decimal) -> None:
    """Layout, capacity and cost of the scenario's platforms."""
    scenario = _load(scenario_path)
    try:
        availability = Availability.of(target)
    except ValueError as exc:
        raise click.BadParameter(str(exc), param_hint="--availability") from None
    records = platform_records(scenario, availability)
    body = {"availability": availability.display(), "rows": records}
    _emit(render(fmt, body, Tabular.from_records(records), scenario, _timestamp(timestamp)), out)


@cli.command("availability")
@scenario_options
@click.option("--arch", "arch_id", default=None, help="Integrated architecture id (default: the first).")
@click.option("--monte-carlo/--no-monte-carlo", default=False, help="Cross-check by simulation.")
@click.option("--seed", type=click.IntRange(min=0, max=2**64 - 1), default=None, help="Root seed (u64).")
@click.option("--trials", type=click.IntRange(min=1), default=None, help="Monte Carlo trials.")
@handle_errors
def availability_command(scenario_path: Optional[Path], fmt: str, out: Optional[Path], timestamp: bool,
                         arch_id: Optional[str], monte_carlo: bool, seed: Optional[int],
                         trials: Optional[int]) -> None:
    """Delivered availability of every wholesale offer."""
    scenario = _load(scenario_path)
    config = scenario.architecture(_integrated_id(scenario, arch_id))
    if not isinstance(config, IntegratedConfig):
        raise MissingParameterError("offers", f"architecture '{config.id}' sells no wholesale offers")
    settings = _settings(scenario, seed=seed, monte_carlo_trials=trials)

    records = []
    for offer in config.offers or ():
        model = offer_path(offer.tier, config.component_availability, config.tier_topologies)
        analytic = path_availability(model)
        record: dict[str, Any] = {
            "offer": offer.id,
            "tier": offer.tier.value,
            "availability": analytic.display(),
            "downtime_hours": f"{downtime_per_year(analytic):f}",
        }
        if monte_carlo:
            result = simulate_availability(model, settings.monte_carlo_trials, settings.seed, settings.workers)
            record["mc_estimate"] = f"{round_half_up(result.estimate, 6):f}"
            record["mc_half_width"] = f"{round_half_up(result.half_width, 6):f}"
            record["mc_agrees"] = result.agrees_with(analytic)
        records.append(record)

    body: dict[str, Any] = {"architecture": config.id, "rows": records}
    if monte_carlo:
        body["monte_carlo"] = {"trials": settings.monte_carlo_trials, "seed": settings.seed}
    _emit(render(fmt, body, Tabular.from_records(records), scenario, _timestamp(timestamp)), out)


@cli.command("validate")
@click.option("--scenario", "scenario_path", type=click.Path(path_type=Path), default=None,
              help="Scenario TOML file (default: the bundled case study).")
@handle_errors
def validate_command(scenario_path: Optional[Path]) -> None:
    """Validate a scenario and print its digest."""
    scenario = _load(scenario_path)
    click.echo(f"valid: {scenario.title or '(untitled)'}")
    click.echo(f"digest: {scenario.digest()}")
    for arch in scenario.architectures:
        click.echo(f"  {arch.id} ({arch.kind})")


def _settings(scenario: Scenario, **overrides: Any) -> AssessmentSettings:
    try:
        return scenario.settings().with_overrides(**overrides)
    except ValueError as exc:
        raise click.UsageError(str(exc)) from None


def main() -> None:
    cli(prog_name="hapassess")


if __name__ == "__main__":
    main()
