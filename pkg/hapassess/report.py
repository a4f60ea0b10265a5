"""
Report records and output formats.

Reports become plain records (ints, strings, bools, None, lists, dicts)
that every format renders: a columnar text table for humans, comma
separated values, JSON ("structured") and TSON. Money is carried both
as exact cents and at display precision.
"""

import csv
import io
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from datetime import datetime
from decimal import Decimal
from typing import Any, Iterable, Mapping, Optional, Sequence

import tson

from . import __version__
from .architectures import AssessmentReport, assess
from .dimensioning import (
    FeasibilityReport,
    SpectrumPlan,
    clear_air_fronthaul,
    derated_fronthaul,
    platform_cells,
    throughput_density,
)
from .economics import CostRollup, ForecastRow
from .errors import HapAssessError
from .reliability import downtime_per_year
from .scenario import Scenario
from .types import AssessmentSettings, Availability, Money, plain_decimal, round_half_up

logger = logging.getLogger(__name__)

TOOL_NAME = "hapassess"
FORMATS = ("table", "structured", "csv", "tson")


def money_record(money: Money, unit: str = "meur") -> dict[str, Any]:
    """Exact cents next to the display value in ``unit``."""
    return {"cents": money.cents, unit: money.display(unit)}


def costs_record(costs: CostRollup) -> dict[str, Any]:
    return {
        "capex_total": money_record(costs.capex_total),
        "opex_annual": money_record(costs.opex_annual_total),
        "by_site_class": {
            site_class.value: {"capex_cents": totals.capex.cents, "opex_annual_cents": totals.opex_annual.cents}
            for site_class, totals in costs.by_site_class.items()
        },
    }


def spectrum_record(plan: SpectrumPlan) -> dict[str, Any]:
    return {
        "required_bandwidth_mhz": f"{plan.required_bandwidth:f}",
        "transponder_count": plan.transponder_count,
        "transponder_bandwidth_mhz": plain_decimal(plan.transponder_bandwidth),
    }


def feasibility_record(report: FeasibilityReport) -> dict[str, Any]:
    return {
        "coverage_ok": report.coverage_ok,
        "fronthaul_ok": report.fronthaul_ok,
        "gateway_ok": report.gateway_ok,
        "platforms_required": report.platforms_required,
        "platform_count": report.platform_count,
        "binding_constraint": report.binding_constraint.value,
        "derated_fronthaul_mbps": report.derated_fronthaul.display(),
    }


def forecast_record(row: ForecastRow) -> dict[str, Any]:
    """Flat record of one forecast year, one column per offer."""
    record: dict[str, Any] = {"year": row.year}
    record.update(row.links_by_offer)
    record["total_links"] = row.total_links
    record["utilization_percent"] = f"{row.utilization_percent:f}"
    record["income_cents"] = row.income_annual.cents
    record["income_meur"] = row.income_annual.display("meur")
    return record


def _availability_record(availability: Availability, downtime: Decimal) -> dict[str, Any]:
    return {"availability": availability.display(), "downtime_hours": f"{downtime:f}"}


def report_record(report: AssessmentReport) -> dict[str, Any]:
    """
    The nested record of an AssessmentReport.

    Optional sections (spectrum, feasibility, forecast, ...) appear only
    for architectures that produce them.
    """
    record: dict[str, Any] = {
        "architecture": report.architecture_id,
        "kind": report.kind,
        "title": report.title,
        "subscribers": report.subscribers,
        "demand_kbps": report.demand.kbps,
        "demand_mbps": report.demand.display(),
        "feasible": report.feasible,
    }
    if report.spectrum is not None:
        record["spectrum"] = spectrum_record(report.spectrum)
    if report.link_availability is not None:
        record["link_availability"] = _availability_record(
            report.link_availability, downtime_per_year(report.link_availability)
        )
    if report.feasibility is not None:
        record["feasibility"] = feasibility_record(report.feasibility)
    record["costs"] = costs_record(report.costs)
    record["per_subscriber_monthly"] = money_record(report.per_subscriber_monthly, "eur")
    record["arpu_monthly"] = money_record(report.arpu_monthly, "eur")
    record["above_arpu"] = report.above_arpu
    if report.operator_costs is not None:
        record["operator_costs"] = costs_record(report.operator_costs)
    if report.sellable_links is not None:
        record["sellable_links"] = report.sellable_links
    if report.forecast:
        record["forecast"] = [forecast_record(row) for row in report.forecast]
    if report.delivered_availability:
        record["delivered_availability"] = [
            {"offer": item.offer_id, "tier": item.tier.value,
             **_availability_record(item.availability, item.downtime_hours)}
            for item in report.delivered_availability
        ]
    record["cash_flows"] = {
        "basis": report.cash_flow_basis,
        "discount_rate": plain_decimal(report.discount_rate),
        "npv": money_record(report.npv),
        "irr": None if report.irr is None else f"{round_half_up(report.irr, 6):f}",
        "periods": [amount.cents for amount in report.cash_flows.amounts],
    }
    record["notes"] = list(report.notes)
    return record


@dataclass(frozen=True)
class ComparisonRow:
    """One architecture of a comparison; a failing architecture has no figures."""
    architecture: str
    capex_total: Optional[Money]
    opex_annual: Optional[Money]
    per_subscriber_monthly: Optional[Money]
    above_arpu: Optional[bool]
    feasible: bool
    notes: str

    @classmethod
    def from_report(cls, report: AssessmentReport) -> "ComparisonRow":
        return cls(
            architecture=report.architecture_id,
            capex_total=report.costs.capex_total,
            opex_annual=report.costs.opex_annual_total,
            per_subscriber_monthly=report.per_subscriber_monthly,
            above_arpu=report.above_arpu,
            feasible=report.feasible,
            notes="; ".join(report.notes),
        )

    @classmethod
    def from_error(cls, arch_id: str, error: HapAssessError) -> "ComparisonRow":
        return cls(arch_id, None, None, None, None, False, str(error))

    def record(self) -> dict[str, Any]:
        def cents(money: Optional[Money]) -> Optional[int]:
            return None if money is None else money.cents

        def shown(money: Optional[Money], unit: str) -> Optional[str]:
            return None if money is None else money.display(unit)

        return {
            "architecture": self.architecture,
            "capex_total_cents": cents(self.capex_total),
            "capex_total_meur": shown(self.capex_total, "meur"),
            "opex_annual_cents": cents(self.opex_annual),
            "opex_annual_meur": shown(self.opex_annual, "meur"),
            "per_subscriber_monthly_cents": cents(self.per_subscriber_monthly),
            "per_subscriber_monthly_eur": shown(self.per_subscriber_monthly, "eur"),
            "above_arpu": self.above_arpu,
            "feasible": self.feasible,
            "notes": self.notes,
        }


@dataclass(frozen=True)
class ComparisonTable:
    """One row per requested architecture, in request order."""
    rows: tuple[ComparisonRow, ...]
    arpu_monthly: Money

    def records(self) -> list[dict[str, Any]]:
        return [row.record() for row in self.rows]


def compare(
    scenario: Scenario,
    arch_ids: Sequence[str],
    settings: Optional[AssessmentSettings] = None,
) -> ComparisonTable:
    """
    Assess several architectures side by side.

    A failing architecture becomes a row with ``feasible = false`` and the
    error in ``notes``; it does not stop the comparison.
    """
    settings = settings or scenario.settings()

    def row(arch_id: str) -> ComparisonRow:
        try:
            return ComparisonRow.from_report(assess(scenario, arch_id, settings))
        except HapAssessError as exc:
            logger.warning("%s", exc)
            return ComparisonRow.from_error(arch_id, exc)

    if settings.workers > 1 and len(arch_ids) > 1:
        with ThreadPoolExecutor(max_workers=settings.workers) as pool:
            rows = tuple(pool.map(row, arch_ids))
    else:
        rows = tuple(row(arch_id) for arch_id in arch_ids)
    return ComparisonTable(rows=rows, arpu_monthly=scenario.params.arpu_monthly)


def platform_records(scenario: Scenario, availability: Availability) -> list[dict[str, Any]]:
    """Layout, capacity and cost of every scenario platform."""
    contention = scenario.settings().density_contention
    records = []
    for platform_id, platform in scenario.platforms.items():
        cells = platform_cells(platform)
        clear_air = clear_air_fronthaul(cells, platform.per_cell_clear_air)
        try:
            derated: Optional[str] = derated_fronthaul(platform, availability).display()
        except HapAssessError as exc:
            logger.warning("%s: %s", platform_id, exc)
            derated = None
        records.append({
            "platform": platform_id,
            "layout_cells": platform.layout_cells,
            "redundancy_fraction": f"{round_half_up(platform.redundancy_fraction, 2):f}",
            "available_cells": cells,
            "covered_area_km2": platform.covered_area.display(),
            "clear_air_fronthaul_mbps": clear_air.display(),
            "throughput_density_mbps_per_km2": f"{throughput_density(clear_air, platform.covered_area, contention):f}",
            "gateway_capacity_mbps": None if platform.gateway_capacity is None else platform.gateway_capacity.display(),
            "development_cost_meur": platform.development_cost.display("meur"),
            "capex_per_unit_meur": platform.capex_per_unit.display("meur"),
            "opex_per_unit_year_meur": platform.opex_per_unit_year.display("meur"),
            "derated_fronthaul_mbps": derated,
        })
    return records


def envelope(body: Any, scenario: Scenario, timestamp: Optional[datetime] = None) -> dict[str, Any]:
    """
    Wrap a body with the tool version and the scenario digest.

    ``generated_at`` is present only when a timestamp is given, so the
    default output is byte-identical across runs.
    """
    document: dict[str, Any] = {
        "tool": {"name": TOOL_NAME, "version": __version__},
        "scenario_digest": scenario.digest(),
    }
    if timestamp is not None:
        document["generated_at"] = timestamp.isoformat()
    document["body"] = body
    return document


def flatten(record: Mapping[str, Any], prefix: str = "") -> list[tuple[str, Any]]:
    """Dotted ``(key, value)`` pairs of a nested record, in insertion order."""
    pairs: list[tuple[str, Any]] = []
    for key, value in record.items():
        name = f"{prefix}{key}"
        if isinstance(value, Mapping):
            pairs.extend(flatten(value, f"{name}."))
        elif isinstance(value, list):
            for index, item in enumerate(value):
                if isinstance(item, Mapping):
                    pairs.extend(flatten(item, f"{name}.{index}."))
                else:
                    pairs.append((f"{name}.{index}", item))
        else:
            pairs.append((name, value))
    return pairs


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)


@dataclass(frozen=True)
class Tabular:
    """Rows of text cells under a header."""
    columns: tuple[str, ...]
    rows: tuple[tuple[str, ...], ...]

    @classmethod
    def from_records(cls, records: Sequence[Mapping[str, Any]]) -> "Tabular":
        columns: list[str] = []
        for record in records:
            columns.extend(key for key in record if key not in columns)
        rows = tuple(tuple(_cell(record.get(column)) for column in columns) for record in records)
        return cls(tuple(columns), rows)

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[str, Any]]) -> "Tabular":
        return cls(("metric", "value"), tuple((key, _cell(value)) for key, value in pairs))


def render_table(tabular: Tabular) -> str:
    """Columnar plain text; numbers keep their declared precision."""
    widths = [len(column) for column in tabular.columns]
    for row in tabular.rows:
        widths = [max(width, len(cell)) for width, cell in zip(widths, row)]

    def line(cells: Sequence[str]) -> str:
        return "  ".join(cell.ljust(width) for cell, width in zip(cells, widths)).rstrip()

    lines = [line(tabular.columns), "  ".join("-" * width for width in widths)]
    lines.extend(line(row) for row in tabular.rows)
    return "\n".join(lines) + "\n"


def render_csv(tabular: Tabular) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(tabular.columns)
    writer.writerows(tabular.rows)
    return buffer.getvalue()


def format_data(data: Any, optimize: bool = False) -> str:
    """
    Format a machine document as TSON (if optimize) or indented JSON.

    Args:
        data: Any JSON-serializable data
        optimize: If True, use TSON format

    Returns:
        Formatted string, newline-terminated
    """
    if optimize:
        return tson.dumps(data) + "\n"
    return json.dumps(data, indent=2, ensure_ascii=False) + "\n"


def render(
    fmt: str,
    body: Any,
    tabular: Tabular,
    scenario: Scenario,
    timestamp: Optional[datetime] = None,
) -> str:
    """Render one command result in ``fmt``."""
    if fmt == "table":
        return render_table(tabular)
    if fmt == "csv":
        return render_csv(tabular)
    if fmt in ("structured", "tson"):
        return format_data(envelope(body, scenario, timestamp), optimize=fmt == "tson")
    raise ValueError(f"unknown format {fmt!r}, expected one of {', '.join(FORMATS)}")
