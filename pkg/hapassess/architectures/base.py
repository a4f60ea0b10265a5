"""
Architecture base class and registry.

Defines the interface every backhaul architecture implements and the
report they all produce.
"""

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from decimal import Decimal
from typing import Optional, Union

from ..dimensioning import FeasibilityReport, SpectrumPlan, scenario_demand, subscribers
from ..economics import CashFlowSeries, CostRollup, ForecastRow, per_subscriber_monthly
from ..errors import HapAssessError, UnknownReferenceError
from ..scenario import HapDirectConfig, IntegratedConfig, SatelliteConfig, Scenario
from ..types import AssessmentSettings, Availability, DataRate, Money, OfferTier

logger = logging.getLogger(__name__)

ArchitectureConfigType = Union[SatelliteConfig, HapDirectConfig, IntegratedConfig]


@dataclass(frozen=True)
class OfferAvailability:
    """Availability a wholesale customer of one offer gets."""
    offer_id: str
    tier: OfferTier
    availability: Availability
    downtime_hours: Decimal


@dataclass(frozen=True)
class AssessmentReport:
    """
    End-to-end assessment of one architecture on one scenario.

    ``costs`` and ``per_subscriber_monthly`` are the MNO's view. The
    integrated architecture also carries the HAP operator's costs,
    forecast and cash flows.
    """
    architecture_id: str
    kind: str
    title: str
    subscribers: int
    demand: DataRate
    costs: CostRollup
    per_subscriber_monthly: Money
    arpu_monthly: Money
    cash_flow_basis: str
    cash_flows: CashFlowSeries
    discount_rate: Decimal
    npv: Money
    irr: Optional[Decimal] = None
    feasibility: Optional[FeasibilityReport] = None
    spectrum: Optional[SpectrumPlan] = None
    link_availability: Optional[Availability] = None
    platform_count: Optional[int] = None
    sellable_links: Optional[int] = None
    forecast: tuple[ForecastRow, ...] = ()
    operator_costs: Optional[CostRollup] = None
    delivered_availability: tuple[OfferAvailability, ...] = ()
    notes: tuple[str, ...] = ()

    @property
    def above_arpu(self) -> bool:
        return self.per_subscriber_monthly > self.arpu_monthly

    @property
    def feasible(self) -> bool:
        return self.feasibility is None or self.feasibility.feasible


class BaseArchitecture(ABC):
    """
    Abstract base class for backhaul architectures.

    Each architecture turns a validated scenario and its own config
    into an AssessmentReport.
    """

    def __init__(self, scenario: Scenario, config: ArchitectureConfigType):
        self.scenario = scenario
        self.config = config
        self.params = scenario.params

    @abstractmethod
    def assess(self, settings: AssessmentSettings) -> AssessmentReport:
        """Run dimensioning, costing and cash-flow evaluation."""

    @property
    def subscribers(self) -> int:
        return subscribers(self.params.service_area, self.params.penetration)

    @property
    def demand(self) -> DataRate:
        return scenario_demand(self.params)

    def per_subscriber(self, costs: CostRollup) -> Money:
        return per_subscriber_monthly(
            costs.capex_total, costs.opex_annual_total, self.params.amortization_months, self.subscribers,
        )


def get_architecture(scenario: Scenario, arch_id: str) -> BaseArchitecture:
    """
    Get an architecture instance for one of the scenario's architecture ids.

    Args:
        scenario: A validated scenario
        arch_id: Id of an entry of ``scenario.architectures``

    Returns:
        Configured architecture instance

    Raises:
        UnknownReferenceError: No architecture with that id
    """
    config = scenario.architecture(arch_id)

    # Import the registry of concrete assessors
    from . import ARCHITECTURE_KINDS

    if config.kind not in ARCHITECTURE_KINDS:
        raise UnknownReferenceError("architecture kind", config.kind, ARCHITECTURE_KINDS)
    return ARCHITECTURE_KINDS[config.kind](scenario, config)


def assess(
    scenario: Scenario,
    arch_id: str,
    settings: Optional[AssessmentSettings] = None,
) -> AssessmentReport:
    """
    Assess one architecture of a scenario.

    Args:
        scenario: A validated scenario
        arch_id: Architecture id
        settings: Run settings (default: the scenario's own)

    Returns:
        The AssessmentReport, a pure function of the inputs

    Raises:
        HapAssessError: Any engine error, tagged with the architecture id
    """
    settings = settings or scenario.settings()
    try:
        architecture = get_architecture(scenario, arch_id)
        report = architecture.assess(settings)
    except HapAssessError as exc:
        raise exc.with_architecture(arch_id)
    logger.info("assessed '%s': capex %s, opex %s/yr, %s per subscriber",
                arch_id, report.costs.capex_total.label(), report.costs.opex_annual_total.label(),
                report.per_subscriber_monthly.label("eur", 2))
    return report
