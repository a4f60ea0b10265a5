"""
MNO-operated HAP architecture.

The mobile operator buys and runs its own platform fleet and backhauls
every cell site through it.
"""

import logging

from ..dimensioning import fleet_feasibility
from ..economics import CostRollup, cost_only_series, fleet_acquisition_cost, npv
from ..errors import InfeasibleArchitectureError
from ..scenario import HapDirectConfig
from ..types import ZERO, AssessmentSettings, SiteClass
from .base import AssessmentReport, BaseArchitecture

logger = logging.getLogger(__name__)


class HapDirectArchitecture(BaseArchitecture):
    """
    Architecture 2: a HAP fleet owned by the MNO.

    Without a forced ``platform_count`` the fleet is the smallest one that
    meets coverage and fronthaul at the configured availability. Platform
    CAPEX follows the learning curve across the fleet.
    """

    config: HapDirectConfig

    def assess(self, settings: AssessmentSettings) -> AssessmentReport:
        platform = self.scenario.platform(self.config.platform)
        availability = self.config.fronthaul_availability

        feasibility = fleet_feasibility(
            self.params, platform, availability,
            platform_count=self.config.platform_count or 1,
            require_gateway=self.config.require_gateway,
        )
        if self.config.platform_count is None and feasibility.platforms_required > 1:
            logger.info("'%s' needs %d platforms", self.config.id, feasibility.platforms_required)
            feasibility = fleet_feasibility(
                self.params, platform, availability,
                platform_count=feasibility.platforms_required,
                require_gateway=self.config.require_gateway,
            )
        if not feasibility.feasible:
            raise InfeasibleArchitectureError(feasibility)

        fleet = feasibility.platform_count
        platform_capex = fleet_acquisition_cost(platform.capex_per_unit, fleet, self.config.learning_rate)
        development = platform.development_cost if self.config.include_development_cost else ZERO
        costs = (
            CostRollup.single(SiteClass.PLATFORM, platform_capex + development, platform.opex_per_unit_year * fleet)
            + CostRollup.single(SiteClass.AGGREGATION_SITE, self.config.ground_capex, self.config.ground_opex_annual)
        )
        flows = cost_only_series(costs.capex_total, costs.opex_annual_total, settings.horizon_years)

        notes = [f"{fleet} x {platform.kind.value} at availability {availability.display()}"]
        if feasibility.gateway_ok is None:
            notes.append("gateway capacity unknown")
        if self.config.include_development_cost:
            notes.append(f"includes {development.label()} development cost")

        return AssessmentReport(
            architecture_id=self.config.id,
            kind=self.config.kind,
            title=self.config.title,
            subscribers=self.subscribers,
            demand=feasibility.demand,
            costs=costs,
            per_subscriber_monthly=self.per_subscriber(costs),
            arpu_monthly=self.params.arpu_monthly,
            cash_flow_basis="cost",
            cash_flows=flows,
            discount_rate=settings.discount_rate,
            npv=npv(flows, settings.discount_rate),
            feasibility=feasibility,
            platform_count=fleet,
            notes=tuple(notes),
        )
