"""
Integrated terrestrial, aerial and satellite architecture.

A HAP operator runs the platform and sells wholesale backhaul links to
MNOs. The report gives the MNO's cost of buying links next to the
operator's wholesale forecast and cash flows.
"""

import logging
from decimal import Decimal
from typing import Optional

from ..dimensioning import fleet_feasibility, platform_cells, sellable_links
from ..economics import CostRollup, forecast, irr, npv, operator_series
from ..errors import InfeasibleArchitectureError, MissingParameterError, NoRootInRangeError, NoSignChangeError
from ..reliability import downtime_per_year, offer_delivered_availability
from ..scenario import IntegratedConfig, WholesaleOffer
from ..types import ZERO, AssessmentSettings, SiteClass
from .base import AssessmentReport, BaseArchitecture, OfferAvailability

logger = logging.getLogger(__name__)


class IntegratedArchitecture(BaseArchitecture):
    """Architecture 3: wholesale backhaul links from a HAP operator."""

    config: IntegratedConfig

    @property
    def offers(self) -> tuple[WholesaleOffer, ...]:
        return self.config.offers or ()

    def mno_costs(self) -> CostRollup:
        """The MNO buys one link per cell site plus its own ground equipment."""
        offer = next(o for o in self.offers if o.id == self.config.mno_offer)
        links = self.params.site_count if self.config.mno_link_count is None else self.config.mno_link_count
        return (
            CostRollup.single(SiteClass.CELL_SITE, capex=self.config.mno_ground_capex)
            + CostRollup.single(SiteClass.BACKBONE_FEE, opex_annual=offer.monthly_price * (links * 12))
        )

    def sellable(self) -> int:
        platform = self.scenario.platform(self.config.platform)
        return sellable_links(
            platform_cells(platform),
            self.config.cell_rate_at_class,
            self.config.contention_ratio,
            self.offers[0].link_rate,
        )

    def delivered_availability(self) -> tuple[OfferAvailability, ...]:
        result = []
        for offer in self.offers:
            availability = offer_delivered_availability(
                offer.tier, self.config.component_availability, self.config.tier_topologies,
            )
            result.append(OfferAvailability(offer.id, offer.tier, availability, downtime_per_year(availability)))
        return tuple(result)

    def assess(self, settings: AssessmentSettings) -> AssessmentReport:
        platform = self.scenario.platform(self.config.platform)
        aerial = self.config.component_availability.get("aerial")
        if aerial is None:
            raise MissingParameterError("aerial", "the fleet is dimensioned at the aerial link availability")
        feasibility = fleet_feasibility(self.params, platform, aerial)
        if not feasibility.feasible:
            raise InfeasibleArchitectureError(feasibility)

        sellable = self.sellable()
        rows = forecast(self.config.demand, self.offers, sellable, settings.horizon_years)

        development = platform.development_cost if self.config.include_development_cost else ZERO
        operator_costs = CostRollup.single(
            SiteClass.PLATFORM, platform.capex_per_unit + development, platform.opex_per_unit_year,
        )
        flows = operator_series(
            [row.income_annual for row in rows], operator_costs.opex_annual_total, operator_costs.capex_total,
        )
        rate: Optional[Decimal]
        notes = [f"{sellable} sellable links at {self.config.contention_ratio}:1 contention"]
        try:
            rate = irr(flows)
        except (NoSignChangeError, NoRootInRangeError) as exc:
            rate = None
            notes.append(f"operator IRR undefined: {exc.message}")

        costs = self.mno_costs()
        logger.debug("'%s': operator npv %s over %d years", self.config.id,
                     npv(flows, settings.discount_rate).label(), len(rows))
        return AssessmentReport(
            architecture_id=self.config.id,
            kind=self.config.kind,
            title=self.config.title,
            subscribers=self.subscribers,
            demand=feasibility.demand,
            costs=costs,
            per_subscriber_monthly=self.per_subscriber(costs),
            arpu_monthly=self.params.arpu_monthly,
            cash_flow_basis="operator",
            cash_flows=flows,
            discount_rate=settings.discount_rate,
            npv=npv(flows, settings.discount_rate),
            irr=rate,
            feasibility=feasibility,
            platform_count=1,
            sellable_links=sellable,
            forecast=tuple(rows),
            operator_costs=operator_costs,
            delivered_availability=self.delivered_availability(),
            notes=tuple(notes),
        )
