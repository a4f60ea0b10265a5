"""
Satellite backhaul architecture.

Every cell site gets its own VSAT terminal; traffic is collected at one
aggregation site over leased GEO transponders.
"""

from decimal import ROUND_CEILING, Decimal

from .. import catalog
from ..dimensioning import satellite_spectrum
from ..economics import cost_only_series, npv, rollup
from ..reliability import downtime_per_year
from ..scenario import CostItem, SatelliteConfig
from ..types import AssessmentSettings, CostPhase, SiteClass
from .base import AssessmentReport, BaseArchitecture


class SatelliteArchitecture(BaseArchitecture):
    """Architecture 1: per-site satellite links."""

    config: SatelliteConfig

    def cost_items(self, required_bandwidth_mhz: Decimal) -> tuple[CostItem, ...]:
        items = self.config.cost_catalog
        if items is None:
            items = catalog.satellite_cost_items(self.params.site_count)
        if self.config.annual_lease_per_mhz.cents > 0:
            leased_mhz = int(required_bandwidth_mhz.to_integral_value(ROUND_CEILING))
            items = items + (
                CostItem(
                    label="space segment lease",
                    phase=CostPhase.OPEX_ANNUAL,
                    unit_cost_keur=self.config.annual_lease_per_mhz,
                    quantity=leased_mhz,
                    site_class=SiteClass.SPACE_SEGMENT_LEASE,
                ),
            )
        return items

    def assess(self, settings: AssessmentSettings) -> AssessmentReport:
        demand = self.demand
        spectrum = satellite_spectrum(demand, self.config.spectral_efficiency, self.config.transponder_bandwidth)
        costs = rollup(self.cost_items(spectrum.required_bandwidth))
        flows = cost_only_series(costs.capex_total, costs.opex_annual_total, settings.horizon_years)

        link = self.config.link_availability
        notes = (
            f"{spectrum.transponder_count} x {spectrum.transponder_bandwidth} MHz transponders",
            f"link availability {link.display()} ({downtime_per_year(link)} h/yr downtime)",
        )
        return AssessmentReport(
            architecture_id=self.config.id,
            kind=self.config.kind,
            title=self.config.title,
            subscribers=self.subscribers,
            demand=demand,
            costs=costs,
            per_subscriber_monthly=self.per_subscriber(costs),
            arpu_monthly=self.params.arpu_monthly,
            cash_flow_basis="cost",
            cash_flows=flows,
            discount_rate=settings.discount_rate,
            npv=npv(flows, settings.discount_rate),
            spectrum=spectrum,
            link_availability=link,
            notes=notes,
        )
