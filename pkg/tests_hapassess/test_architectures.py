"""
Tests for the architecture assessors.
"""

from decimal import Decimal

import pytest

from hapassess.architectures import (
    HapDirectArchitecture,
    IntegratedArchitecture,
    SatelliteArchitecture,
    assess,
    get_architecture,
)
from hapassess.dimensioning import BindingConstraint
from hapassess.economics import fleet_acquisition_cost
from hapassess.errors import (
    CapacityExceededError,
    InfeasibleArchitectureError,
    MissingParameterError,
    OutOfRangeError,
    UnknownReferenceError,
)
from hapassess.scenario import validate_scenario
from hapassess.types import AssessmentSettings, Money, OfferTier, SiteClass

from .conftest import architecture_entry


class TestRegistry:
    """Tests for architecture lookup."""

    @pytest.mark.parametrize("arch_id,cls", [
        ("sat", SatelliteArchitecture),
        ("hap-2a", HapDirectArchitecture),
        ("integrated", IntegratedArchitecture),
    ])
    def test_kinds(self, scenario, arch_id, cls):
        """Test that each kind maps to its assessor."""
        assert isinstance(get_architecture(scenario, arch_id), cls)

    def test_unknown_id_is_tagged(self, scenario):
        """Test that errors carry the architecture id."""
        with pytest.raises(UnknownReferenceError) as exc_info:
            assess(scenario, "nope")
        assert exc_info.value.architecture == "nope"
        assert str(exc_info.value).startswith("[UNKNOWN_REFERENCE] architecture 'nope':")

    def test_pure(self, scenario):
        """Test that repeated assessments are equal."""
        assert assess(scenario, "hap-2a") == assess(scenario, "hap-2a")


class TestSatellite:
    """Tests for the satellite architecture."""

    def test_costs(self, scenario, undiscounted):
        """Test costs and per-subscriber figures."""
        report = assess(scenario, "sat", undiscounted)
        assert report.subscribers == 18000
        assert report.costs.capex_total == Money(632000000)
        assert report.costs.opex_annual_total == Money(1134000000)
        assert report.per_subscriber_monthly == Money(5835)
        assert report.above_arpu
        assert report.feasible

    def test_spectrum(self, scenario):
        """Test the spectrum plan in the report."""
        report = assess(scenario, "sat")
        assert report.spectrum.required_bandwidth == Decimal("385.0")
        assert report.spectrum.transponder_count == 6
        assert report.notes[0] == "6 x 72 MHz transponders"
        assert report.link_availability.display() == "0.9996"

    def test_cash_flows(self, scenario, undiscounted):
        """Test the cost-only series and its NPV."""
        report = assess(scenario, "sat", undiscounted)
        assert report.cash_flow_basis == "cost"
        assert report.cash_flows.amounts[0] == Money(-1766000000)
        assert report.npv == Money(-11972000000)
        assert report.irr is None

    def test_discounting_reduces_cost(self, scenario, undiscounted):
        """Test that a positive rate shrinks the present cost."""
        discounted = assess(scenario, "sat")
        assert discounted.npv > assess(scenario, "sat", undiscounted).npv

    def test_horizon(self, scenario):
        """Test that the horizon sets the number of periods."""
        report = assess(scenario, "sat", AssessmentSettings(horizon_years=3))
        assert len(report.cash_flows) == 3

    def test_space_segment_lease(self, document):
        """Test the optional bandwidth lease."""
        architecture_entry(document, "sat")["annual_lease_per_mhz_eur"] = 1000
        report = assess(validate_scenario(document), "sat")
        lease = report.costs.by_site_class[SiteClass.SPACE_SEGMENT_LEASE]
        assert lease.opex_annual == Money.eur(385000)
        assert report.costs.opex_annual_total == Money(1134000000) + Money.eur(385000)

    def test_custom_cost_items(self, document):
        """Test that explicit cost items replace the catalog."""
        architecture_entry(document, "sat")["cost_items"] = [
            {"label": "terminal", "phase": "capex", "unit_cost_keur": 10,
             "quantity": 108, "site_class": "cell_site"},
        ]
        report = assess(validate_scenario(document), "sat")
        assert report.costs.capex_total == Money.keur(1080)
        assert report.costs.opex_annual_total == Money(0)


class TestHapDirect:
    """Tests for MNO-operated platforms."""

    def test_solar_plane(self, scenario):
        """Test one plane at 99%."""
        report = assess(scenario, "hap-2a")
        assert report.platform_count == 1
        assert report.costs.capex_total == Money(470000000)
        assert report.costs.opex_annual_total == Money(110000000)
        assert report.per_subscriber_monthly == Money(944)
        assert report.costs.by_site_class[SiteClass.PLATFORM].capex == Money.meur(4)

    def test_airship(self, scenario):
        """Test one airship at 99.9% with an unknown gateway."""
        report = assess(scenario, "hap-2b")
        assert report.costs.capex_total == Money(3090000000)
        assert report.costs.opex_annual_total == Money(410000000)
        assert report.per_subscriber_monthly == Money(4759)
        assert "gateway capacity unknown" in report.notes
        assert report.feasibility.gateway_ok is None

    def test_forced_single_plane_is_infeasible(self, scenario):
        """Test that one plane cannot carry the demand at 99.9%."""
        with pytest.raises(InfeasibleArchitectureError) as exc_info:
            assess(scenario, "hap-plane-999")
        feasibility = exc_info.value.feasibility
        assert feasibility.binding_constraint is BindingConstraint.FRONTHAUL
        assert feasibility.platforms_required == 3
        assert exc_info.value.exit_code == 3
        assert exc_info.value.architecture == "hap-plane-999"

    def test_fleet_sized_automatically(self, scenario):
        """Test that the fleet grows to the required size with learning."""
        report = assess(scenario, "hap-plane-fleet")
        assert report.platform_count == 3
        expected = fleet_acquisition_cost(Money.meur(4), 3, "0.8") + Money.meur("0.7")
        assert report.costs.capex_total == expected
        assert report.costs.opex_annual_total == Money(310000000)
        assert report.notes[0] == "3 x unmanned_solar_plane at availability 0.999"

    def test_development_cost(self, document):
        """Test that development cost is added on request."""
        architecture_entry(document, "hap-2a")["include_development_cost"] = True
        report = assess(validate_scenario(document), "hap-2a")
        assert report.costs.capex_total == Money.meur("54.7")
        assert "includes 50.0 M€ development cost" in report.notes


class TestIntegrated:
    """Tests for wholesale HAP backhaul."""

    def test_mno_costs(self, scenario):
        """Test the MNO's view of buying aerial links."""
        report = assess(scenario, "integrated")
        assert report.costs.capex_total == Money.meur("0.7")
        assert report.costs.by_site_class[SiteClass.BACKBONE_FEE].opex_annual == Money.eur(324000)
        assert report.per_subscriber_monthly == Money(215)
        assert report.above_arpu is False

    def test_sellable_links(self, scenario):
        """Test the link capacity of one plane."""
        report = assess(scenario, "integrated")
        assert report.sellable_links == 576
        assert report.notes[0] == "576 sellable links at 4.0:1 contention"

    def test_forecast(self, scenario):
        """Test the forecast carried in the report."""
        report = assess(scenario, "integrated")
        assert len(report.forecast) == 10
        assert report.forecast[-1].total_links == 576
        assert report.forecast[-1].utilization_percent == Decimal("100.0")

    def test_operator_cash_flows(self, scenario, undiscounted):
        """Test the operator's undiscounted result."""
        report = assess(scenario, "integrated", undiscounted)
        assert report.cash_flow_basis == "operator"
        assert report.cash_flows.amounts[0] == Money(367200000 - 100000000 - 400000000)
        assert report.npv == Money(3583600000)
        assert report.irr is not None and report.irr > 0

    def test_development_cost_turns_npv_negative(self, document, undiscounted):
        """Test the operator NPV with platform development included."""
        architecture_entry(document, "integrated")["include_development_cost"] = True
        report = assess(validate_scenario(document), "integrated", undiscounted)
        assert report.npv == Money(-1416400000)

    def test_delivered_availability(self, scenario):
        """Test per-offer availability."""
        report = assess(scenario, "integrated")
        shown = {item.tier: item.availability.display() for item in report.delivered_availability}
        assert shown[OfferTier.AERIAL_ONLY] == "0.98901"
        assert shown[OfferTier.AERIAL_WITH_FAILOVER] == "0.989999"

    def test_capacity_exceeded(self, document):
        """Test that doubled demand overflows the platform in year 0."""
        entry = architecture_entry(document, "integrated")
        entry["demand"] = {"years": [{"aerial": 384, "aerial_failover": 172, "complete": 172}]}
        scenario = validate_scenario(document)
        with pytest.raises(CapacityExceededError) as exc_info:
            assess(scenario, "integrated", AssessmentSettings(horizon_years=1))
        assert exc_info.value.year == 0

    def test_horizon_beyond_demand(self, scenario):
        """Test that the horizon cannot outrun the demand schedule."""
        with pytest.raises(OutOfRangeError):
            assess(scenario, "integrated", AssessmentSettings(horizon_years=12))

    def test_feasibility_needs_aerial_component(self, document):
        """Test that relabelled components cannot skip the availability derating."""
        entry = architecture_entry(document, "integrated")
        entry["component_availability"] = {"air": "0.999", "mno_backhaul": "0.999", "operator_backhaul": "0.999"}
        entry["tier_topologies"] = {tier.value: {"kind": "leaf", "label": "air"} for tier in OfferTier}
        scenario = validate_scenario(document)
        with pytest.raises(MissingParameterError) as exc_info:
            assess(scenario, "integrated")
        assert exc_info.value.parameter == "aerial"
