"""
Default catalogs.

Published platform, cost, offer and demand parameters of the rural
backhaul case study, kept as module-level registries. Scenario documents
fall back to these entries for anything they omit.
"""

from decimal import Decimal

from .errors import UnknownReferenceError
from .scenario import CostItem, DemandSchedule, PlatformSpec, WholesaleOffer
from .types import Availability, CostPhase, Money, OfferTier, PlatformKind, SiteClass

# Platform Registry
PLATFORMS: dict[str, PlatformSpec] = {
    "unmanned_solar_plane": PlatformSpec(
        kind=PlatformKind.UNMANNED_SOLAR_PLANE,
        layout_cells=19,
        redundancy_fraction="0.05",
        covered_area_km2="2734",
        per_cell_clear_air_mbps=120,
        derating=[
            {"availability": "0.99", "fronthaul_mbps": 1440},
            {"availability": "0.999", "fronthaul_mbps": 360},
        ],
        gateway_capacity_mbps=960,
        development_cost_meur=50,
        capex_per_unit_meur=4,
        opex_per_unit_year_meur=1,
    ),
    # Gateway capacity of the airship is not published.
    "unmanned_airship": PlatformSpec(
        kind=PlatformKind.UNMANNED_AIRSHIP,
        layout_cells=121,
        redundancy_fraction="0.20",
        covered_area_km2="2827",
        per_cell_clear_air_mbps=120,
        derating=[
            {"availability": "0.99", "fronthaul_mbps": 7760},
            {"availability": "0.999", "fronthaul_mbps": 1940},
        ],
        development_cost_meur=225,
        capex_per_unit_meur=30,
        opex_per_unit_year_meur=4,
    ),
}

# Non-HAP ground segment of the MNO's own fleet: (capex, yearly opex) in M€.
GROUND_SEGMENT: dict[PlatformKind, tuple[Money, Money]] = {
    PlatformKind.UNMANNED_SOLAR_PLANE: (Money.meur("0.7"), Money.meur("0.1")),
    PlatformKind.UNMANNED_AIRSHIP: (Money.meur("0.9"), Money.meur("0.1")),
}

# Satellite backhaul: per cell site and per aggregation site, in k€.
CELL_SITE_CAPEX: dict[str, Decimal] = {
    "cell site antenna (3.80 m)": Decimal(17),
    "frequency transposition": Decimal(17),
    "amplifier and modem": Decimal(16),
}
AGGREGATION_SITE_CAPEX: dict[str, Decimal] = {
    "aggregation antenna (11 m)": Decimal(430),
    "aggregation site remainder": Decimal(490),
}
CELL_SITE_OPEX_KEUR = Decimal(105)

WHOLESALE_OFFERS: tuple[WholesaleOffer, ...] = (
    WholesaleOffer(id="aerial", link_rate_mbps=10, tier=OfferTier.AERIAL_ONLY, monthly_price_eur=250),
    WholesaleOffer(id="aerial_failover", link_rate_mbps=10, tier=OfferTier.AERIAL_WITH_FAILOVER, monthly_price_eur=1000),
    WholesaleOffer(id="complete", link_rate_mbps=10, tier=OfferTier.COMPLETE_HIGH_AVAILABILITY, monthly_price_eur=2000),
)

# Yearly link demand printed for years 0, 3, 6 and 9.
TABLE_V_ANCHORS: dict[int, dict[str, int]] = {
    0: {"aerial": 192, "aerial_failover": 86, "complete": 86},
    3: {"aerial": 164, "aerial_failover": 172, "complete": 86},
    6: {"aerial": 148, "aerial_failover": 260, "complete": 86},
    9: {"aerial": 230, "aerial_failover": 260, "complete": 86},
}

COMPONENT_AVAILABILITY: dict[str, Availability] = {
    "aerial": Availability.of("0.99"),
    "mno_backhaul": Availability.of("0.999"),
    "operator_backhaul": Availability.of("0.999"),
}


def satellite_cost_items(site_count: int) -> tuple[CostItem, ...]:
    """
    Satellite backhaul cost catalog for ``site_count`` cell sites and one aggregation site.

    Example:
        >>> from hapassess.economics import rollup
        >>> rollup(satellite_cost_items(108)).capex_total
        Money(cents=632000000)
    """
    items = [
        CostItem(label=label, phase=CostPhase.CAPEX, unit_cost_keur=cost,
                 quantity=site_count, site_class=SiteClass.CELL_SITE)
        for label, cost in CELL_SITE_CAPEX.items()
    ]
    items += [
        CostItem(label=label, phase=CostPhase.CAPEX, unit_cost_keur=cost,
                 quantity=1, site_class=SiteClass.AGGREGATION_SITE)
        for label, cost in AGGREGATION_SITE_CAPEX.items()
    ]
    items.append(
        CostItem(label="cell site operation", phase=CostPhase.OPEX_ANNUAL,
                 unit_cost_keur=CELL_SITE_OPEX_KEUR, quantity=site_count,
                 site_class=SiteClass.CELL_SITE)
    )
    return tuple(items)


def table_v_demand() -> DemandSchedule:
    """The ten-year wholesale demand, linearly interpolated between the published years."""
    return DemandSchedule.from_anchors(TABLE_V_ANCHORS)


def get_platform(platform_id: str) -> PlatformSpec:
    """Look up a catalog platform by id."""
    try:
        return PLATFORMS[platform_id]
    except KeyError:
        raise UnknownReferenceError("platform", platform_id, PLATFORMS) from None
