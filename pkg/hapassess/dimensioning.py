"""
Capacity and coverage dimensioning.

Subscriber counts, backhaul demand, satellite spectrum, HAP cell and
fronthaul capacity (clear air and derated for an availability target),
fleet sizing and the wholesale links a platform can sell.
"""

import logging
from dataclasses import dataclass
from decimal import ROUND_CEILING, ROUND_FLOOR, Decimal
from enum import Enum
from typing import Optional

from .errors import InvalidArgumentError, MissingParameterError, OutOfRangeError
from .scenario import PlatformSpec, ScenarioParams
from .types import Area, Availability, DataRate, Number, exact_context, round_half_up, to_decimal

logger = logging.getLogger(__name__)

# Smallest bandwidth step of a spectrum plan, in MHz.
BANDWIDTH_STEP = Decimal("0.1")


@dataclass(frozen=True)
class SpectrumPlan:
    """
    Space segment needed to carry a backhaul demand.

    Attributes:
        required_bandwidth: MHz, one fractional digit
        transponder_count: Transponders to lease
        transponder_bandwidth: MHz per transponder
    """
    required_bandwidth: Decimal
    transponder_count: int
    transponder_bandwidth: Decimal

    @property
    def leased_bandwidth(self) -> Decimal:
        return self.transponder_count * self.transponder_bandwidth


class BindingConstraint(str, Enum):
    NONE = "none"
    COVERAGE = "coverage"
    FRONTHAUL = "fronthaul"
    GATEWAY = "gateway"


@dataclass(frozen=True)
class FeasibilityReport:
    """
    Whether a fleet of identical platforms can serve a scenario.

    The flags are evaluated at ``platform_count``; ``platforms_required`` is
    the smallest fleet meeting coverage and fronthaul. ``gateway_ok`` is
    None when the platform's gateway capacity is unknown.
    """
    coverage_ok: bool
    fronthaul_ok: bool
    gateway_ok: Optional[bool]
    platforms_required: int
    binding_constraint: BindingConstraint
    platform_count: int
    demand: DataRate
    derated_fronthaul: DataRate

    @property
    def feasible(self) -> bool:
        return self.coverage_ok and self.fronthaul_ok and self.gateway_ok is not False


def _ceil_div(numerator: int, denominator: int) -> int:
    return -(-numerator // denominator)


def subscribers(area: Area, penetration: Number) -> int:
    """
    Expected subscribers in a service area.

    Example:
        >>> subscribers(Area.of(1800), 10)
        18000
    """
    density = to_decimal(penetration)
    if density < 0:
        raise InvalidArgumentError(f"penetration must be non-negative, got {density}")
    with exact_context():
        return int(round_half_up(area.km2 * density))


def backhaul_demand(sites: int, uplink: DataRate, downlink: DataRate) -> DataRate:
    """Total busy-hour backhaul throughput of ``sites`` identical cell sites."""
    if sites < 1:
        raise InvalidArgumentError(f"site count must be at least 1, got {sites}")
    return (uplink + downlink) * sites


def scenario_demand(params: ScenarioParams) -> DataRate:
    return backhaul_demand(params.site_count, params.per_site_uplink, params.per_site_downlink)


def satellite_spectrum(demand: DataRate, efficiency: Number, transponder_bandwidth: Number) -> SpectrumPlan:
    """
    Bandwidth and transponders needed for ``demand`` at a spectral efficiency.

    The bandwidth is rounded half-up to 0.1 MHz; the transponder count is a
    ceiling, so the leased bandwidth always covers the requirement.

    Args:
        demand: Total backhaul throughput
        efficiency: Spectral efficiency in b/s/Hz
        transponder_bandwidth: MHz per transponder

    Example:
        >>> satellite_spectrum(DataRate.from_mbps(756), "1.9636", 72)
        SpectrumPlan(required_bandwidth=Decimal('385.0'), transponder_count=6, transponder_bandwidth=Decimal('72'))
    """
    eff = to_decimal(efficiency)
    bandwidth = to_decimal(transponder_bandwidth)
    if eff <= 0 or bandwidth <= 0:
        raise InvalidArgumentError("spectral efficiency and transponder bandwidth must be positive")
    if demand.kbps == 0:
        raise InvalidArgumentError("cannot plan spectrum for a zero demand")

    with exact_context():
        required = max(round_half_up(demand.mbps / eff, 1), BANDWIDTH_STEP)
        count = int((required / bandwidth).to_integral_value(rounding=ROUND_CEILING))
    logger.debug("spectrum for %s Mb/s at %s b/s/Hz: %s MHz, %d transponder(s)",
                 demand.display(), eff, required, count)
    return SpectrumPlan(required_bandwidth=required, transponder_count=count, transponder_bandwidth=bandwidth)


def available_cells(layout_cells: int, redundancy_fraction: Number) -> int:
    """
    Cells left for traffic once the redundant share is set aside.

    Example:
        >>> available_cells(121, "0.20")
        97
    """
    redundancy = to_decimal(redundancy_fraction)
    if not Decimal(0) <= redundancy < Decimal(1):
        raise InvalidArgumentError(f"redundancy fraction must be in [0, 1), got {redundancy}")
    with exact_context():
        return int(round_half_up(layout_cells * (1 - redundancy)))


def clear_air_fronthaul(cells: int, per_cell: DataRate) -> DataRate:
    if cells < 0:
        raise InvalidArgumentError(f"cell count must be non-negative, got {cells}")
    return per_cell * cells


def platform_cells(platform: PlatformSpec) -> int:
    return available_cells(platform.layout_cells, platform.redundancy_fraction)


def derated_fronthaul(platform: PlatformSpec, availability: Optional[Availability]) -> DataRate:
    """
    Total fronthaul capacity of a platform at an availability target.

    ``None`` requests the clear-air capacity. Between two anchors of the
    derating table the capacity of the next higher anchor applies; below the
    lowest anchor that anchor applies.

    Raises:
        OutOfRangeError: ``availability`` is above the highest anchor
        MissingParameterError: The platform has no derating table
    """
    if availability is None:
        return clear_air_fronthaul(platform_cells(platform), platform.per_cell_clear_air)
    if not platform.derating:
        raise MissingParameterError("derating", f"{platform.kind.value} has no availability anchors")

    for anchor in platform.derating:
        if anchor.availability >= availability:
            return anchor.fronthaul
    highest = platform.derating[-1].availability
    raise OutOfRangeError(
        f"availability {availability} is above the highest derating anchor {highest} "
        f"of {platform.kind.value}"
    )


def throughput_density(fronthaul: DataRate, area: Area, contention: Number) -> Decimal:
    """
    Average throughput per km² under a contention ratio, 2 decimals.

    Example:
        >>> throughput_density(DataRate.from_mbps(2160), Area.of(2734), 4)
        Decimal('0.20')
    """
    ratio = to_decimal(contention)
    if ratio < 1:
        raise InvalidArgumentError(f"contention must be at least 1, got {ratio}")
    with exact_context():
        return round_half_up(fronthaul.mbps / (area.km2 * ratio), 2)


def fleet_feasibility(
    scenario: ScenarioParams,
    platform: PlatformSpec,
    availability: Optional[Availability],
    platform_count: int = 1,
    require_gateway: bool = False,
) -> FeasibilityReport:
    """
    Check coverage, fronthaul and gateway capacity of a platform fleet.

    Demand is shared evenly across the fleet; inter-platform links carry
    no overhead.

    Args:
        scenario: Service area and demand
        platform: Platform class of every fleet member
        availability: Target availability (None for clear air)
        platform_count: Fleet size the flags are evaluated at
        require_gateway: Treat an unknown gateway capacity as an error

    Raises:
        OutOfRangeError: The availability is above the derating table, or the
            platform has no capacity left at it
        MissingParameterError: ``require_gateway`` is set and the gateway
            capacity is unknown
    """
    if platform_count < 1:
        raise InvalidArgumentError(f"platform count must be at least 1, got {platform_count}")

    demand = scenario_demand(scenario)
    derated = derated_fronthaul(platform, availability)
    if derated.kbps == 0 and demand.kbps > 0:
        raise OutOfRangeError(f"{platform.kind.value} has no fronthaul capacity at availability {availability}")

    with exact_context():
        by_coverage = int((scenario.service_area.km2 / platform.covered_area.km2).to_integral_value(ROUND_CEILING))
    by_fronthaul = _ceil_div(demand.kbps, derated.kbps) if demand.kbps else 0
    required = max(1, by_coverage, by_fronthaul)

    coverage_ok = scenario.service_area.km2 <= platform_count * platform.covered_area.km2
    fronthaul_ok = demand.kbps <= platform_count * derated.kbps
    gateway_ok: Optional[bool]
    if platform.gateway_capacity is None:
        if require_gateway:
            raise MissingParameterError("gateway_capacity_mbps", f"not published for {platform.kind.value}")
        gateway_ok = None
        logger.warning("gateway capacity of %s is unknown; gateway check skipped", platform.kind.value)
    else:
        gateway_ok = demand.kbps <= platform_count * platform.gateway_capacity.kbps

    if not coverage_ok:
        binding = BindingConstraint.COVERAGE
    elif not fronthaul_ok:
        binding = BindingConstraint.FRONTHAUL
    elif gateway_ok is False:
        binding = BindingConstraint.GATEWAY
    else:
        binding = BindingConstraint.NONE

    logger.debug(
        "%s x%d at %s: demand %s Mb/s, capacity %s Mb/s, required %d, binding %s",
        platform.kind.value, platform_count, availability, demand.display(),
        derated.display(), required, binding.value,
    )
    return FeasibilityReport(
        coverage_ok=coverage_ok,
        fronthaul_ok=fronthaul_ok,
        gateway_ok=gateway_ok,
        platforms_required=required,
        binding_constraint=binding,
        platform_count=platform_count,
        demand=demand,
        derated_fronthaul=derated,
    )


def sellable_links(cells: int, cell_rate: DataRate, contention: Number, link_rate: DataRate) -> int:
    """
    Wholesale links of ``link_rate`` a platform can sell under contention.

    Example:
        >>> sellable_links(18, DataRate.from_mbps(80), 4, DataRate.from_mbps(10))
        576
    """
    ratio = to_decimal(contention)
    if ratio < 1:
        raise InvalidArgumentError(f"contention must be at least 1, got {ratio}")
    if link_rate.kbps <= 0:
        raise InvalidArgumentError("link rate must be positive")
    if cells < 0:
        raise InvalidArgumentError(f"cell count must be non-negative, got {cells}")
    with exact_context():
        links = (cells * cell_rate.kbps * ratio / link_rate.kbps).to_integral_value(ROUND_FLOOR)
    return int(links)
