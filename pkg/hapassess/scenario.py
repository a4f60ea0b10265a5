"""
Scenario documents: models, validation and loading.

A scenario is a TOML document with units in every key name. Validation
fills defaults from the catalog, cross-checks references and returns an
immutable :class:`Scenario`. ``validate_scenario(s.to_document())`` returns
a value equal to ``s``.
"""

import copy
import hashlib
import json
import logging
import sys
from decimal import Decimal
from fractions import Fraction
from pathlib import Path
from typing import Annotated, Any, Literal, Mapping, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .errors import (
    ScenarioInputError,
    ScenarioValidationError,
    UnknownReferenceError,
    from_validation_error,
)
from .reliability import PathModel
from .types import (
    AreaKm2,
    AssessmentSettings,
    Availability,
    AvailabilityValue,
    CostEur,
    CostKeur,
    CostMeur,
    CostPhase,
    DataRate,
    DecimalValue,
    Money,
    OfferTier,
    PlatformKind,
    RateMbps,
    SiteClass,
    round_half_up,
)

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

logger = logging.getLogger(__name__)


class _Model(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid", populate_by_name=True)


class ScenarioParams(_Model):
    """Service area, demand and revenue assumptions of a scenario."""
    service_area: AreaKm2 = Field(alias="service_area_km2")
    penetration: DecimalValue = Field(alias="penetration_per_km2")
    site_count: int = Field(ge=1)
    per_site_uplink: RateMbps = Field(alias="per_site_uplink_mbps")
    per_site_downlink: RateMbps = Field(alias="per_site_downlink_mbps")
    total_backhaul_demand: Optional[RateMbps] = Field(None, alias="total_backhaul_demand_mbps")
    arpu_monthly: CostEur = Field(alias="arpu_monthly_eur")
    amortization_months: int = Field(60, ge=1)

    @field_validator("penetration")
    @classmethod
    def _positive_penetration(cls, value: Decimal) -> Decimal:
        if value <= 0:
            raise ValueError("penetration must be positive")
        return value

    @property
    def per_site_demand(self) -> DataRate:
        return self.per_site_uplink + self.per_site_downlink

    @model_validator(mode="after")
    def _declared_demand_matches(self) -> "ScenarioParams":
        if self.total_backhaul_demand is None:
            return self
        computed = self.per_site_demand * self.site_count
        if computed != self.total_backhaul_demand:
            raise ValueError(
                f"total_backhaul_demand_mbps {self.total_backhaul_demand.display()} does not match "
                f"site_count × (uplink + downlink) = {self.site_count} × "
                f"{self.per_site_demand.display()} = {computed.display()}"
            )
        return self


class DeratingAnchor(_Model):
    """Total fronthaul capacity a platform keeps at an availability target."""
    availability: AvailabilityValue
    fronthaul: RateMbps = Field(alias="fronthaul_mbps")


class PlatformSpec(_Model):
    """Layout, capacity and cost parameters of one HAP class."""
    kind: PlatformKind
    layout_cells: int = Field(ge=1)
    redundancy_fraction: DecimalValue
    covered_area: AreaKm2 = Field(alias="covered_area_km2")
    per_cell_clear_air: RateMbps = Field(DataRate.from_mbps(120), alias="per_cell_clear_air_mbps")
    derating: tuple[DeratingAnchor, ...] = ()
    gateway_capacity: Optional[RateMbps] = Field(None, alias="gateway_capacity_mbps")
    development_cost: CostMeur = Field(alias="development_cost_meur")
    capex_per_unit: CostMeur = Field(alias="capex_per_unit_meur")
    opex_per_unit_year: CostMeur = Field(alias="opex_per_unit_year_meur")

    @field_validator("redundancy_fraction")
    @classmethod
    def _redundancy_range(cls, value: Decimal) -> Decimal:
        if not Decimal(0) <= value < Decimal(1):
            raise ValueError("redundancy_fraction must be in [0, 1)")
        return value

    @model_validator(mode="after")
    def _derating_is_monotone(self) -> "PlatformSpec":
        ceiling = self.per_cell_clear_air * self.layout_cells
        previous: Optional[DeratingAnchor] = None
        for anchor in self.derating:
            if anchor.fronthaul > ceiling:
                raise ValueError(
                    f"derating capacity {anchor.fronthaul.display()} Mb/s exceeds "
                    f"layout_cells × per_cell_clear_air = {ceiling.display()} Mb/s"
                )
            if previous is not None:
                if anchor.availability <= previous.availability:
                    raise ValueError("derating anchors must be sorted by strictly increasing availability")
                if anchor.fronthaul > previous.fronthaul:
                    raise ValueError("derating capacity must not increase with availability")
            previous = anchor
        return self

    def derating_table(self) -> dict[Any, DataRate]:
        """Ordered map availability → total fronthaul capacity."""
        return {anchor.availability: anchor.fronthaul for anchor in self.derating}


class CostItem(_Model):
    """One line of a cost catalog."""
    label: str
    phase: CostPhase
    unit_cost: CostKeur = Field(alias="unit_cost_keur")
    quantity: int = Field(ge=0)
    site_class: SiteClass

    @property
    def extended(self) -> Money:
        return self.unit_cost * self.quantity


class WholesaleOffer(_Model):
    """A backhaul link product the HAP operator sells to MNOs."""
    id: str
    link_rate: RateMbps = Field(DataRate.from_mbps(10), alias="link_rate_mbps")
    tier: OfferTier
    monthly_price: CostEur = Field(alias="monthly_price_eur")

    @model_validator(mode="after")
    def _positive(self) -> "WholesaleOffer":
        if self.monthly_price.cents <= 0:
            raise ValueError("monthly_price_eur must be positive")
        if self.link_rate.kbps <= 0:
            raise ValueError("link_rate_mbps must be positive")
        return self


def interpolate_anchors(anchors: Mapping[int, Mapping[str, int]]) -> tuple[dict[str, int], ...]:
    """
    Expand sparse yearly link counts to contiguous years.

    Years between two anchors are interpolated linearly and rounded
    half-up; an offer missing from an anchor counts as zero there.

    Example:
        >>> interpolate_anchors({0: {"a": 192}, 3: {"a": 164}})
        ({'a': 192}, {'a': 183}, {'a': 173}, {'a': 164})
    """
    if not anchors:
        raise ValueError("at least one demand anchor is required")
    years = sorted(anchors)
    if years[0] != 0:
        raise ValueError("the first demand anchor must be year 0")
    offer_ids = sorted({offer for counts in anchors.values() for offer in counts})

    rows: list[dict[str, int]] = []
    for start, end in zip(years, years[1:]):
        for year in range(start, end):
            row = {}
            for offer in offer_ids:
                low = anchors[start].get(offer, 0)
                high = anchors[end].get(offer, 0)
                value = low + (high - low) * Fraction(year - start, end - start)
                row[offer] = int(round_half_up(value))
            rows.append(row)
    rows.append({offer: anchors[years[-1]].get(offer, 0) for offer in offer_ids})
    return tuple(rows)


class DemandSchedule(_Model):
    """
    Wholesale link demand per year (year index = position).

    The document form is either explicit ``years`` (a list of tables mapping
    offer id → link count) or sparse ``anchors`` with
    ``interpolation = "linear"``.
    """
    years: tuple[dict[str, Annotated[int, Field(ge=0)]], ...] = Field(min_length=1)

    @model_validator(mode="before")
    @classmethod
    def _expand_anchors(cls, data: Any) -> Any:
        if not isinstance(data, dict) or "anchors" not in data:
            return data
        if "years" in data:
            raise ValueError("give either 'years' or 'anchors', not both")
        extra = set(data) - {"anchors", "interpolation"}
        if extra:
            raise ValueError(f"unexpected demand keys: {', '.join(sorted(extra))}")
        interpolation = data.get("interpolation", "linear")
        if interpolation != "linear":
            raise ValueError(f"unsupported interpolation {interpolation!r}, expected 'linear'")
        anchors: dict[int, dict[str, int]] = {}
        for anchor in data["anchors"]:
            year = anchor.get("year")
            links = anchor.get("links", {})
            if not isinstance(year, int) or isinstance(year, bool) or year < 0:
                raise ValueError(f"anchor year must be a non-negative integer, got {year!r}")
            if year in anchors:
                raise ValueError(f"duplicate demand anchor for year {year}")
            for offer, count in links.items():
                if not isinstance(count, int) or isinstance(count, bool) or count < 0:
                    raise ValueError(f"link count for '{offer}' in year {year} must be a non-negative integer")
            anchors[year] = dict(links)
        return {"years": interpolate_anchors(anchors)}

    @classmethod
    def from_anchors(cls, anchors: Mapping[int, Mapping[str, int]]) -> "DemandSchedule":
        return cls(years=interpolate_anchors(anchors))

    def offer_ids(self) -> set[str]:
        return {offer for row in self.years for offer in row}

    def __len__(self) -> int:
        return len(self.years)


class _Architecture(_Model):
    id: str = Field(min_length=1)
    label: Optional[str] = None

    @property
    def title(self) -> str:
        return self.label or self.id


class SatelliteConfig(_Architecture):
    """Architecture 1: every cell site backhauled over a GEO satellite."""
    kind: Literal["satellite"] = "satellite"
    spectral_efficiency: DecimalValue = Field(Decimal("1.9636"), alias="spectral_efficiency_bps_per_hz")
    transponder_bandwidth: DecimalValue = Field(Decimal("72"), alias="transponder_bandwidth_mhz")
    link_availability: AvailabilityValue = Availability.of("0.9996")
    cost_catalog: Optional[tuple[CostItem, ...]] = Field(None, alias="cost_items")
    annual_lease_per_mhz: CostEur = Field(Money(0), alias="annual_lease_per_mhz_eur")

    @field_validator("spectral_efficiency", "transponder_bandwidth")
    @classmethod
    def _positive(cls, value: Decimal) -> Decimal:
        if value <= 0:
            raise ValueError("must be positive")
        return value


class HapDirectConfig(_Architecture):
    """Architecture 2: the MNO operates its own HAP fleet."""
    kind: Literal["hap_direct"] = "hap_direct"
    platform: str
    fronthaul_availability: AvailabilityValue
    ground_capex: CostMeur = Field(alias="ground_capex_meur")
    ground_opex_annual: CostMeur = Field(alias="ground_opex_annual_meur")
    include_development_cost: bool = False
    platform_count: Optional[int] = Field(None, ge=1)
    learning_rate: DecimalValue = Decimal("1")
    require_gateway: bool = False

    @field_validator("learning_rate")
    @classmethod
    def _learning_range(cls, value: Decimal) -> Decimal:
        if not Decimal(0) < value <= Decimal(1):
            raise ValueError("learning_rate must be in (0, 1]")
        return value


def _default_components() -> dict[str, Any]:
    from . import catalog

    return dict(catalog.COMPONENT_AVAILABILITY)


class IntegratedConfig(_Architecture):
    """Architecture 3: a HAP operator sells wholesale backhaul links to MNOs."""
    kind: Literal["integrated"] = "integrated"
    platform: str
    offers: Optional[tuple[WholesaleOffer, ...]] = None
    demand: Optional[DemandSchedule] = None
    contention_ratio: DecimalValue = Decimal("4.0")
    cell_rate_at_class: RateMbps = Field(DataRate.from_mbps(80), alias="cell_rate_at_class_mbps")
    mno_ground_capex: CostMeur = Field(Money.meur("0.7"), alias="mno_ground_capex_meur")
    mno_offer: str = "aerial"
    mno_link_count: Optional[int] = Field(None, ge=0)
    include_development_cost: bool = False
    component_availability: dict[str, AvailabilityValue] = Field(default_factory=_default_components)
    tier_topologies: dict[OfferTier, PathModel] = Field(default_factory=dict)

    @field_validator("contention_ratio")
    @classmethod
    def _contention_at_least_one(cls, value: Decimal) -> Decimal:
        if value < 1:
            raise ValueError("contention_ratio must be at least 1")
        return value


ArchitectureConfig = Annotated[
    Union[SatelliteConfig, HapDirectConfig, IntegratedConfig],
    Field(discriminator="kind"),
]


class AssessmentOverrides(_Model):
    """The optional ``[assessment]`` table of a scenario."""
    horizon_years: Optional[int] = Field(None, ge=1)
    discount_rate: Optional[DecimalValue] = None
    monte_carlo_trials: Optional[int] = Field(None, ge=1)
    seed: Optional[int] = Field(None, ge=0, lt=2**64)
    workers: Optional[int] = Field(None, ge=1)
    density_contention: Optional[DecimalValue] = None

    @field_validator("discount_rate")
    @classmethod
    def _above_minus_one(cls, value: Optional[Decimal]) -> Optional[Decimal]:
        if value is not None and value <= -1:
            raise ValueError("discount_rate must be greater than -1")
        return value

    def settings(self, base: Optional[AssessmentSettings] = None) -> AssessmentSettings:
        return (base or AssessmentSettings()).with_overrides(**self.model_dump(exclude_none=True))


class Scenario(_Model):
    """A fully resolved scenario."""
    title: str = ""
    params: ScenarioParams = Field(alias="scenario")
    assessment: AssessmentOverrides = Field(default_factory=AssessmentOverrides)
    platforms: dict[str, PlatformSpec] = Field(default_factory=dict)
    architectures: tuple[ArchitectureConfig, ...] = ()

    @model_validator(mode="after")
    def _unique_architecture_ids(self) -> "Scenario":
        seen: set[str] = set()
        for arch in self.architectures:
            if arch.id in seen:
                raise ValueError(f"duplicate architecture id '{arch.id}'")
            seen.add(arch.id)
        return self

    def settings(self) -> AssessmentSettings:
        return self.assessment.settings()

    def architecture(self, arch_id: str) -> Union[SatelliteConfig, HapDirectConfig, IntegratedConfig]:
        for arch in self.architectures:
            if arch.id == arch_id:
                return arch
        raise UnknownReferenceError("architecture", arch_id, [a.id for a in self.architectures])

    def platform(self, platform_id: str) -> PlatformSpec:
        try:
            return self.platforms[platform_id]
        except KeyError:
            raise UnknownReferenceError("platform", platform_id, self.platforms) from None

    def to_document(self) -> dict[str, Any]:
        """The scenario in document form (unit-named keys, exact values as strings)."""
        return self.model_dump(mode="json", by_alias=True, exclude_none=True)

    def digest(self) -> str:
        """SHA-256 of the canonical (sorted-key, whitespace-free) document."""
        canonical = json.dumps(self.to_document(), sort_keys=True, separators=(",", ":"), ensure_ascii=False)
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def _with_platform_defaults(document: Mapping[str, Any]) -> dict[str, Any]:
    """Merge scenario platform tables over the catalog entries."""
    from . import catalog

    merged = copy.deepcopy(dict(document))
    overrides = merged.get("platforms") or {}
    if not isinstance(overrides, dict):
        return merged
    platforms: dict[str, Any] = {
        platform_id: spec.model_dump(mode="json", by_alias=True, exclude_none=True)
        for platform_id, spec in catalog.PLATFORMS.items()
    }
    for platform_id, override in overrides.items():
        if isinstance(override, dict) and platform_id in platforms:
            platforms[platform_id] = {**platforms[platform_id], **override}
        else:
            platforms[platform_id] = override
    merged["platforms"] = platforms
    return merged


def _resolve_architecture(
    arch: Union[SatelliteConfig, HapDirectConfig, IntegratedConfig],
    scenario: Scenario,
) -> Union[SatelliteConfig, HapDirectConfig, IntegratedConfig]:
    from . import catalog

    if isinstance(arch, SatelliteConfig):
        if arch.cost_catalog is None:
            return arch.model_copy(update={"cost_catalog": catalog.satellite_cost_items(scenario.params.site_count)})
        return arch

    scenario.platform(arch.platform)
    if isinstance(arch, HapDirectConfig):
        return arch

    offers = arch.offers if arch.offers is not None else catalog.WHOLESALE_OFFERS
    demand = arch.demand if arch.demand is not None else catalog.table_v_demand()
    offer_ids = [offer.id for offer in offers]
    if not offer_ids:
        raise ScenarioValidationError(f"architectures.{arch.id}.offers", "at least one offer is required")
    if len(set(offer_ids)) != len(offer_ids):
        raise ScenarioValidationError(f"architectures.{arch.id}.offers", "offer ids must be unique")
    if len({offer.link_rate for offer in offers}) != 1:
        raise ScenarioValidationError(f"architectures.{arch.id}.offers", "all offers must share one link_rate_mbps")
    for offer_id in sorted(demand.offer_ids()):
        if offer_id not in offer_ids:
            raise UnknownReferenceError("offer", offer_id, offer_ids)
    if arch.mno_offer not in offer_ids:
        raise UnknownReferenceError("offer", arch.mno_offer, offer_ids)
    return arch.model_copy(update={"offers": tuple(offers), "demand": demand})


def validate_scenario(raw: Union[Mapping[str, Any], Scenario]) -> Scenario:
    """
    Validate a parsed scenario document.

    Fills omitted fields from the catalog (platforms, satellite cost items,
    wholesale offers, demand) and checks every platform and offer reference.

    Args:
        raw: Parsed document (or an already validated Scenario)

    Returns:
        The resolved, immutable Scenario

    Raises:
        ScenarioValidationError: A field violates a constraint
        UnknownReferenceError: A platform or offer id does not resolve
    """
    if isinstance(raw, Scenario):
        return raw
    if not isinstance(raw, Mapping):
        raise ScenarioValidationError("root", f"expected a table, got {type(raw).__name__}")

    try:
        scenario = Scenario.model_validate(_with_platform_defaults(raw))
    except ValidationError as exc:
        raise from_validation_error(exc) from None

    resolved = tuple(_resolve_architecture(arch, scenario) for arch in scenario.architectures)
    scenario = scenario.model_copy(update={"architectures": resolved})
    logger.debug(
        "validated scenario %r: %d architecture(s), %d platform(s)",
        scenario.title, len(scenario.architectures), len(scenario.platforms),
    )
    return scenario


def parse_scenario(text: str) -> Scenario:
    """Parse and validate scenario TOML text."""
    try:
        document = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ScenarioValidationError("document", f"malformed TOML: {exc}") from None
    return validate_scenario(document)


def load_scenario(path: Union[str, Path]) -> Scenario:
    """
    Read, parse and validate a scenario file.

    Raises:
        ScenarioInputError: The file cannot be read or is not UTF-8
        ScenarioValidationError: The file is not valid TOML or not a valid scenario
    """
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise ScenarioInputError(f"cannot read scenario '{path}': {exc.strerror or exc}") from None
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError:
        raise ScenarioInputError(f"cannot decode scenario '{path}': not UTF-8 text") from None
    return parse_scenario(text)


def bundled_scenario_path(name: str = "default") -> Path:
    """Path of a scenario shipped inside the package."""
    from importlib.resources import files

    return Path(str(files("hapassess") / "scenarios" / f"{name}.toml"))
