"""
Cost rollups, per-subscriber cost, discounted cash flows, learning-curve
fleet costing and the wholesale income forecast.

Money stays exact through every sum; each operation rounds once, half-up
to the cent, when it hands a result back.
"""

import logging
import warnings
from dataclasses import dataclass, field
from decimal import Decimal
from typing import Iterable, Mapping, Optional, Sequence, Union

from .errors import (
    CapacityExceededError,
    InvalidArgumentError,
    MultipleRootsWarning,
    NoRootInRangeError,
    NoSignChangeError,
    OutOfRangeError,
    UnknownReferenceError,
)
from .scenario import CostItem, DemandSchedule, WholesaleOffer
from .types import ZERO, CostPhase, Money, Number, SiteClass, exact_context, round_half_up, to_decimal

logger = logging.getLogger(__name__)

MONTHS_PER_YEAR = 12

IRR_LOW = Decimal("-0.99")
IRR_HIGH = Decimal("10")
# Bisection stops once |npv| is below half a cent and the bracket is under
# IRR_BRACKET_WIDTH, so npv(irr) rounds to 0.00 and the rate is stable at 6 digits.
IRR_NPV_TOLERANCE = Decimal("0.005")
IRR_BRACKET_WIDTH = Decimal("1e-9")
IRR_MIN_BRACKET = Decimal("1e-18")
IRR_MAX_ITERATIONS = 400
# Sub-bracket width when scanning a series with several sign changes.
IRR_SCAN_STEP = Decimal("0.05")


@dataclass(frozen=True)
class PhaseTotals:
    """CAPEX and yearly OPEX of one site class."""
    capex: Money = ZERO
    opex_annual: Money = ZERO

    def __add__(self, other: "PhaseTotals") -> "PhaseTotals":
        return PhaseTotals(capex=self.capex + other.capex, opex_annual=self.opex_annual + other.opex_annual)


@dataclass(frozen=True)
class CostRollup:
    """
    Cost totals, overall and per site class.

    Attributes:
        capex_total: One-off investment
        opex_annual_total: Yearly operating cost
        by_site_class: Totals per site class, in first-seen order
    """
    capex_total: Money = ZERO
    opex_annual_total: Money = ZERO
    by_site_class: Mapping[SiteClass, PhaseTotals] = field(default_factory=dict)

    @classmethod
    def single(cls, site_class: SiteClass, capex: Money = ZERO, opex_annual: Money = ZERO) -> "CostRollup":
        return cls(capex, opex_annual, {site_class: PhaseTotals(capex, opex_annual)})

    def __add__(self, other: "CostRollup") -> "CostRollup":
        merged = dict(self.by_site_class)
        for site_class, totals in other.by_site_class.items():
            merged[site_class] = merged.get(site_class, PhaseTotals()) + totals
        return CostRollup(
            capex_total=self.capex_total + other.capex_total,
            opex_annual_total=self.opex_annual_total + other.opex_annual_total,
            by_site_class=merged,
        )


def rollup(items: Iterable[CostItem]) -> CostRollup:
    """
    Sum cost items per phase and site class.

    Example:
        >>> rollup([]).capex_total
        Money(cents=0)
    """
    result = CostRollup()
    for item in items:
        if item.phase is CostPhase.CAPEX:
            result += CostRollup.single(item.site_class, capex=item.extended)
        else:
            result += CostRollup.single(item.site_class, opex_annual=item.extended)
    return result


def amortized_monthly(capex: Money, months: int) -> Money:
    """CAPEX spread evenly over ``months``, half-up to the cent."""
    if months < 1:
        raise InvalidArgumentError(f"amortization months must be at least 1, got {months}")
    return capex.divide(months)


def per_subscriber_monthly(capex: Money, opex_annual: Money, months: int, subscribers: int) -> Money:
    """
    Monthly cost per subscriber: amortized CAPEX plus a twelfth of the yearly OPEX.

    Args:
        capex: Investment, amortized over ``months``
        opex_annual: Yearly operating cost
        months: Amortization period
        subscribers: Subscribers sharing the cost

    Raises:
        InvalidArgumentError: ``subscribers`` is zero (code DIVISION_BY_ZERO)

    Example:
        >>> per_subscriber_monthly(Money.meur("4.7"), Money.meur("1.1"), 60, 18000)
        Money(cents=944)
    """
    if months < 1:
        raise InvalidArgumentError(f"amortization months must be at least 1, got {months}")
    if subscribers < 1:
        raise InvalidArgumentError("per-subscriber cost needs at least one subscriber", code="DIVISION_BY_ZERO")
    with exact_context():
        monthly = capex.euros / months + opex_annual.euros / MONTHS_PER_YEAR
        return Money.from_exact(monthly / subscribers)


@dataclass(frozen=True)
class CashFlow:
    period: int
    amount: Money


@dataclass(frozen=True)
class CashFlowSeries:
    """Signed yearly cash flows with periods 0, 1, 2, ..."""
    flows: tuple[CashFlow, ...]

    def __post_init__(self) -> None:
        if not self.flows:
            raise InvalidArgumentError("a cash-flow series needs at least one period")
        for expected, flow in enumerate(self.flows):
            if flow.period != expected:
                raise InvalidArgumentError(
                    f"cash-flow periods must run 0, 1, 2, ... without gaps; got {flow.period} at position {expected}"
                )

    @classmethod
    def of(cls, amounts: Sequence[Union[Money, Number]]) -> "CashFlowSeries":
        """Build from per-period amounts; plain numbers are euros."""
        return cls(tuple(
            CashFlow(period, amount if isinstance(amount, Money) else Money.eur(amount))
            for period, amount in enumerate(amounts)
        ))

    @property
    def amounts(self) -> list[Money]:
        return [flow.amount for flow in self.flows]

    def total(self) -> Money:
        return sum(self.amounts, ZERO)

    def __len__(self) -> int:
        return len(self.flows)


def _present_value(flows: CashFlowSeries, rate: Decimal) -> Decimal:
    with exact_context():
        factor = 1 / (1 + rate)
        value = Decimal(0)
        for amount in reversed(flows.amounts):
            value = value * factor + amount.euros
        return value


def npv(flows: CashFlowSeries, discount_rate: Number) -> Money:
    """
    Net present value, half-up to the cent.

    Example:
        >>> npv(CashFlowSeries.of([-100, 110]), "0.10")
        Money(cents=0)
    """
    rate = to_decimal(discount_rate)
    if rate <= -1:
        raise InvalidArgumentError(f"discount rate must be greater than -1, got {rate}")
    return Money.from_exact(_present_value(flows, rate))


def _sign_changes(flows: CashFlowSeries) -> int:
    signs = [1 if m.cents > 0 else -1 for m in flows.amounts if m.cents != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def _bisect(flows: CashFlowSeries, low: Decimal, high: Decimal) -> Decimal:
    f_low = _present_value(flows, low)
    with exact_context():
        for _ in range(IRR_MAX_ITERATIONS):
            mid = (low + high) / 2
            f_mid = _present_value(flows, mid)
            width = high - low
            if f_mid == 0 or width < IRR_MIN_BRACKET:
                return mid
            if abs(f_mid) < IRR_NPV_TOLERANCE and width < IRR_BRACKET_WIDTH:
                return mid
            if (f_mid > 0) == (f_low > 0):
                low, f_low = mid, f_mid
            else:
                high = mid
    return mid


def _brackets(flows: CashFlowSeries) -> list[tuple[Decimal, Decimal]]:
    """Sub-brackets of (IRR_LOW, IRR_HIGH) over which the NPV changes sign."""
    points = []
    point = IRR_LOW
    while point < IRR_HIGH:
        points.append(point)
        point += IRR_SCAN_STEP
    points.append(IRR_HIGH)

    found = []
    values = [_present_value(flows, p) for p in points]
    for (a, fa), (b, fb) in zip(zip(points, values), zip(points[1:], values[1:])):
        if fa == 0:
            found.append((a, a))
        elif (fa > 0) != (fb > 0) and fb != 0:
            found.append((a, b))
    if values[-1] == 0:
        found.append((points[-1], points[-1]))
    return found


def irr(flows: CashFlowSeries) -> Decimal:
    """
    Internal rate of return by bisection on (-0.99, 10).

    A series with one sign change has a unique root. With several sign
    changes the bracket is scanned and the root nearest zero is returned
    with a MultipleRootsWarning.

    Raises:
        NoSignChangeError: The flows never change sign
        NoRootInRangeError: No root lies inside the bracket

    Example:
        >>> round(irr(CashFlowSeries.of([-100, 50, 60])), 4)
        Decimal('0.0639')
    """
    changes = _sign_changes(flows)
    if changes == 0:
        raise NoSignChangeError("cash flows never change sign; IRR is undefined")

    if changes == 1:
        f_low = _present_value(flows, IRR_LOW)
        f_high = _present_value(flows, IRR_HIGH)
        if f_low == 0:
            return IRR_LOW
        if f_high == 0:
            return IRR_HIGH
        if (f_low > 0) == (f_high > 0):
            raise NoRootInRangeError(f"no IRR between {IRR_LOW} and {IRR_HIGH}")
        return _bisect(flows, IRR_LOW, IRR_HIGH)

    roots = [low if low == high else _bisect(flows, low, high) for low, high in _brackets(flows)]
    if not roots:
        raise NoRootInRangeError(f"no IRR between {IRR_LOW} and {IRR_HIGH}")
    nearest = min(roots, key=abs)
    warnings.warn(
        f"cash flows change sign {changes} times; {len(roots)} root(s) found, returning the one nearest zero",
        MultipleRootsWarning,
        stacklevel=2,
    )
    logger.warning("IRR has %d candidate roots, using %s", len(roots), nearest)
    return nearest


def learning_unit_cost(first_unit: Money, n: int, learning_rate: Number) -> Money:
    """
    Cost of the n-th unit under a learning curve.

    Every doubling of cumulative production multiplies the unit cost by
    ``learning_rate``.

    Example:
        >>> learning_unit_cost(Money.meur(4), 4, "0.8")
        Money(cents=256000000)
    """
    rate = to_decimal(learning_rate)
    if not Decimal(0) < rate <= Decimal(1):
        raise InvalidArgumentError(f"learning rate must be in (0, 1], got {rate}")
    if n < 1:
        raise InvalidArgumentError(f"unit index must be at least 1, got {n}")
    with exact_context():
        exponent = rate.ln() / Decimal(2).ln()
        return Money.from_exact(first_unit.euros * Decimal(n) ** exponent)


def fleet_acquisition_cost(first_unit: Money, count: int, learning_rate: Number) -> Money:
    """Summed cost of units 1..count under a learning curve."""
    if count < 1:
        raise InvalidArgumentError(f"fleet size must be at least 1, got {count}")
    return sum((learning_unit_cost(first_unit, i, learning_rate) for i in range(1, count + 1)), ZERO)


def _offer_index(offers: Union[Mapping[str, WholesaleOffer], Iterable[WholesaleOffer]]) -> dict[str, WholesaleOffer]:
    if isinstance(offers, Mapping):
        return dict(offers)
    return {offer.id: offer for offer in offers}


def wholesale_income(
    row_demand: Mapping[str, int],
    offers: Union[Mapping[str, WholesaleOffer], Iterable[WholesaleOffer]],
) -> Money:
    """
    Yearly income from the links sold in one year.

    Raises:
        UnknownReferenceError: A demanded offer has no price

    Example:
        >>> from hapassess.catalog import WHOLESALE_OFFERS
        >>> wholesale_income({"aerial": 192, "aerial_failover": 86, "complete": 86}, WHOLESALE_OFFERS)
        Money(cents=367200000)
    """
    catalog = _offer_index(offers)
    monthly = ZERO
    for offer_id, count in row_demand.items():
        if offer_id not in catalog:
            raise UnknownReferenceError("offer", offer_id, catalog)
        monthly += catalog[offer_id].monthly_price * count
    return monthly * MONTHS_PER_YEAR


def utilization(row_demand: Mapping[str, int], sellable: int, year: Optional[int] = None) -> Decimal:
    """
    Share of sellable links in use, percent to one decimal.

    Raises:
        CapacityExceededError: More links are demanded than can be sold
    """
    if sellable < 1:
        raise InvalidArgumentError(f"sellable links must be at least 1, got {sellable}")
    total = sum(row_demand.values())
    if total > sellable:
        raise CapacityExceededError(total, sellable, year)
    with exact_context():
        return round_half_up(Decimal(100 * total) / sellable, 1)


@dataclass(frozen=True)
class ForecastRow:
    """One year of the wholesale forecast."""
    year: int
    links_by_offer: Mapping[str, int]
    total_links: int
    utilization_percent: Decimal
    income_annual: Money


def forecast(
    demand: DemandSchedule,
    offers: Union[Mapping[str, WholesaleOffer], Iterable[WholesaleOffer]],
    sellable: int,
    years: Optional[int] = None,
) -> list[ForecastRow]:
    """
    Links, utilization and income for years 0..years-1.

    Args:
        demand: Link demand per year
        offers: Priced offer catalog
        sellable: Links the platform can sell
        years: Number of years (default: the whole schedule)

    Raises:
        OutOfRangeError: ``years`` exceeds the demand schedule
        CapacityExceededError: A year demands more links than are sellable
    """
    catalog = _offer_index(offers)
    count = len(demand) if years is None else years
    if count < 1:
        raise InvalidArgumentError(f"forecast needs at least one year, got {count}")
    if count > len(demand):
        raise OutOfRangeError(f"demand schedule covers {len(demand)} year(s), {count} requested")

    offer_order = [offer_id for offer_id in catalog if offer_id in demand.offer_ids()]
    offer_order += sorted(demand.offer_ids() - set(offer_order))
    rows = []
    for year in range(count):
        links = {offer_id: demand.years[year].get(offer_id, 0) for offer_id in offer_order}
        row = ForecastRow(
            year=year,
            links_by_offer=links,
            total_links=sum(links.values()),
            utilization_percent=utilization(links, sellable, year),
            income_annual=wholesale_income(links, catalog),
        )
        logger.debug("forecast year %d: %d links, %s%%, %s", year, row.total_links,
                     row.utilization_percent, row.income_annual.label())
        rows.append(row)
    return rows


def cost_only_series(capex: Money, opex_annual: Money, horizon_years: int) -> CashFlowSeries:
    """An investor's costs: year 0 carries the CAPEX, every year the OPEX."""
    if horizon_years < 1:
        raise InvalidArgumentError(f"horizon must be at least 1 year, got {horizon_years}")
    return CashFlowSeries.of([-(capex if t == 0 else ZERO) - opex_annual for t in range(horizon_years)])


def operator_series(incomes: Sequence[Money], opex_annual: Money, capex: Money) -> CashFlowSeries:
    """Yearly income less OPEX, with the CAPEX paid in year 0."""
    return CashFlowSeries.of([
        income - opex_annual - (capex if t == 0 else ZERO) for t, income in enumerate(incomes)
    ])
