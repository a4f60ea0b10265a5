"""
Unit-safe value types for hapassess.

Money, DataRate, Area and Availability are immutable fixed-point values.
Arithmetic on them is exact; rounding happens once, at the point where a
result is turned back into one of these types, and is always half-up.
"""

from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Context, Decimal, InvalidOperation, localcontext
from enum import Enum
from fractions import Fraction
from typing import Annotated, Any, Callable, ContextManager, Optional, Union

from pydantic import PlainSerializer, PlainValidator

Number = Union[int, Decimal, Fraction, str, float]

# Wide enough that every intermediate quantity in the engine is exact
# before its terminal rounding step.
PRECISION = 60

_KB_PER_MB = 1000


def exact_context() -> ContextManager[Context]:
    """Decimal context used for all intermediate arithmetic."""
    return localcontext(Context(prec=PRECISION, rounding=ROUND_HALF_UP))


def to_decimal(value: Any) -> Decimal:
    """
    Convert a scenario or caller value to an exact Decimal.

    Floats go through their shortest repr so that ``0.05`` stays ``0.05``.
    Fractions such as ``Fraction(756, 385)`` are evaluated at full precision.
    """
    if isinstance(value, bool) or value is None:
        raise ValueError(f"expected a number, got {value!r}")
    if isinstance(value, Decimal):
        result = value
    elif isinstance(value, Fraction):
        with exact_context():
            result = Decimal(value.numerator) / Decimal(value.denominator)
    elif isinstance(value, float):
        result = Decimal(repr(value))
    elif isinstance(value, (int, str)):
        try:
            result = Decimal(str(value).strip())
        except InvalidOperation:
            raise ValueError(f"not a decimal number: {value!r}") from None
    else:
        raise ValueError(f"expected a number, got {type(value).__name__}")
    if not result.is_finite():
        raise ValueError(f"expected a finite number, got {value!r}")
    return result


def round_half_up(value: Number, places: int = 0) -> Decimal:
    """Round to ``places`` fractional digits, ties away from zero."""
    quantum = Decimal(1).scaleb(-places)
    with exact_context():
        return to_decimal(value).quantize(quantum, rounding=ROUND_HALF_UP)


def _check_unit(unit: str) -> Decimal:
    try:
        return _UNIT_FACTORS[unit]
    except KeyError:
        raise ValueError(f"unknown money unit {unit!r}, expected one of {sorted(_UNIT_FACTORS)}") from None


_UNIT_FACTORS = {
    "eur": Decimal(1),
    "keur": Decimal(1_000),
    "meur": Decimal(1_000_000),
}

_UNIT_SYMBOLS = {"eur": "€", "keur": "k€", "meur": "M€"}


@dataclass(frozen=True, order=True)
class Money:
    """
    An exact amount of euro-cents.

    Attributes:
        cents: Signed integer number of cents. Cost fields keep this
            non-negative; only cash-flow entries go below zero.

    Example:
        >>> Money.meur("4.0") + Money.meur("0.7")
        Money(cents=470000000)
        >>> Money.meur("6.32").display("meur")
        '6.3'
    """
    cents: int = 0

    def __post_init__(self) -> None:
        if isinstance(self.cents, bool) or not isinstance(self.cents, int):
            raise TypeError(f"Money cents must be an int, got {type(self.cents).__name__}")

    @classmethod
    def of(cls, amount: Number, unit: str = "eur") -> "Money":
        """Build from an amount in ``eur``, ``keur`` or ``meur``, half-up to the cent."""
        factor = _check_unit(unit)
        with exact_context():
            cents = round_half_up(to_decimal(amount) * factor * 100)
        return cls(int(cents))

    @classmethod
    def eur(cls, amount: Number) -> "Money":
        return cls.of(amount, "eur")

    @classmethod
    def keur(cls, amount: Number) -> "Money":
        return cls.of(amount, "keur")

    @classmethod
    def meur(cls, amount: Number) -> "Money":
        return cls.of(amount, "meur")

    @classmethod
    def from_exact(cls, euros: Number) -> "Money":
        """Terminal rounding step: an exact euro quantity rounded half-up to cents."""
        return cls.of(euros, "eur")

    @property
    def euros(self) -> Decimal:
        """Exact euro value."""
        return Decimal(self.cents).scaleb(-2)

    def in_unit(self, unit: str) -> Decimal:
        """Exact value in ``eur``, ``keur`` or ``meur``."""
        factor = _check_unit(unit)
        with exact_context():
            return self.euros / factor

    def display(self, unit: str = "meur", digits: int = 1) -> str:
        """Value in ``unit`` rounded half-up to ``digits`` decimals, no symbol."""
        return f"{round_half_up(self.in_unit(unit), digits):f}"

    def label(self, unit: str = "meur", digits: int = 1) -> str:
        """Human label such as ``'6.3 M€'``."""
        return f"{self.display(unit, digits)} {_UNIT_SYMBOLS[unit]}"

    @classmethod
    def parse_display(cls, text: str, unit: str = "meur") -> "Money":
        """Inverse of :meth:`display`; accepts an optional trailing unit symbol."""
        cleaned = text.strip()
        symbol = _UNIT_SYMBOLS[unit] if unit in _UNIT_SYMBOLS else ""
        if symbol and cleaned.endswith(symbol):
            cleaned = cleaned[: -len(symbol)].strip()
        return cls.of(cleaned, unit)

    def scale(self, factor: Number) -> "Money":
        """Multiply by a rational factor, half-up to the cent."""
        with exact_context():
            return Money.from_exact(self.euros * to_decimal(factor))

    def divide(self, divisor: int) -> "Money":
        """Divide by a positive integer, half-up to the cent."""
        if divisor <= 0:
            raise ValueError(f"divisor must be positive, got {divisor}")
        with exact_context():
            return Money.from_exact(self.euros / divisor)

    def __add__(self, other: "Money") -> "Money":
        if not isinstance(other, Money):
            return NotImplemented
        return Money(self.cents + other.cents)

    def __sub__(self, other: "Money") -> "Money":
        if not isinstance(other, Money):
            return NotImplemented
        return Money(self.cents - other.cents)

    def __neg__(self) -> "Money":
        return Money(-self.cents)

    def __mul__(self, quantity: int) -> "Money":
        if isinstance(quantity, bool) or not isinstance(quantity, int):
            return NotImplemented
        return Money(self.cents * quantity)

    __rmul__ = __mul__

    def is_negative(self) -> bool:
        return self.cents < 0

    def __str__(self) -> str:
        return f"{self.euros:f} €"


ZERO = Money(0)


@dataclass(frozen=True, order=True)
class DataRate:
    """
    A non-negative integer rate in kb/s.

    Example:
        >>> DataRate.from_mbps(2) + DataRate.from_mbps(5)
        DataRate(kbps=7000)
    """
    kbps: int = 0

    def __post_init__(self) -> None:
        if isinstance(self.kbps, bool) or not isinstance(self.kbps, int):
            raise TypeError(f"DataRate kbps must be an int, got {type(self.kbps).__name__}")
        if self.kbps < 0:
            raise ValueError(f"data rate must be non-negative, got {self.kbps} kb/s")

    @classmethod
    def from_mbps(cls, mbps: Number) -> "DataRate":
        """Build from Mb/s; the value must be a whole number of kb/s."""
        with exact_context():
            kbps = to_decimal(mbps) * _KB_PER_MB
        if kbps != kbps.to_integral_value():
            raise ValueError(f"{mbps} Mb/s is not a whole number of kb/s")
        return cls(int(kbps))

    @property
    def mbps(self) -> Decimal:
        return Decimal(self.kbps).scaleb(-3)

    def display(self) -> str:
        """Mb/s, as an integer when whole."""
        whole, rest = divmod(self.kbps, _KB_PER_MB)
        if rest == 0:
            return str(whole)
        return f"{self.mbps.normalize():f}"

    def __add__(self, other: "DataRate") -> "DataRate":
        if not isinstance(other, DataRate):
            return NotImplemented
        return DataRate(self.kbps + other.kbps)

    def __mul__(self, factor: int) -> "DataRate":
        if isinstance(factor, bool) or not isinstance(factor, int):
            return NotImplemented
        return DataRate(self.kbps * factor)

    __rmul__ = __mul__

    def __str__(self) -> str:
        return f"{self.display()} Mb/s"


@dataclass(frozen=True, order=True)
class Area:
    """A strictly positive area in km², two fractional digits."""
    km2: Decimal

    def __post_init__(self) -> None:
        value = round_half_up(self.km2, 2)
        if value <= 0:
            raise ValueError(f"area must be strictly positive, got {self.km2} km²")
        object.__setattr__(self, "km2", value)

    @classmethod
    def of(cls, km2: Number) -> "Area":
        return cls(to_decimal(km2))

    def display(self) -> str:
        return f"{self.km2:.2f}"

    def __str__(self) -> str:
        return f"{self.display()} km²"


# Largest availabilities representable below 1 at the internal and the
# reported precision.
INTERNAL_PLACES = 9
REPORTED_PLACES = 6


@dataclass(frozen=True, order=True)
class Availability:
    """
    Long-run fraction of time a link or path is up, in [0, 1).

    Example:
        >>> Availability.of("0.9996").unavailability
        Decimal('0.0004')
    """
    fraction: Decimal

    def __post_init__(self) -> None:
        value = to_decimal(self.fraction)
        if not (Decimal(0) <= value < Decimal(1)):
            raise ValueError(f"availability must be in [0, 1), got {self.fraction}")
        object.__setattr__(self, "fraction", value)

    @classmethod
    def of(cls, fraction: Number) -> "Availability":
        return cls(to_decimal(fraction))

    @classmethod
    def clamped(cls, fraction: Decimal, places: int) -> "Availability":
        """Round half-up to ``places`` and keep the result strictly below 1."""
        rounded = round_half_up(fraction, places)
        ceiling = Decimal(1) - Decimal(1).scaleb(-places)
        return cls(min(max(rounded, Decimal(0)), ceiling))

    @property
    def unavailability(self) -> Decimal:
        return Decimal(1) - self.fraction

    def reported(self) -> "Availability":
        """Availability at reporting precision (6 decimals)."""
        return Availability.clamped(self.fraction, REPORTED_PLACES)

    def display(self) -> str:
        return f"{self.fraction:f}"

    def __str__(self) -> str:
        return self.display()


@dataclass
class AssessmentSettings:
    """
    Run-level knobs for an assessment.

    Defaults live here; a scenario's ``[assessment]`` table overrides them
    and CLI flags override the scenario.

    Attributes:
        horizon_years: Number of yearly periods in cash-flow series (default: 10)
        discount_rate: Yearly discount rate for NPV (default: 0.08)
        monte_carlo_trials: Trials for the availability cross-check (default: 100000)
        seed: Root seed of the Monte Carlo generator (default: 42)
        workers: Threads used by compare and Monte Carlo (default: 1)
        density_contention: Contention divisor for throughput density (default: 4.0)

    Example:
        >>> settings = AssessmentSettings(horizon_years=5)
        >>> settings.with_overrides(discount_rate=Decimal("0")).discount_rate
        Decimal('0')
    """
    horizon_years: int = 10
    discount_rate: Decimal = Decimal("0.08")
    monte_carlo_trials: int = 100_000
    seed: int = 42
    workers: int = 1
    density_contention: Decimal = Decimal("4.0")

    def __post_init__(self) -> None:
        self.discount_rate = to_decimal(self.discount_rate)
        self.density_contention = to_decimal(self.density_contention)
        if self.horizon_years < 1:
            raise ValueError(f"horizon_years must be at least 1, got {self.horizon_years}")
        if self.discount_rate <= Decimal(-1):
            raise ValueError(f"discount_rate must be greater than -1, got {self.discount_rate}")
        if self.monte_carlo_trials < 1:
            raise ValueError("monte_carlo_trials must be at least 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")
        if self.density_contention < 1:
            raise ValueError(f"density_contention must be at least 1, got {self.density_contention}")

    def with_overrides(self, **changes: Optional[Any]) -> "AssessmentSettings":
        """Copy with every non-None change applied."""
        values = {name: getattr(self, name) for name in self.__dataclass_fields__}
        values.update({name: value for name, value in changes.items() if value is not None})
        return AssessmentSettings(**values)


class PlatformKind(str, Enum):
    """HAP vehicle classes in the platform catalog."""
    UNMANNED_SOLAR_PLANE = "unmanned_solar_plane"
    UNMANNED_AIRSHIP = "unmanned_airship"


class CostPhase(str, Enum):
    CAPEX = "capex"
    OPEX_ANNUAL = "opex_annual"


class SiteClass(str, Enum):
    CELL_SITE = "cell_site"
    AGGREGATION_SITE = "aggregation_site"
    PLATFORM = "platform"
    BACKBONE_FEE = "backbone_fee"
    SPACE_SEGMENT_LEASE = "space_segment_lease"


class OfferTier(str, Enum):
    """Wholesale backhaul offer tiers, cheapest first."""
    AERIAL_ONLY = "aerial_only"
    AERIAL_WITH_FAILOVER = "aerial_with_failover"
    COMPLETE_HIGH_AVAILABILITY = "complete_high_availability"


def plain_decimal(value: Decimal) -> str:
    """Shortest exact decimal text, never in exponent notation."""
    return f"{value.normalize():f}"


def _as_decimal(value: Any) -> Decimal:
    return to_decimal(value)


def _as_area(value: Any) -> Area:
    return value if isinstance(value, Area) else Area.of(value)


def _as_rate(value: Any) -> DataRate:
    return value if isinstance(value, DataRate) else DataRate.from_mbps(value)


def _as_availability(value: Any) -> Availability:
    return value if isinstance(value, Availability) else Availability.of(value)


def _cost_validator(unit: str) -> Callable[[Any], Money]:
    def validate(value: Any) -> Money:
        money = value if isinstance(value, Money) else Money.of(value, unit)
        if money.is_negative():
            raise ValueError(f"cost must be non-negative, got {money}")
        return money
    return validate


def _cost_serializer(unit: str) -> Callable[[Money], str]:
    def serialize(money: Money) -> str:
        return plain_decimal(money.in_unit(unit))
    return serialize


# Pydantic bindings: scenario documents carry plain numbers in the unit
# named by the key, the models carry the value types above.
DecimalValue = Annotated[Decimal, PlainValidator(_as_decimal), PlainSerializer(plain_decimal, return_type=str)]
AreaKm2 = Annotated[Area, PlainValidator(_as_area), PlainSerializer(lambda a: a.display(), return_type=str)]
RateMbps = Annotated[DataRate, PlainValidator(_as_rate), PlainSerializer(lambda r: plain_decimal(r.mbps), return_type=str)]
AvailabilityValue = Annotated[
    Availability, PlainValidator(_as_availability), PlainSerializer(lambda a: a.display(), return_type=str)
]
CostEur = Annotated[Money, PlainValidator(_cost_validator("eur")), PlainSerializer(_cost_serializer("eur"), return_type=str)]
CostKeur = Annotated[Money, PlainValidator(_cost_validator("keur")), PlainSerializer(_cost_serializer("keur"), return_type=str)]
CostMeur = Annotated[Money, PlainValidator(_cost_validator("meur")), PlainSerializer(_cost_serializer("meur"), return_type=str)]
