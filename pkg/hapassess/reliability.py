"""
Availability algebra for backhaul paths.

A path is a tree of leaves (links with an availability), series groups
(all children must be up) and parallel groups (one child suffices).
Component failures are independent. Results are computed exactly, carried
at 9 fractional digits between nodes and reported at 6.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from decimal import Decimal
from typing import Annotated, Iterator, Literal, Mapping, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from .errors import InvalidArgumentError, MissingParameterError
from .types import (
    INTERNAL_PLACES,
    REPORTED_PLACES,
    Availability,
    AvailabilityValue,
    Number,
    OfferTier,
    exact_context,
    round_half_up,
)

logger = logging.getLogger(__name__)

HOURS_PER_YEAR = 8760

# Monte Carlo trials are split into fixed-size chunks; chunk i draws from
# the i-th child of SeedSequence(seed), whatever the number of workers.
CHUNK_TRIALS = 10_000


class _Node(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")


class Leaf(_Node):
    """A single link. An absent availability is bound later by label."""
    kind: Literal["leaf"] = "leaf"
    label: str
    availability: Optional[AvailabilityValue] = None


class Series(_Node):
    kind: Literal["series"] = "series"
    children: tuple["PathModel", ...] = Field(min_length=1)


class Parallel(_Node):
    kind: Literal["parallel"] = "parallel"
    children: tuple["PathModel", ...] = Field(min_length=1)


PathModel = Annotated[Union[Leaf, Series, Parallel], Field(discriminator="kind")]

Series.model_rebuild()
Parallel.model_rebuild()


def leaf(label: str, availability: Optional[Number] = None) -> Leaf:
    return Leaf(label=label, availability=None if availability is None else Availability.of(availability))


def series(*children: Union[Leaf, Series, Parallel]) -> Series:
    return Series(children=children)


def parallel(*children: Union[Leaf, Series, Parallel]) -> Parallel:
    return Parallel(children=children)


# Canonical topology of each offer tier. Leaves are bound by label to the
# scenario's component availabilities; scenarios may override a topology.
TIER_TOPOLOGIES: dict[OfferTier, Union[Leaf, Series, Parallel]] = {
    OfferTier.AERIAL_ONLY: series(leaf("aerial"), leaf("mno_backhaul")),
    OfferTier.AERIAL_WITH_FAILOVER: series(
        leaf("aerial"),
        parallel(leaf("mno_backhaul"), leaf("operator_backhaul")),
    ),
    OfferTier.COMPLETE_HIGH_AVAILABILITY: series(leaf("aerial"), leaf("operator_backhaul")),
}


def leaves(model: Union[Leaf, Series, Parallel]) -> Iterator[Leaf]:
    """Leaves in depth-first order."""
    if isinstance(model, Leaf):
        yield model
        return
    for child in model.children:
        yield from leaves(child)


def bind(
    model: Union[Leaf, Series, Parallel],
    components: Mapping[str, Union[Availability, Number]],
) -> Union[Leaf, Series, Parallel]:
    """Fill every unbound leaf from ``components`` by label."""
    if isinstance(model, Leaf):
        if model.availability is not None:
            return model
        if model.label not in components:
            raise MissingParameterError(model.label, "no component availability for this path leaf")
        value = components[model.label]
        availability = value if isinstance(value, Availability) else Availability.of(value)
        return model.model_copy(update={"availability": availability})
    children = tuple(bind(child, components) for child in model.children)
    return model.model_copy(update={"children": children})


def _evaluate(model: Union[Leaf, Series, Parallel]) -> Decimal:
    if isinstance(model, Leaf):
        if model.availability is None:
            raise MissingParameterError(model.label, "path leaf has no availability")
        return model.availability.fraction

    values = [_evaluate(child) for child in model.children]
    with exact_context():
        if isinstance(model, Series):
            result = math.prod(values, start=Decimal(1))
        else:
            result = 1 - math.prod((1 - v for v in values), start=Decimal(1))
    return Availability.clamped(result, INTERNAL_PLACES).fraction


def path_availability(model: Union[Leaf, Series, Parallel]) -> Availability:
    """
    Analytic availability of a path.

    Example:
        >>> path_availability(series(leaf("a", "0.99"), leaf("b", "0.9996")))
        Availability(fraction=Decimal('0.989604'))
    """
    return Availability.clamped(_evaluate(model), REPORTED_PLACES)


def downtime_per_year(availability: Availability) -> Decimal:
    """Expected yearly downtime in hours, half-up to 2 decimals."""
    with exact_context():
        return round_half_up(availability.unavailability * HOURS_PER_YEAR, 2)


def offer_delivered_availability(
    tier: OfferTier,
    components: Mapping[str, Union[Availability, Number]],
    topologies: Optional[Mapping[OfferTier, Union[Leaf, Series, Parallel]]] = None,
) -> Availability:
    """
    Availability a wholesale customer gets for an offer tier.

    Args:
        tier: The offer tier
        components: Availability per component label (aerial, mno_backhaul,
            operator_backhaul for the default topologies)
        topologies: Optional per-tier overrides of TIER_TOPOLOGIES

    Raises:
        MissingParameterError: If a label the topology needs is absent
    """
    return path_availability(offer_path(tier, components, topologies))


def offer_path(
    tier: OfferTier,
    components: Mapping[str, Union[Availability, Number]],
    topologies: Optional[Mapping[OfferTier, Union[Leaf, Series, Parallel]]] = None,
) -> Union[Leaf, Series, Parallel]:
    """The tier's topology with every leaf bound to a component availability."""
    topology = (topologies or {}).get(tier) or TIER_TOPOLOGIES[tier]
    return bind(topology, components)


@dataclass(frozen=True)
class SimulationResult:
    """
    Monte Carlo estimate of a path availability.

    Attributes:
        estimate: Fraction of trials in which the path was up
        half_width: Half-width of the 95% confidence interval
        trials: Number of trials
        seed: Root seed the trials were drawn from
    """
    estimate: float
    half_width: float
    trials: int
    seed: int

    def standard_error(self, p: Optional[float] = None) -> float:
        p = self.estimate if p is None else p
        return math.sqrt(p * (1 - p) / self.trials)

    def agrees_with(self, analytic: Availability, sigmas: float = 4.0) -> bool:
        """True when the estimate is within ``sigmas`` standard errors of ``analytic``."""
        p = float(analytic.fraction)
        return abs(self.estimate - p) <= sigmas * self.standard_error(p)


def _trial_block(model: Union[Leaf, Series, Parallel], rng: np.random.Generator, size: int) -> np.ndarray:
    if isinstance(model, Leaf):
        if model.availability is None:
            raise MissingParameterError(model.label, "path leaf has no availability")
        return rng.random(size) < float(model.availability.fraction)
    states = [_trial_block(child, rng, size) for child in model.children]
    if isinstance(model, Series):
        return np.logical_and.reduce(states)
    return np.logical_or.reduce(states)


def simulate_availability(
    model: Union[Leaf, Series, Parallel],
    trials: int,
    seed: int,
    workers: int = 1,
) -> SimulationResult:
    """
    Estimate a path availability by independent leaf draws.

    Uses numpy's PCG64 generator. Trials are split into chunks of
    CHUNK_TRIALS; chunk i is seeded with the i-th spawned child of
    ``SeedSequence(seed)``, so identical (model, trials, seed) give the
    identical estimate for any ``workers``.
    """
    if trials < 1:
        raise InvalidArgumentError(f"trials must be at least 1, got {trials}")
    if not 0 <= seed < 2**64:
        raise InvalidArgumentError(f"seed must be an unsigned 64-bit integer, got {seed}")
    for item in leaves(model):
        if item.availability is None:
            raise MissingParameterError(item.label, "path leaf has no availability")

    n_chunks = -(-trials // CHUNK_TRIALS)
    sizes = [CHUNK_TRIALS] * (n_chunks - 1) + [trials - CHUNK_TRIALS * (n_chunks - 1)]
    streams = np.random.SeedSequence(seed).spawn(n_chunks)

    def run(index: int) -> int:
        rng = np.random.Generator(np.random.PCG64(streams[index]))
        return int(np.count_nonzero(_trial_block(model, rng, sizes[index])))

    if workers > 1 and n_chunks > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            up_counts = list(pool.map(run, range(n_chunks)))
    else:
        up_counts = [run(index) for index in range(n_chunks)]

    estimate = sum(up_counts) / trials
    half_width = 1.96 * math.sqrt(estimate * (1 - estimate) / trials)
    logger.debug("simulated %d trials in %d chunk(s), seed %d: %.6f", trials, n_chunks, seed, estimate)
    return SimulationResult(estimate=estimate, half_width=half_width, trials=trials, seed=seed)
