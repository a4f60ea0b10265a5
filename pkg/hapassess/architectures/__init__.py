"""
Backhaul architectures.

One assessor per architecture kind, all producing an AssessmentReport.
"""

from .base import (
    AssessmentReport,
    BaseArchitecture,
    OfferAvailability,
    assess,
    get_architecture,
)
from .hap_direct import HapDirectArchitecture
from .integrated import IntegratedArchitecture
from .satellite import SatelliteArchitecture

ARCHITECTURE_KINDS: dict[str, type[BaseArchitecture]] = {
    "satellite": SatelliteArchitecture,
    "hap_direct": HapDirectArchitecture,
    "integrated": IntegratedArchitecture,
}

__all__ = [
    "ARCHITECTURE_KINDS",
    "AssessmentReport",
    "BaseArchitecture",
    "OfferAvailability",
    "assess",
    "get_architecture",
    "HapDirectArchitecture",
    "IntegratedArchitecture",
    "SatelliteArchitecture",
]
