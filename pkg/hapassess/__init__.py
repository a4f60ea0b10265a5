"""
hapassess - Techno-economics of rural backhaul over satellite and HAPs

A deterministic engine that:
• Dimensions satellite spectrum and high-altitude-platform fleets
• Rolls up CAPEX/OPEX and per-subscriber cost against ARPU
• Evaluates path availability analytically and by seeded Monte Carlo
• Forecasts wholesale link income with NPV/IRR

Basic usage:
    >>> from hapassess import assess, load_scenario, bundled_scenario_path
    >>>
    >>> scenario = load_scenario(bundled_scenario_path())
    >>> report = assess(scenario, "hap-2a")
    >>> print(report.per_subscriber_monthly.label("eur", 2))
    9.44 €
"""

__version__ = "0.1.0"
__license__ = "MIT"

from .architectures import ARCHITECTURE_KINDS, AssessmentReport, assess, get_architecture
from .catalog import PLATFORMS, WHOLESALE_OFFERS
from .errors import HapAssessError
from .scenario import Scenario, bundled_scenario_path, load_scenario, validate_scenario
from .types import Area, AssessmentSettings, Availability, DataRate, Money

__all__ = [
    "ARCHITECTURE_KINDS",
    "AssessmentReport",
    "assess",
    "get_architecture",
    "PLATFORMS",
    "WHOLESALE_OFFERS",
    "HapAssessError",
    "Scenario",
    "bundled_scenario_path",
    "load_scenario",
    "validate_scenario",
    "Area",
    "AssessmentSettings",
    "Availability",
    "DataRate",
    "Money",
]
