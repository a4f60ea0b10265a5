"""
Shared fixtures and hypothesis profiles.
"""

import os
import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from hapassess.scenario import Scenario, bundled_scenario_path, load_scenario
from hapassess.types import AssessmentSettings

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("fast", max_examples=20, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.getenv("HYPOTHESIS_PROFILE", "default"))

GOLDEN_DIR = Path(__file__).parent / "golden"


@pytest.fixture(scope="session")
def scenario() -> Scenario:
    """The bundled case study, validated."""
    return load_scenario(bundled_scenario_path())


@pytest.fixture
def document() -> dict:
    """A fresh parsed copy of the bundled scenario document."""
    return tomllib.loads(bundled_scenario_path().read_text(encoding="utf-8"))


@pytest.fixture
def undiscounted() -> AssessmentSettings:
    return AssessmentSettings(discount_rate=0)


def architecture_entry(document: dict, arch_id: str) -> dict:
    """The ``[[architectures]]`` table with ``id == arch_id``."""
    return next(entry for entry in document["architectures"] if entry["id"] == arch_id)
