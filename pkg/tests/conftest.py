from __future__ import annotations

from pathlib import Path

import pytest

from fnkit import demo
from fnkit.integration import ComponentTopology, load_platform
from fnkit.replay import load_trace
from fnkit.signals import load_catalog
from fnkit.workflow import configure, load_function_models

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture(scope="session")
def demo_models():
    return load_function_models(demo.function_files())


@pytest.fixture(scope="session")
def demo_catalog():
    return load_catalog(demo.data_file("catalog.json"))


@pytest.fixture(scope="session")
def demo_configured(demo_models):
    platform = load_platform(demo.data_file("platform.json"))
    topology = ComponentTopology.load(demo.data_file("topology.json"))
    return configure(demo_models, platform, topology, demo.ADAPTED_COMPONENTS)


@pytest.fixture(scope="session")
def demo_integration(demo_configured):
    return demo_configured[0]


@pytest.fixture(scope="session")
def demo_artifacts(demo_configured):
    return demo_configured[1]


@pytest.fixture(scope="session")
def demo_manifests(demo_artifacts):
    return [a.manifest for a in demo_artifacts.values()]


@pytest.fixture(scope="session")
def demo_signals(demo_catalog):
    return load_trace(demo.data_file(demo.TRACE_FILE), demo_catalog)


# one verdict line per acceptance criterion, filled in by test_acceptance
ACCEPTANCE: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[n])
