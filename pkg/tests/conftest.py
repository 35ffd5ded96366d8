"""Shared fixtures: the packaged corpus and a CLI runner."""

from __future__ import annotations

from pathlib import Path

import pytest
from click.testing import CliRunner

from haiproto import Catalog, load

FIXTURES = Path(__file__).resolve().parent.parent / "src" / "haiproto" / "fixtures"
AGENTS_DIR = FIXTURES / "agents"


@pytest.fixture(scope="session")
def catalog() -> Catalog:
    return load([FIXTURES])


@pytest.fixture()
def runner() -> CliRunner:
    return CliRunner()
