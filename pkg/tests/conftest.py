import pathlib

import pytest

from voicebot.server.schema import load_schema_file

ROOT = pathlib.Path(__file__).resolve().parent.parent
DEMO = ROOT / "demo"


@pytest.fixture(scope="session")
def demo_dir():
    return DEMO


@pytest.fixture(scope="session")
def demo_schema():
    return load_schema_file(DEMO / "schema.json")
