import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from kbqa.config import ServiceConfig
from kbqa.engine import Engine


@pytest.fixture
def bundled_config() -> ServiceConfig:
    """Defaults: bundled data, mock embedder, scripted generator."""
    return ServiceConfig(auth_token="test-token")


@pytest.fixture
def engine(bundled_config) -> Engine:
    return Engine(bundled_config)


@pytest.fixture
def client(engine):
    from fastapi.testclient import TestClient

    from kbqa.service import create_app

    with TestClient(create_app(engine), raise_server_exceptions=False) as c:
        yield c
