"""Pytest configuration and shared fixtures.

Every test gets fresh global settings, logger and cover cache, with logs
written under a temporary directory.
"""

from collections.abc import Iterator
from pathlib import Path

import pytest

from src.cache import reset_cover_cache
from src.config import Settings, reset_settings
from src.logging_config import MetaplecticLogger, reset_logger
from src.metaplectic_cocycle import make_params
from src.models import CocycleParams
from src.torus_cover import CoverGroup, build_cover


@pytest.fixture
def test_settings(tmp_path: Path) -> Settings:
    """Create test settings with safe defaults.

    Returns:
        Test settings instance
    """
    return Settings(
        budget=2_000_000,
        default_seed=7,
        sample_size=200,
        workers=2,
        logs_dir=tmp_path / "logs",
    )


@pytest.fixture
def test_logger(test_settings: Settings) -> Iterator[MetaplecticLogger]:
    """Create test logger, detaching its handlers afterwards.

    Args:
        test_settings: Test settings fixture
    """
    logger = MetaplecticLogger("TestMetaplectic", test_settings)
    yield logger
    for handler in logger.logger.handlers[:]:
        logger.logger.removeHandler(handler)
        handler.close()


@pytest.fixture(autouse=True)
def isolate_globals(
    tmp_path: Path, monkeypatch: pytest.MonkeyPatch
) -> Iterator[None]:
    """Point the global settings at a temporary log directory and reset state."""
    monkeypatch.setenv("METAPLECTIC_LOGS_DIR", str(tmp_path / "global_logs"))
    reset_settings()
    reset_logger()
    reset_cover_cache()
    yield
    reset_settings()
    reset_logger()
    reset_cover_cache()


@pytest.fixture
def params_2_2() -> CocycleParams:
    """Double cover of GL(2) over F_3."""
    return make_params(2, 3, 0, 2)


@pytest.fixture
def cover_2_2(params_2_2: CocycleParams) -> CoverGroup:
    return build_cover(params_2_2)
