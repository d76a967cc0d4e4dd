"""Environment configuration and logging setup."""

import logging
import sys
from pathlib import Path

import pytest

# Add src to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from brstbench.config import Config, get_config, load_config, reset_config, validate_config
from brstbench.log import ROOT_LOGGER, configure_logging


@pytest.fixture(autouse=True)
def fresh_config():
    reset_config()
    yield
    reset_config()


def test_defaults():
    config = Config()
    assert config.max_jet_order == 8
    assert config.degree_bound == 2
    assert config.target_rdeg == 4
    assert config.log_level == "WARNING"
    assert not config.log_json


def test_environment_overrides(monkeypatch):
    monkeypatch.setenv("WORKBENCH_DEGREE_BOUND", "3")
    monkeypatch.setenv("WORKBENCH_LOG_LEVEL", "debug")
    monkeypatch.setenv("WORKBENCH_LOG_JSON", "yes")
    config = get_config()
    assert config.degree_bound == 3
    assert config.log_level == "DEBUG"
    assert config.log_json
    assert get_config() is config


def test_unparseable_integers_fall_back(monkeypatch):
    monkeypatch.setenv("WORKBENCH_TARGET_RDEG", "many")
    assert load_config().target_rdeg == 4


def test_validation():
    validate_config(Config())
    with pytest.raises(ValueError):
        validate_config(Config(degree_bound=-1))
    with pytest.raises(ValueError):
        validate_config(Config(max_jet_order=0))
    with pytest.raises(ValueError):
        validate_config(Config(log_level="LOUD"))


def test_text_logging():
    logger = configure_logging(Config(log_level="INFO"))
    assert logger.name == ROOT_LOGGER
    assert logger.level == logging.INFO
    assert len(logger.handlers) == 1
    assert not logger.handlers[0].formatter.__class__.__name__.startswith("Json")


def test_json_logging_replaces_the_handler():
    configure_logging(Config())
    logger = configure_logging(Config(log_json=True))
    assert len(logger.handlers) == 1
    assert logger.handlers[0].formatter.__class__.__name__ == "JsonFormatter"
