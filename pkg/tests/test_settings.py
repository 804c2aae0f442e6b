import logging

import pytest

from xwebbench.errors import ParameterError
from xwebbench.utils.settings import Settings, configure_logging, parse_bool, read_config_file


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "xweb.conf"
    path.write_text("# defaults\nnrun=5\nTIMEOUT=2.5\nVERIFY=yes\nSEED=abc\n")
    return path


def test_keys_are_upper_cased(config_file):
    assert read_config_file(config_file) == {"NRUN": "5", "TIMEOUT": "2.5", "VERIFY": "yes", "SEED": "abc"}


def test_missing_file(tmp_path):
    with pytest.raises(ParameterError, match="not found"):
        Settings(tmp_path / "absent.conf")


def test_precedence(config_file):
    settings = Settings(config_file, environ={"XWEB_NRUN": "9", "XWEB_BLOCKS": "RE"})
    assert settings.get("nrun", 1, 3, int) == 1
    assert settings.get("nrun", None, 3, int) == 5
    assert settings.get("blocks") == "RE"
    assert settings.get("report_dir", None, "reports") == "reports"
    assert settings.get("verify", None, False, parse_bool) is True


def test_bad_value_names_its_origin(config_file):
    settings = Settings(config_file, environ={"XWEB_DENSITY": "high"})
    with pytest.raises(ParameterError, match="config file"):
        settings.get("seed", cast=int)
    with pytest.raises(ParameterError, match="XWEB_DENSITY"):
        settings.get("density", cast=float)


@pytest.mark.parametrize("text,expected", [("1", True), ("On", True), ("false", False), (" no ", False)])
def test_parse_bool(text, expected):
    assert parse_bool(text) is expected


def test_parse_bool_rejects_other_text():
    with pytest.raises(ValueError):
        parse_bool("maybe")


@pytest.mark.parametrize("environ,verbosity,expected", [
    ({}, 0, logging.INFO),
    ({}, 1, logging.DEBUG),
    ({}, 5, logging.DEBUG),
    ({}, -1, logging.WARNING),
    ({"XWEB_LOG_LEVEL": "error"}, 0, logging.ERROR),
    ({"XWEB_LOG_LEVEL": "error"}, -9, logging.CRITICAL),
    ({"XWEB_LOG_LEVEL": "chatty"}, 0, logging.INFO),
])
def test_configure_logging(environ, verbosity, expected):
    assert configure_logging(verbosity, environ) == expected
    assert logging.getLogger().level == expected
