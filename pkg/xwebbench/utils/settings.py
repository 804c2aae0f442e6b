import logging
import os
from pathlib import Path
from typing import Any, Callable, Dict, Optional, TypeVar, Union

from dotenv import dotenv_values, load_dotenv

from xwebbench.errors import ParameterError

ENV_PREFIX = "XWEB_"
LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"

T = TypeVar("T")


def read_config_file(path: Union[str, Path]) -> Dict[str, str]:
    """
    Read a KEY=value file (# comments allowed); keys are upper-cased.

    Raises:
        ParameterError: the file does not exist
    """
    path = Path(path)
    if not path.is_file():
        raise ParameterError(f"config file {path} not found")
    return {key.upper(): value for key, value in dotenv_values(path).items() if value is not None}


def parse_bool(text: str) -> bool:
    value = text.strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


class Settings:
    """
    Resolves one setting from, in order of precedence: an explicit command-line
    value, the config file, the XWEB_<NAME> environment variable, the default.
    """

    def __init__(self, config_file: Optional[Union[str, Path]] = None, environ: Optional[Dict[str, str]] = None):
        self.file_values = read_config_file(config_file) if config_file else {}
        self.environ = os.environ if environ is None else environ

    def get(self, name: str, flag: Optional[T] = None, default: Any = None, cast: Callable[[str], T] = str) -> T:
        if flag is not None:
            return flag
        key = name.upper()
        raw = self.file_values.get(key)
        origin = "config file"
        if raw is None:
            raw = self.environ.get(ENV_PREFIX + key)
            origin = f"environment variable {ENV_PREFIX}{key}"
        if raw is None:
            return default
        try:
            return cast(raw)
        except ValueError as e:
            raise ParameterError(f"{key} from {origin}: {e}") from e


def configure_logging(verbosity: int = 0, environ: Optional[Dict[str, str]] = None) -> int:
    """
    Set up root logging once for the command line.

    XWEB_LOG_LEVEL picks the base level (default INFO); each -v lowers it by
    one step, each -q raises it.
    """
    environ = os.environ if environ is None else environ
    base = logging.getLevelName(environ.get(ENV_PREFIX + "LOG_LEVEL", "INFO").upper())
    if not isinstance(base, int):
        base = logging.INFO
    level = min(max(base - 10 * verbosity, logging.DEBUG), logging.CRITICAL)
    logging.basicConfig(level=level, format=LOG_FORMAT, force=True)
    return level


def load_environment(path: Optional[Union[str, Path]] = None) -> bool:
    """Load a .env file into the process environment without overriding it."""
    return load_dotenv(dotenv_path=path, override=False)
