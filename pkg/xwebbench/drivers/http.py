import logging
from pathlib import Path
from typing import Dict, Optional, Union

import requests
from dotenv import dotenv_values
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from xwebbench.drivers.base import Driver, QueryOutcome
from xwebbench.engine.results import QueryResult
from xwebbench.errors import DriverError, DriverTimeout, ParameterError
from xwebbench.workload.queries import QuerySpec

logger = logging.getLogger(__name__)

_METHODS = {"GET", "POST", "PUT", "PATCH"}


class HttpDriverConfig(BaseModel):
    """
    Where and how to reach a REST-style XML database.

    load_path must contain {name}, query_path must contain {query_id}.
    auth_header is a complete header line ("Authorization: Basic ...").
    """
    model_config = ConfigDict(frozen=True)

    base_url: str
    load_method: str = "PUT"
    load_path: str = "/documents/{name}"
    query_method: str = "POST"
    query_path: str = "/queries/{query_id}"
    reset_path: str = "/reset"
    auth_header: Optional[str] = None
    comparable_rows: bool = False
    request_timeout: float = Field(default=60.0, gt=0)

    @field_validator("base_url")
    @classmethod
    def _strip_slash(cls, value: str) -> str:
        if not value.startswith(("http://", "https://")):
            raise ValueError(f"base_url must be an http(s) URL, got {value!r}")
        return value.rstrip("/")

    @field_validator("load_method", "query_method")
    @classmethod
    def _method(cls, value: str) -> str:
        method = value.upper()
        if method not in _METHODS:
            raise ValueError(f"unsupported HTTP method {value!r}")
        return method

    @field_validator("load_path")
    @classmethod
    def _load_path(cls, value: str) -> str:
        if "{name}" not in value:
            raise ValueError("load_path must contain {name}")
        return value

    @field_validator("query_path")
    @classmethod
    def _query_path(cls, value: str) -> str:
        if "{query_id}" not in value:
            raise ValueError("query_path must contain {query_id}")
        return value

    @field_validator("auth_header")
    @classmethod
    def _auth(cls, value: Optional[str]) -> Optional[str]:
        if value and ":" not in value:
            raise ValueError("auth_header must look like 'Name: value'")
        return value or None

    @classmethod
    def from_file(cls, path: Union[str, Path]) -> "HttpDriverConfig":
        """
        Read a KEY=value driver config file (BASE_URL, LOAD_METHOD, LOAD_PATH,
        QUERY_METHOD, QUERY_PATH, RESET_PATH, AUTH_HEADER, COMPARABLE_ROWS,
        REQUEST_TIMEOUT).
        """
        path = Path(path)
        if not path.is_file():
            raise ParameterError(f"driver config {path} not found")
        values = {key.lower(): value for key, value in dotenv_values(path).items() if value is not None}
        return cls.create(**values)

    @classmethod
    def create(cls, **values) -> "HttpDriverConfig":
        try:
            return cls(**values)
        except ValidationError as e:
            raise ParameterError(
                "driver config: " + "; ".join(f"{'.'.join(map(str, i['loc']))}: {i['msg']}" for i in e.errors())
            ) from e

    def headers(self) -> Dict[str, str]:
        if not self.auth_header:
            return {}
        name, _, value = self.auth_header.partition(":")
        return {name.strip(): value.strip()}


class HttpDriver(Driver):
    """Generic adapter for XML databases exposing documents and queries over HTTP."""

    name = "http"

    def __init__(self, config: HttpDriverConfig, session: Optional[requests.Session] = None):
        self.config = config
        self.comparable_rows = config.comparable_rows
        self.session = session or requests.Session()
        self.session.headers.update(config.headers())

    def _send(
        self, method: str, path: str, body: bytes, content_type: str, timeout: Optional[float] = None,
    ) -> requests.Response:
        url = self.config.base_url + path
        limit = timeout or self.config.request_timeout
        try:
            response = self.session.request(
                method, url, data=body, headers={"Content-Type": content_type},
                timeout=limit,
            )
        except requests.Timeout as e:
            raise DriverTimeout(f"{method} {url}: no answer within {limit} s") from e
        except requests.RequestException as e:
            raise DriverError(f"{method} {url}: {e}") from e
        if response.status_code >= 400:
            raise DriverError(f"{method} {url}: HTTP {response.status_code}: {response.text[:200]}")
        return response

    def load_document(self, name: str, data: bytes) -> None:
        self._send(self.config.load_method, self.config.load_path.format(name=name), data, "application/xml")
        logger.debug("loaded %s (%d bytes)", name, len(data))

    def execute_query(self, query: QuerySpec, text: str) -> QueryOutcome:
        response = self._send(
            self.config.query_method,
            self.config.query_path.format(query_id=query.id),
            text.encode("utf-8"),
            "application/xquery",
            timeout=min(self.config.request_timeout, self.query_timeout or self.config.request_timeout),
        )
        if not self.comparable_rows:
            return QueryOutcome(payload=response.text)
        try:
            return QueryOutcome(result=QueryResult.from_payload(response.json()), payload=response.text)
        except ValueError as e:
            logger.warning("%s: response is not a row payload (%s)", query.id, e)
            return QueryOutcome(payload=response.text)

    def reset(self) -> None:
        if self.config.reset_path:
            self._send("POST", self.config.reset_path, b"", "text/plain")

    def close(self) -> None:
        self.session.close()
