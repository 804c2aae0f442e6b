from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Optional

from xwebbench.engine.results import QueryResult
from xwebbench.workload.queries import QuerySpec


@dataclass
class QueryOutcome:
    """
    What a backend answered.

    result is set when the backend returns rows the harness can compare;
    otherwise payload holds the raw response.
    """
    result: Optional[QueryResult] = None
    payload: Optional[str] = None


class Driver(ABC):
    """
    A backend under test.

    Calls are made serially by the harness, which times each one with its
    own clock; drivers do not measure themselves.
    """

    name: str = "driver"
    comparable_rows: bool = False
    # seconds a single query may take; set by the harness before the runs
    query_timeout: Optional[float] = None

    def set_query_timeout(self, seconds: Optional[float]) -> None:
        """Drivers that can abort a call on their own should honour this bound."""
        self.query_timeout = seconds

    @abstractmethod
    def load_document(self, name: str, data: bytes) -> None:
        """
        Ship one warehouse document. Returning means the backend acknowledged it.

        Raises:
            DriverError: the backend rejected the document or cannot be reached
        """

    @abstractmethod
    def execute_query(self, query: QuerySpec, text: str) -> QueryOutcome:
        """
        Run one workload query.

        Args:
            query: The declarative query
            text: The same query rendered as XQuery

        Raises:
            DriverError: the backend failed to answer
        """

    def reset(self) -> None:
        """Drop loaded documents so the next load starts from scratch."""

    def close(self) -> None:
        pass

    def __enter__(self) -> "Driver":
        return self

    def __exit__(self, *exc) -> bool:
        self.close()
        return False
