import math
import statistics
from typing import Sequence

from pydantic import BaseModel, ConfigDict

from xwebbench.errors import ParameterError


class Stats(BaseModel):
    """Response-time summary over a set of executions, in milliseconds."""
    model_config = ConfigDict(frozen=True)

    count: int
    global_ms: float
    avg_ms: float
    min_ms: float
    max_ms: float
    stddev_ms: float


def compute_stats(durations: Sequence[float]) -> Stats:
    """
    Global (sum), average, minimum, maximum and population standard deviation.

    Raises:
        ParameterError: durations is empty
    """
    if not durations:
        raise ParameterError("compute_stats: no durations")
    values = [float(d) for d in durations]
    low, high = min(values), max(values)
    # the float mean can land an ulp outside [min, max]
    mean = min(max(statistics.fmean(values), low), high)
    return Stats(
        count=len(values),
        global_ms=math.fsum(values),
        avg_ms=mean,
        min_ms=low,
        max_ms=high,
        stddev_ms=statistics.pstdev(values),
    )
