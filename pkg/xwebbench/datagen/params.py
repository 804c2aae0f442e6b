from fractions import Fraction
from typing import Any, Dict

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from xwebbench.errors import ParameterError


class GenParams(BaseModel):
    """
    Generation parameters.

    sf and scale_divisor size the dimensions (TPC-H cardinalities times sf,
    shrunk by scale_divisor for desk-scale runs); density is the Bernoulli
    retention probability of each candidate fact; p_missing and p_reorder are
    the dirtiness knobs. hot_fraction and hot_width configure the skewed
    measure distribution.
    """
    model_config = ConfigDict(frozen=True)

    sf: float = Field(default=1.0, gt=0)
    density: float = Field(gt=0, le=1)
    p_missing: float = Field(default=0.0, ge=0, le=1)
    p_reorder: float = Field(default=0.0, ge=0, le=1)
    seed: int = Field(default=42, ge=0, lt=2**64)
    scale_divisor: int = Field(default=1000, gt=0)
    hot_fraction: float = Field(default=0.8, ge=0, le=1)
    hot_width: float = Field(default=0.1, gt=0, le=1)

    @classmethod
    def create(cls, **values: Any) -> "GenParams":
        """Build parameters, reporting validation failures as ParameterError."""
        try:
            return cls(**values)
        except ValidationError as e:
            raise ParameterError(_summarize(e)) from e

    def scaled(self, base: int) -> Fraction:
        """Unrounded cardinality of a table with TPC-H base cardinality `base`."""
        return Fraction(base) * Fraction(str(self.sf)) / self.scale_divisor

    def echo(self) -> Dict[str, Any]:
        return self.model_dump()


def _summarize(error: ValidationError) -> str:
    parts = []
    for item in error.errors():
        location = ".".join(str(p) for p in item["loc"]) or "value"
        parts.append(f"{location}: {item['msg']}")
    return "; ".join(parts)
