import csv
import io
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal, InvalidOperation
from typing import Any, Dict, List, Sequence, Tuple, Union

Cell = Union[int, Decimal, str]
Row = Tuple[Cell, ...]

CENT = Decimal("0.01")


@dataclass
class QueryResult:
    """
    Rows of one query: grouping values first, then aggregate values, in the
    order given by columns. Rows are kept in result order.
    """
    columns: Tuple[str, ...]
    rows: List[Row] = field(default_factory=list)

    def to_payload(self) -> Dict[str, Any]:
        """JSON-safe form; numbers are rendered as strings so decimals stay exact."""
        return {
            "columns": list(self.columns),
            "rows": [[_text(cell) for cell in row] for row in self.rows],
        }

    @classmethod
    def from_payload(cls, payload: Dict[str, Any]) -> "QueryResult":
        try:
            columns = tuple(str(c) for c in payload["columns"])
            rows = [tuple(row) for row in payload["rows"]]
        except (KeyError, TypeError) as e:
            raise ValueError(f"not a result payload: {e}") from e
        for row in rows:
            if len(row) != len(columns):
                raise ValueError(f"row {row!r} has {len(row)} cells, expected {len(columns)}")
        return cls(columns=columns, rows=rows)

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([_text(cell) for cell in row])
        return buffer.getvalue()


def result_from_csv(text: str) -> QueryResult:
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise ValueError("empty result CSV") from None
    return QueryResult(columns=tuple(header), rows=[tuple(r) for r in reader])


def _text(cell: Cell) -> str:
    return str(cell)


def normalize_cell(cell: Any) -> str:
    """
    Canonical text of a result cell: numbers become decimals at cent
    precision, everything else its string form.
    """
    text = str(cell).strip()
    try:
        number = Decimal(text)
    except InvalidOperation:
        return text
    if not number.is_finite():
        return text
    return str(number.quantize(CENT, rounding=ROUND_HALF_UP))


def canonical_rows(rows: Sequence[Sequence[Any]]) -> List[Tuple[str, ...]]:
    """Rows normalized cell by cell and sorted, for order-insensitive comparison."""
    return sorted(tuple(normalize_cell(c) for c in row) for row in rows)
