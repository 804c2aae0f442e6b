from typing import Optional


class XWebError(Exception):
    """Base class for every error raised by the toolkit."""


class ParameterError(XWebError, ValueError):
    """Invalid generation, workload, driver or CLI parameter."""


class ModelError(XWebError):
    """Warehouse model fails validation."""

    def __init__(self, diagnostics: list[str]):
        self.diagnostics = list(diagnostics)
        super().__init__("invalid warehouse model: " + "; ".join(self.diagnostics))


class TaxonomyError(XWebError):
    """Taxonomy file cannot be parsed or violates a taxonomy invariant."""

    def __init__(self, message: str, category: Optional[str] = None, line: Optional[int] = None):
        self.category = category
        self.line = line
        super().__init__(message)


class EmissionError(XWebError):
    """A dimension instance cannot be written (orphan parent, missing attribute)."""


class DocumentParseError(XWebError):
    """Malformed warehouse document."""

    def __init__(self, message: str, path: str = "<bytes>", line: int = 0, column: int = 0):
        self.path = path
        self.line = line
        self.column = column
        super().__init__(f"{path}:{line}:{column}: {message}")


class RenderError(XWebError):
    """Query definition cannot be rendered as XQuery text."""


class EvaluationError(XWebError):
    """Query definition cannot be evaluated over a warehouse."""


class SinkError(XWebError):
    """The fact consumer failed while facts were being generated."""

    def __init__(self, message: str, emitted: int):
        self.emitted = emitted
        super().__init__(f"{message} (after {emitted} facts)")


class DriverError(XWebError):
    """Backend rejected a request or could not be reached."""

    def __init__(self, message: str, partial=None):
        # partial: LoadReport with the documents loaded before the failure
        self.partial = partial
        super().__init__(message)


class DriverTimeout(DriverError):
    """Backend did not answer a query within the per-query timeout."""


class ReportError(XWebError):
    """A run report file is missing or corrupt."""

    def __init__(self, path: str, reason: str):
        self.path = path
        super().__init__(f"{path}: {reason}")
