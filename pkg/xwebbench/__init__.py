"""XWeB XML data warehouse benchmark toolkit."""

__version__ = "1.0.0"
