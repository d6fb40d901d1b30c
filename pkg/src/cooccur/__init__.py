"""Co-occurrence detection between semi-interval events in archived event streams."""

__version__ = "0.1.0"
