"""UI subpackage for QCP."""

__all__ = ["cli"]
