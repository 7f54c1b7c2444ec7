"""Analysis subpackage for QCP: exact references for the simulated protocols."""

__all__ = ["oracle"]
