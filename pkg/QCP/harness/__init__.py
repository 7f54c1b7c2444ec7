"""Harness subpackage for QCP: trial configuration, fan-out, tables and output."""

__all__ = ["config", "trials", "tables", "output"]
