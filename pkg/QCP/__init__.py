"""QCP package initializer."""

__all__ = ["protocol", "analysis", "harness", "ui", "config"]
