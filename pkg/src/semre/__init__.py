"""Matching engine for regular expressions refined by external oracles."""

__version__ = "0.1.0"
