"""Yotta trustless data market package."""

__version__ = "1.0.0"
