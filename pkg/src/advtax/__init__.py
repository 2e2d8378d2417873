"""Taxonomy engine and scenario toolkit for adversarial AV events."""

__version__ = "0.1.0"
