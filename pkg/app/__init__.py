"""Tenyidie grapheme-level syllabification toolkit."""

__version__ = "1.0.0"
