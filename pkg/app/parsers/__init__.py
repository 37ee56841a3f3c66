"""Readers for corpus and inventory files."""
