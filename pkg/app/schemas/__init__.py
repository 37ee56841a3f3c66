"""Validated data shapes shared across the toolkit."""
