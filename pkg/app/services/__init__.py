"""Syllabification, statistics, evaluation and persistence services."""
