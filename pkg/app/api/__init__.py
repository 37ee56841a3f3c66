"""Command-line surface: argument parsing and command handlers."""
