"""Settings, error types, logging setup and the grapheme alphabet."""
