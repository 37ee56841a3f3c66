"""SQLite run ledger engine and sessions."""
