"""ORM rows for the run ledger."""
