"""
Service layer for the run ledger
"""

import logging
from pathlib import Path
from typing import List, Optional, Union

from sqlalchemy.exc import SQLAlchemyError
from sqlalchemy.orm import Session

from app.db.database import db_session
from app.models.models import RunRecord
from app.schemas.reports import RunManifest

logger = logging.getLogger(__name__)


class RunRegistry:
    """Service class for run ledger operations."""

    @staticmethod
    def record_run(db: Session, manifest: RunManifest, out_dir: Optional[Union[str, Path]] = None) -> RunRecord:
        record = RunRecord(
            command=manifest.command,
            seed=manifest.seed,
            toolkit_version=manifest.toolkit_version,
            wall_time_s=manifest.wall_time_s,
            out_dir=str(out_dir) if out_dir is not None else None,
            manifest_json=manifest.model_dump_json(),
        )
        db.add(record)
        db.commit()
        db.refresh(record)
        return record

    @staticmethod
    def list_runs(db: Session, limit: int = 20, command: Optional[str] = None) -> List[RunRecord]:
        """Most recent first."""
        query = db.query(RunRecord)
        if command:
            query = query.filter(RunRecord.command == command)
        return query.order_by(RunRecord.id.desc()).limit(limit).all()


def record_manifest(
    manifest: RunManifest, out_dir: Optional[Union[str, Path]] = None, database_url: Optional[str] = None
) -> Optional[int]:
    """Best-effort ledger insert; returns the run id, or None when the ledger is unavailable."""
    try:
        with db_session(database_url) as db:
            return RunRegistry.record_run(db, manifest, out_dir).id
    except (SQLAlchemyError, OSError) as e:
        logger.warning("Run ledger unavailable, %s run not recorded: %s", manifest.command, e)
    return None
