"""
Run-ledger database configuration and session management
"""

from contextlib import contextmanager
from functools import lru_cache
from pathlib import Path
from typing import Iterator, Optional

from sqlalchemy import create_engine
from sqlalchemy.engine import Engine, make_url
from sqlalchemy.orm import Session, sessionmaker

from app.core.config import settings


@lru_cache(maxsize=None)
def get_engine(database_url: Optional[str] = None) -> Engine:
    """Engine for the ledger; SQLite parent directories are created on demand."""
    url = make_url(database_url or settings.database_url)
    if url.get_backend_name() == "sqlite" and url.database and url.database != ":memory:":
        Path(url.database).parent.mkdir(parents=True, exist_ok=True)
    engine = create_engine(url)

    from app.models.models import Base
    Base.metadata.create_all(bind=engine)
    return engine


def session_factory(database_url: Optional[str] = None) -> sessionmaker:
    return sessionmaker(autocommit=False, autoflush=False, bind=get_engine(database_url))


def get_db(database_url: Optional[str] = None) -> Iterator[Session]:
    """Yield a session and always close it."""
    db = session_factory(database_url)()
    try:
        yield db
    finally:
        db.close()


db_session = contextmanager(get_db)
