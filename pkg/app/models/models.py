"""
SQLAlchemy models for the run ledger
"""

from sqlalchemy import Column, DateTime, Float, Integer, String, Text
from sqlalchemy.orm import declarative_base
from sqlalchemy.sql import func

Base = declarative_base()


class RunRecord(Base):
    """One artifact-producing command invocation."""
    __tablename__ = "runs"

    id = Column(Integer, primary_key=True, index=True)
    command = Column(String(32), nullable=False, index=True)
    seed = Column(Integer, nullable=True)
    toolkit_version = Column(String(32), nullable=False)
    wall_time_s = Column(Float, nullable=False, default=0.0)
    out_dir = Column(String(512), nullable=True)
    manifest_json = Column(Text, nullable=False)
    created_at = Column(DateTime(timezone=True), server_default=func.now())
