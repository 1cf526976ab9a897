from sqlalchemy import Boolean, Column, DateTime, Float, ForeignKey, Integer, String, Text
from sqlalchemy.orm import relationship
from database import Base
from datetime import datetime


class BatchRun(Base):
    __tablename__ = "batch_runs"

    id = Column(Integer, primary_key=True, index=True)
    created_at = Column(DateTime, default=datetime.utcnow)
    scenario_count = Column(Integer)
    note = Column(Text)

    rows = relationship("BatchConfigRow", back_populates="batch", cascade="all, delete-orphan",
                        order_by="BatchConfigRow.id")
    episodes = relationship("EpisodeRecord", back_populates="batch", cascade="all, delete-orphan",
                            order_by="EpisodeRecord.id")


class BatchConfigRow(Base):
    __tablename__ = "batch_config_rows"

    id = Column(Integer, primary_key=True, index=True)
    batch_id = Column(Integer, ForeignKey("batch_runs.id"), index=True)
    config_id = Column(String(100))
    planner = Column(String(20))
    scorer = Column(String(20))
    episodes = Column(Integer)
    sr = Column(Float)
    spl = Column(Float)
    mean_steps = Column(Float)
    mean_path_m = Column(Float)
    rs = Column(Float)
    re = Column(Float)

    batch = relationship("BatchRun", back_populates="rows")


class EpisodeRecord(Base):
    __tablename__ = "episode_records"

    id = Column(Integer, primary_key=True, index=True)
    batch_id = Column(Integer, ForeignKey("batch_runs.id"), index=True)
    scenario = Column(String(255))
    config_id = Column(String(100))
    success = Column(Boolean)
    steps = Column(Integer)
    agent_path_length = Column(Float)
    oracle_shortest = Column(Float)
    termination = Column(String(20))
    error = Column(Text)

    batch = relationship("BatchRun", back_populates="episodes")
