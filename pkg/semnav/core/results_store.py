"""
Results store - persists batch summaries and per-episode outcomes
"""

import logging
from typing import List, Optional

from sqlalchemy.orm import Session

from models import BatchConfigRow, BatchRun, EpisodeRecord
from semnav.core.batch_runner import BatchSummary

logger = logging.getLogger(__name__)


def save_batch(db: Session, summary: BatchSummary, note: Optional[str] = None) -> int:
    """
    Store a batch summary with its episode outcomes

    Returns:
        The new batch id
    """
    batch = BatchRun(scenario_count=summary.scenario_count, note=note)
    batch.rows = [
        BatchConfigRow(
            config_id=row.config_id,
            planner=row.planner,
            scorer=row.scorer,
            episodes=row.episodes,
            sr=row.SR,
            spl=row.SPL,
            mean_steps=row.mean_steps,
            mean_path_m=row.mean_path_m,
            rs=row.rs,
            re=row.re,
        )
        for row in summary.rows
    ]
    batch.episodes = [
        EpisodeRecord(
            scenario=r.scenario,
            config_id=r.config_id,
            success=r.success,
            steps=r.steps,
            agent_path_length=r.agent_path_length,
            oracle_shortest=r.oracle_shortest,
            termination=r.termination.value,
            error=r.error,
        )
        for r in summary.results
    ]
    db.add(batch)
    db.commit()
    db.refresh(batch)
    logger.info("stored batch %d (%d configs, %d episodes)", batch.id, len(batch.rows), len(batch.episodes))
    return batch.id


def get_batch(db: Session, batch_id: int) -> Optional[BatchRun]:
    return db.query(BatchRun).filter(BatchRun.id == batch_id).first()


def list_batches(db: Session, skip: int = 0, limit: int = 100) -> List[BatchRun]:
    return db.query(BatchRun).order_by(BatchRun.id.desc()).offset(skip).limit(limit).all()


def count_batches(db: Session) -> int:
    return db.query(BatchRun).count()
