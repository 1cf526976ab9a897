"""
Pydantic models for the batch API
"""

from pydantic import BaseModel, Field
from typing import Optional, List
from datetime import datetime

from semnav.core.config import MAX_FRONTIERS, MAX_STEPS
from semnav.core.planner import PlannerMethod
from semnav.core.scorer import ScorerKind


class BatchRunRequest(BaseModel):
    seeds: str = Field("0..9", description="Inclusive seed range A..B")
    preset: str = Field("default", pattern="^(small|default|large)$")
    planners: List[PlannerMethod] = Field(default_factory=lambda: [PlannerMethod.LSP, PlannerMethod.GREEDY], min_length=1)
    scorer: ScorerKind = Field(ScorerKind.ORACLE, description="mock or oracle; external is CLI-only")
    rs: List[float] = Field(default_factory=lambda: [3.0], min_length=1)
    re: List[float] = Field(default_factory=lambda: [6.0], min_length=1)
    max_steps: int = Field(MAX_STEPS, ge=1, le=5000)
    k: int = Field(MAX_FRONTIERS, ge=1, le=12)
    note: Optional[str] = Field(None, max_length=500)


class BatchRowResponse(BaseModel):
    config_id: str
    planner: str
    scorer: str
    episodes: int
    sr: float
    spl: float
    mean_steps: float
    mean_path_m: float
    rs: float
    re: float

    class Config:
        from_attributes = True


class BatchResponse(BaseModel):
    batch_id: int
    created_at: datetime
    scenario_count: int
    note: Optional[str]
    rows: List[BatchRowResponse]


class BatchListResponse(BaseModel):
    total: int
    batches: List[BatchResponse]
