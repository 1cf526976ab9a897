"""
Pydantic models for the episode API
"""

from pydantic import BaseModel, Field, model_validator
from typing import Optional, List

from semnav.core.config import EXPLORATION_COST, MAX_FRONTIERS, MAX_STEPS, ORACLE_LAMBDA, SUCCESS_COST
from semnav.core.episode_runner import EpisodeConfig, StepRecord
from semnav.core.planner import PlannerMethod
from semnav.core.scorer import ScorerKind


class EpisodeRunRequest(BaseModel):
    seed: Optional[int] = Field(None, description="Generate the scenario from this seed")
    preset: str = Field("default", pattern="^(small|default|large)$", description="Generator size preset")
    scenario_text: Optional[str] = Field(None, description="Inline scenario file contents")
    planner: PlannerMethod = PlannerMethod.LSP
    scorer: ScorerKind = ScorerKind.ORACLE
    vlm_endpoint: Optional[str] = None
    max_steps: int = Field(MAX_STEPS, ge=1, le=5000)
    rs: float = Field(SUCCESS_COST, gt=0)
    re: float = Field(EXPLORATION_COST, gt=0)
    k: int = Field(MAX_FRONTIERS, ge=1, le=12)
    oracle_lambda: float = Field(ORACLE_LAMBDA, gt=0)
    include_trace: bool = Field(False, description="Return the per-step trace")

    @model_validator(mode="after")
    def one_scenario(self):
        if (self.seed is None) == (self.scenario_text is None):
            raise ValueError("provide exactly one of seed or scenario_text")
        return self

    def to_config(self) -> EpisodeConfig:
        return EpisodeConfig(
            planner=self.planner,
            scorer=self.scorer,
            vlm_endpoint=self.vlm_endpoint,
            max_steps=self.max_steps,
            rs=self.rs,
            re=self.re,
            k=self.k,
            oracle_lambda=self.oracle_lambda,
            seed=self.seed or 0,
        )


class EpisodeRunResponse(BaseModel):
    scenario: str
    config_id: str
    success: bool
    steps: int
    agent_path_length: float
    reachable: bool
    oracle_shortest: Optional[float] = Field(None, description="Null when no target is reachable")
    spl: float
    termination: str
    error: Optional[str] = None
    trace: Optional[List[StepRecord]] = None
