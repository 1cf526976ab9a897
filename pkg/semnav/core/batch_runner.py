"""
Batch runner - every (scenario, configuration) pair, aggregated per configuration
"""

import itertools
import logging
import math
import os
import re
from concurrent.futures import ProcessPoolExecutor
from typing import Iterable, List, Optional, Sequence, Tuple

import httpx
from pydantic import BaseModel, ConfigDict, model_validator

from semnav.core.episode_runner import (
    MIN_ORACLE_PATH,
    EpisodeConfig,
    EpisodeResult,
    Termination,
    build_scorer,
    run_episode,
)
from semnav.core.exceptions import BatchUsageError
from semnav.core.gridworld import WorldSpec
from semnav.core.metrics import compute_metrics
from semnav.core.planner import PlannerMethod
from semnav.core.scenario_generator import ScenarioParams, generate_scenario
from semnav.core.scenario_io import load_scenario
from semnav.utils.data_exporter import export_summary_csv, export_traces_jsonl

logger = logging.getLogger(__name__)

_SEED_RANGE = re.compile(r"^\s*(-?\d+)\s*(?:\.\.\s*(-?\d+))?\s*$")


class ScenarioSource(BaseModel):
    """A generated scenario (seed + preset) or a scenario file"""

    model_config = ConfigDict(frozen=True)

    seed: Optional[int] = None
    path: Optional[str] = None
    preset: str = "default"

    @model_validator(mode="after")
    def exactly_one_source(self):
        if (self.seed is None) == (self.path is None):
            raise ValueError("a scenario source is either a seed or a file path")
        return self

    @property
    def label(self) -> str:
        if self.path is not None:
            return os.path.splitext(os.path.basename(self.path))[0]
        return f"seed{self.seed}"

    def load(self) -> WorldSpec:
        if self.path is not None:
            return load_scenario(self.path)
        return generate_scenario(self.seed, ScenarioParams.from_preset(self.preset))


class SummaryRow(BaseModel):
    config_id: str
    planner: str
    scorer: str
    episodes: int
    SR: float
    SPL: float
    mean_steps: float
    mean_path_m: float
    rs: float
    re: float


class BatchSummary(BaseModel):
    rows: List[SummaryRow]
    results: List[EpisodeResult]
    scenario_count: int


def parse_seed_range(text: str) -> List[int]:
    """
    "A..B" (both ends included) or a single seed

    Example:
        >>> parse_seed_range("3..5")
        [3, 4, 5]
    """
    match = _SEED_RANGE.match(text or "")
    if not match:
        raise BatchUsageError(f"seed range must look like A..B, got {text!r}")
    first = int(match.group(1))
    last = int(match.group(2)) if match.group(2) is not None else first
    if last < first:
        raise BatchUsageError(f"empty seed range {text!r}")
    return list(range(first, last + 1))


def expand_variants(
    base: EpisodeConfig,
    planners: Sequence[PlannerMethod] = (PlannerMethod.LSP,),
    rs_values: Sequence[float] = (),
    re_values: Sequence[float] = (),
) -> List[EpisodeConfig]:
    """Cartesian product planner x R_S x R_E on top of a base configuration"""
    rs_values = list(rs_values) or [base.rs]
    re_values = list(re_values) or [base.re]
    return [
        base.model_copy(update={"planner": PlannerMethod(p), "rs": rs, "re": re_})
        for p, rs, re_ in itertools.product(planners, rs_values, re_values)
    ]


def _run_job(job: Tuple[ScenarioSource, EpisodeConfig, Optional[str]], client: Optional[httpx.Client] = None) -> EpisodeResult:
    source, cfg, snapshot_dir = job
    label = source.label
    try:
        world = source.load()
        scorer = build_scorer(cfg, world, client)
        episode_dir = os.path.join(snapshot_dir, cfg.config_id) if snapshot_dir else None
        try:
            return run_episode(world, cfg, scorer=scorer, snapshot_dir=episode_dir, label=label)
        finally:
            if hasattr(scorer, "close"):
                scorer.close()
    except Exception as e:
        logger.exception("episode %s [%s] failed", label, cfg.config_id)
        return EpisodeResult(
            scenario=label,
            config_id=cfg.config_id,
            success=False,
            steps=0,
            agent_path_length=0.0,
            oracle_shortest=MIN_ORACLE_PATH,
            termination=Termination.ERROR,
            error=f"{type(e).__name__}: {e}",
        )


def summarize(cfg: EpisodeConfig, results: Sequence[EpisodeResult]) -> SummaryRow:
    metrics = compute_metrics(results)
    n = len(results)
    return SummaryRow(
        config_id=cfg.config_id,
        planner=cfg.planner.value,
        scorer=cfg.scorer.value,
        episodes=n,
        SR=metrics.sr,
        SPL=metrics.spl,
        mean_steps=math.fsum(r.steps for r in results) / n,
        mean_path_m=math.fsum(r.agent_path_length for r in results) / n,
        rs=cfg.rs,
        re=cfg.re,
    )


def run_batch(
    scenarios: Iterable[ScenarioSource],
    variants: Iterable[EpisodeConfig],
    workers: int = 1,
    snapshot_dir: Optional[str] = None,
    csv_path: Optional[str] = None,
    trace_path: Optional[str] = None,
    client: Optional[httpx.Client] = None,
) -> BatchSummary:
    """
    Run every (scenario, configuration) pair

    Args:
        scenarios: Scenario sources
        variants: Episode configurations, one summary row each
        workers: Process count; 1 runs in this process
        snapshot_dir: Root for per-configuration PGM snapshots
        csv_path: Optional summary CSV destination
        trace_path: Optional JSONL trace destination
        client: HTTP client for the external scorer (in-process runs only)

    Returns:
        BatchSummary with one row per configuration, in variant order

    Raises:
        BatchUsageError: no scenarios or no configurations
    """
    scenarios = list(scenarios)
    variants = list(variants)
    if not scenarios:
        raise BatchUsageError("no scenarios to run")
    if not variants:
        raise BatchUsageError("no configurations to run")

    jobs = [(source, cfg, snapshot_dir) for cfg in variants for source in scenarios]
    logger.info("running %d episodes (%d scenarios x %d configs)", len(jobs), len(scenarios), len(variants))

    if workers > 1:
        if client is not None:
            raise BatchUsageError("an injected scorer client cannot be shared across worker processes")
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_job, jobs))
    else:
        results = [_run_job(job, client) for job in jobs]

    rows = []
    for i, cfg in enumerate(variants):
        chunk = results[i * len(scenarios):(i + 1) * len(scenarios)]
        rows.append(summarize(cfg, chunk))

    if csv_path:
        export_summary_csv([row.model_dump() for row in rows], csv_path)
    if trace_path:
        export_traces_jsonl(results, trace_path)

    return BatchSummary(rows=rows, results=results, scenario_count=len(scenarios))
