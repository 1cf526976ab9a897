"""
Batch evaluation API routes
"""

from fastapi import APIRouter, HTTPException, Depends
from pydantic import ValidationError
from sqlalchemy.orm import Session

from database import get_db
from models import BatchRun
from semnav.api.models.batch import BatchListResponse, BatchResponse, BatchRowResponse, BatchRunRequest
from semnav.core.batch_runner import ScenarioSource, expand_variants, parse_seed_range, run_batch
from semnav.core.episode_runner import EpisodeConfig
from semnav.core.exceptions import SemNavError
from semnav.core.results_store import count_batches, get_batch, list_batches, save_batch
from semnav.core.scorer import ScorerKind

router = APIRouter(prefix="/api/v1/batches", tags=["batches"])

# Episodes per request; larger sweeps belong on the CLI
MAX_EPISODES = 400


def to_response(batch: BatchRun) -> BatchResponse:
    return BatchResponse(
        batch_id=batch.id,
        created_at=batch.created_at,
        scenario_count=batch.scenario_count,
        note=batch.note,
        rows=[BatchRowResponse.model_validate(row) for row in batch.rows]
    )


@router.post("", response_model=BatchResponse)
def create_batch(request: BatchRunRequest, db: Session = Depends(get_db)):
    """
    Run a seed range over planner / cost variants and store the summary
    """
    try:
        if request.scorer == ScorerKind.EXTERNAL:
            raise HTTPException(status_code=400, detail="external scorer batches run from the CLI")

        seeds = parse_seed_range(request.seeds)
        base = EpisodeConfig(scorer=request.scorer, max_steps=request.max_steps, k=request.k)
        variants = expand_variants(base, request.planners, request.rs, request.re)

        if len(seeds) * len(variants) > MAX_EPISODES:
            raise HTTPException(
                status_code=400,
                detail=f"{len(seeds) * len(variants)} episodes requested, limit is {MAX_EPISODES}"
            )

        scenarios = [ScenarioSource(seed=seed, preset=request.preset) for seed in seeds]
        summary = run_batch(scenarios, variants)
        batch_id = save_batch(db, summary, note=request.note)

        return to_response(get_batch(db, batch_id))

    except HTTPException:
        raise
    except (SemNavError, ValidationError) as e:
        raise HTTPException(status_code=400, detail=str(e))
    except Exception as e:
        raise HTTPException(status_code=500, detail=str(e))


@router.get("", response_model=BatchListResponse)
def list_batch_runs(skip: int = 0, limit: int = 100, db: Session = Depends(get_db)):
    """
    List stored batches, newest first
    """
    try:
        if skip < 0:
            raise HTTPException(status_code=400, detail="skip must be >= 0")
        if limit < 1 or limit > 500:
            raise HTTPException(status_code=400, detail="limit must be between 1 and 500")

        batches = list_batches(db, skip=skip, limit=limit)
        return BatchListResponse(total=count_batches(db), batches=[to_response(b) for b in batches])

    except HTTPException:
        raise
    except Exception as e:
        raise HTTPException(status_code=500, detail=str(e))


@router.get("/{batch_id}", response_model=BatchResponse)
def get_batch_run(batch_id: int, db: Session = Depends(get_db)):
    """
    Get one stored batch with its per-configuration rows
    """
    try:
        batch = get_batch(db, batch_id)
        if not batch:
            raise HTTPException(status_code=404, detail=f"Batch {batch_id} not found")
        return to_response(batch)

    except HTTPException:
        raise
    except Exception as e:
        raise HTTPException(status_code=500, detail=str(e))
