"""
Episode API routes
"""

import math

from fastapi import APIRouter, HTTPException
from pydantic import ValidationError

from semnav.api.models.episode import EpisodeRunRequest, EpisodeRunResponse
from semnav.core.episode_runner import run_episode
from semnav.core.exceptions import SemNavError
from semnav.core.metrics import episode_spl
from semnav.core.scenario_generator import ScenarioParams, generate_scenario
from semnav.core.scenario_io import parse_scenario

router = APIRouter(prefix="/api/v1/episodes", tags=["episodes"])


@router.post("", response_model=EpisodeRunResponse)
def run_single_episode(request: EpisodeRunRequest):
    """
    Run one episode on a generated or inline scenario
    """
    try:
        if request.scenario_text is not None:
            world = parse_scenario(request.scenario_text)
            label = "inline"
        else:
            world = generate_scenario(request.seed, ScenarioParams.from_preset(request.preset))
            label = f"seed{request.seed}"

        result = run_episode(world, request.to_config(), label=label)

        return EpisodeRunResponse(
            scenario=result.scenario,
            config_id=result.config_id,
            success=result.success,
            steps=result.steps,
            agent_path_length=result.agent_path_length,
            reachable=math.isfinite(result.oracle_shortest),
            oracle_shortest=result.oracle_shortest if math.isfinite(result.oracle_shortest) else None,
            spl=episode_spl(result.success, result.oracle_shortest, result.agent_path_length),
            termination=result.termination.value,
            error=result.error,
            trace=result.trace if request.include_trace else None
        )

    except HTTPException:
        raise
    except (SemNavError, ValidationError) as e:
        raise HTTPException(status_code=400, detail=str(e))
    except Exception as e:
        raise HTTPException(status_code=500, detail=str(e))
