"""
Scenario API routes
"""

from fastapi import APIRouter, HTTPException
from fastapi.responses import PlainTextResponse

from semnav.core.config import SCENARIO_PRESETS
from semnav.core.exceptions import SemNavError
from semnav.core.scenario_generator import ScenarioParams, generate_scenario
from semnav.core.scenario_io import dump_scenario

router = APIRouter(prefix="/api/v1/scenarios", tags=["scenarios"])


@router.get("/{seed}", response_class=PlainTextResponse)
def get_generated_scenario(seed: int, preset: str = "default"):
    """
    Generated scenario in the text file format
    """
    try:
        if preset not in SCENARIO_PRESETS:
            raise HTTPException(status_code=400, detail=f"preset must be one of {sorted(SCENARIO_PRESETS)}")

        world = generate_scenario(seed, ScenarioParams.from_preset(preset))
        return PlainTextResponse(dump_scenario(world))

    except HTTPException:
        raise
    except SemNavError as e:
        raise HTTPException(status_code=400, detail=str(e))
    except Exception as e:
        raise HTTPException(status_code=500, detail=str(e))
