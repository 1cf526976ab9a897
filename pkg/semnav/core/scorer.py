"""
Semantic scorers - likelihood of finding the target "if I move in this direction"

Three interchangeable providers:
    mock      fixed value per heading sector (test double)
    oracle    exp(-d / lambda) of the ground-truth distance from the look-ahead cell to a target
    external  vision-language model behind an HTTP endpoint
"""

import base64
import logging
import math
import re
from enum import Enum
from typing import Dict, Optional, Tuple

import httpx
import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from semnav.core.config import (
    EPSILON,
    ORACLE_LAMBDA,
    SENSOR_MAX_RANGE,
    VLM_MODEL,
    VLM_TIMEOUT,
    build_prompt,
    get_vlm_api_key,
)
from semnav.core.exceptions import ScorerError, ScorerParseError, ScorerUnavailableError
from semnav.core.grid_graph import nearest_source_field
from semnav.core.gridworld import AgentPose, DepthScan, HitKind, WorldSpec, cast_rays

logger = logging.getLogger(__name__)

_NUMBER = re.compile(r"[-+]?(?:\d+\.?\d*|\.\d+)")


class ScorerKind(str, Enum):
    MOCK = "mock"
    ORACLE = "oracle"
    EXTERNAL = "external"


class Sector(str, Enum):
    EAST = "east"
    NORTH = "north"
    WEST = "west"
    SOUTH = "south"


_SECTORS = (Sector.EAST, Sector.NORTH, Sector.WEST, Sector.SOUTH)


def heading_sector(heading: int) -> Sector:
    """Nearest compass sector; heading 0 is east, +90 is north"""
    return _SECTORS[round(heading / 90.0) % 4]


class ScanSummary(BaseModel):
    model_config = ConfigDict(frozen=True)

    center_range: float
    min_range: float
    target_visible: bool

    @classmethod
    def from_scan(cls, scan: DepthScan) -> "ScanSummary":
        return cls(
            center_range=float(scan.ranges[scan.center_index]),
            min_range=float(scan.ranges.min()),
            target_visible=any(kind == HitKind.TARGET for kind in scan.hit_kinds),
        )


class ScoreRequest(BaseModel):
    """One observation to score; carries exactly one payload kind"""

    model_config = ConfigDict(frozen=True)

    target_label: str
    pose: AgentPose
    scan_summary: Optional[ScanSummary] = None
    image_png: Optional[bytes] = None

    @model_validator(mode="after")
    def exactly_one_payload(self):
        if (self.scan_summary is None) == (self.image_png is None):
            raise ValueError("exactly one of scan_summary or image_png is required")
        return self


class MockTable(BaseModel):
    """Mock scorer configuration; values must lie in [0, 1]"""

    table: Dict[Sector, float] = Field(default_factory=dict)
    default: float = Field(0.5, ge=0.0, le=1.0)

    @model_validator(mode="after")
    def values_in_range(self):
        for sector, value in self.table.items():
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"mock value for {sector.value} must be in [0, 1], got {value}")
        return self


def clamp(p: float, low: float = EPSILON, high: float = 1.0 - EPSILON) -> float:
    return float(min(max(p, low), high))


def score_mock(req: ScoreRequest, table: MockTable) -> float:
    value = table.table.get(heading_sector(req.pose.heading), table.default)
    return clamp(value)


def lookahead_cell(world: WorldSpec, pose: AgentPose, max_range: float = SENSOR_MAX_RANGE):
    """
    Last traversable cell along the heading, at most max_range ahead
    """
    ranges, _, _ = cast_rays(
        world.cells, world.target_mask, pose.x, pose.y,
        np.array([float(pose.heading)]), max_range, world.cell_size,
    )
    reach = min(float(ranges[0]), max_range)
    theta = math.radians(pose.heading)
    step = world.cell_size / 4.0
    t = reach - 1e-6
    while t > 0.0:
        cell = AgentPose(x=pose.x + t * math.cos(theta), y=pose.y + t * math.sin(theta)).cell(world.cell_size)
        if world.is_free(cell):
            return cell
        t -= step
    return pose.cell(world.cell_size)


def score_oracle(
    req: ScoreRequest,
    world: WorldSpec,
    lam: float = ORACLE_LAMBDA,
    max_range: float = SENSOR_MAX_RANGE,
    target_field: Optional[np.ndarray] = None,
) -> float:
    """
    clamp(exp(-d / lam)) with d the shortest path from the look-ahead cell to a
    free neighbor of the nearest target; EPSILON when no target is reachable

    Args:
        target_field: Precomputed distance-to-target field (see OracleScorer)
    """
    if lam <= 0:
        raise ValueError(f"lambda must be positive, got {lam}")
    if target_field is None:
        target_field = nearest_source_field(world.free, world.target_neighbor_cells(), world.cell_size)

    d = target_field[lookahead_cell(world, req.pose, max_range)]
    if not np.isfinite(d):
        return EPSILON
    return clamp(math.exp(-d / lam))


def parse_score_text(text: str) -> float:
    """
    First decimal number in a model reply, clamped to [0, 1]

    Raises:
        ScorerParseError: no number in the reply
    """
    match = _NUMBER.search(text or "")
    if match is None:
        raise ScorerParseError(f"no number in scorer reply: {text!r}")
    return clamp(float(match.group()), 0.0, 1.0)


def score_external(
    req: ScoreRequest,
    endpoint: str,
    timeout: float = VLM_TIMEOUT,
    client: Optional[httpx.Client] = None,
    model: str = VLM_MODEL,
    api_key: Optional[str] = None,
) -> float:
    """
    Ask a vision-language endpoint for the likelihood

    Request body: {"model", "prompt", "image_b64", "temperature": 0}; reply body {"text"}.

    Raises:
        ScorerUnavailableError: network error, timeout or HTTP error status
        ScorerParseError: reply body malformed or without a number
    """
    if req.image_png is None:
        raise ValueError("external scoring needs an encoded image")

    payload = {
        "model": model,
        "prompt": build_prompt(req.target_label),
        "image_b64": base64.b64encode(req.image_png).decode("ascii"),
        "temperature": 0,
    }
    key = get_vlm_api_key() if api_key is None else api_key
    headers = {"Authorization": f"Bearer {key}"} if key else {}

    try:
        if client is None:
            with httpx.Client(timeout=timeout) as own_client:
                response = own_client.post(endpoint, json=payload, headers=headers)
        else:
            response = client.post(endpoint, json=payload, headers=headers, timeout=timeout)
        response.raise_for_status()
    except httpx.HTTPError as e:
        raise ScorerUnavailableError(f"scorer endpoint {endpoint} failed: {e}") from e

    try:
        text = response.json()["text"]
    except (ValueError, KeyError, TypeError) as e:
        raise ScorerParseError(f"malformed scorer reply: {response.text[:200]!r}") from e
    return parse_score_text(str(text))


class MockScorer:
    kind = ScorerKind.MOCK
    needs_image = False

    def __init__(self, table: Optional[MockTable] = None):
        self.table = table or MockTable()

    def score(self, req: ScoreRequest) -> float:
        return score_mock(req, self.table)


class OracleScorer:
    kind = ScorerKind.ORACLE
    needs_image = False

    def __init__(self, world: WorldSpec, lam: float = ORACLE_LAMBDA, max_range: float = SENSOR_MAX_RANGE):
        if lam <= 0:
            raise ValueError(f"lambda must be positive, got {lam}")
        self.world = world
        self.lam = lam
        self.max_range = max_range
        self.target_field = nearest_source_field(world.free, world.target_neighbor_cells(), world.cell_size)

    def score(self, req: ScoreRequest) -> float:
        return score_oracle(req, self.world, self.lam, self.max_range, self.target_field)


class ExternalScorer:
    kind = ScorerKind.EXTERNAL
    needs_image = True

    def __init__(
        self,
        endpoint: str,
        timeout: float = VLM_TIMEOUT,
        client: Optional[httpx.Client] = None,
        model: str = VLM_MODEL,
        api_key: Optional[str] = None,
    ):
        if not endpoint:
            raise ValueError("external scorer needs an endpoint")
        self.endpoint = endpoint
        self.timeout = timeout
        self.model = model
        self.api_key = api_key
        self._owns_client = client is None
        self.client = client or httpx.Client(timeout=timeout)

    def score(self, req: ScoreRequest) -> float:
        return score_external(req, self.endpoint, self.timeout, self.client, self.model, self.api_key)

    def close(self) -> None:
        if self._owns_client:
            self.client.close()


def score_or_floor(scorer, req: ScoreRequest, epsilon: float = EPSILON) -> Tuple[float, Optional[str]]:
    """
    Score with graceful degradation

    Returns:
        (probability, error text or None); scorer failures yield epsilon
    """
    try:
        return scorer.score(req), None
    except ScorerError as e:
        logger.warning("scorer failed, using %.2f: %s", epsilon, e)
        return epsilon, str(e)
