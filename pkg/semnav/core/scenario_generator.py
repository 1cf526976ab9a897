"""
Procedural scenario generator - rectangular rooms joined by L-shaped corridors
Deterministic for a fixed (seed, params) pair
"""

import logging
import random
from dataclasses import dataclass
from typing import List, Optional

import numpy as np
from pydantic import BaseModel, Field, model_validator
from scipy.ndimage import label

from semnav.core.config import CELL_SIZE, TARGET_LABELS, get_preset
from semnav.core.exceptions import ScenarioGenerationError, ScenarioInvariantError
from semnav.core.grid_graph import NEIGHBORS_4, Cell
from semnav.core.gridworld import AgentPose, WorldSpec

logger = logging.getLogger(__name__)


class ScenarioParams(BaseModel):
    width: int = Field(36, ge=12, le=128, description="Grid width in cells")
    height: int = Field(36, ge=12, le=128, description="Grid height in cells")
    min_rooms: int = Field(3, ge=1, le=12)
    max_rooms: int = Field(5, ge=1, le=12)
    min_room_size: int = Field(5, ge=4, le=32, description="Room interior side, cells")
    max_room_size: int = Field(10, ge=4, le=32)
    corridor_width: int = Field(2, ge=1, le=3)
    max_targets: int = Field(2, ge=1, le=4, description="Target instances, each in its own room")
    min_start_distance: float = Field(2.0, ge=0, description="Straight-line meters from start to every target")
    cell_size: float = Field(CELL_SIZE, gt=0)
    target_label: Optional[str] = None
    max_attempts: int = Field(200, ge=1)

    @model_validator(mode="after")
    def check_ranges(self):
        if self.min_rooms > self.max_rooms:
            raise ValueError("min_rooms must not exceed max_rooms")
        if self.min_room_size > self.max_room_size:
            raise ValueError("min_room_size must not exceed max_room_size")
        if self.max_room_size > min(self.width, self.height) - 2:
            raise ValueError("max_room_size must leave a wall border inside the grid")
        return self

    @classmethod
    def from_preset(cls, name: str, **overrides) -> "ScenarioParams":
        return cls(**{**get_preset(name), **overrides})


@dataclass(frozen=True)
class Room:
    row: int
    col: int
    height: int
    width: int

    @property
    def center(self) -> Cell:
        return self.row + self.height // 2, self.col + self.width // 2

    def overlaps(self, other: "Room", margin: int = 1) -> bool:
        return (
            self.row < other.row + other.height + margin
            and other.row < self.row + self.height + margin
            and self.col < other.col + other.width + margin
            and other.col < self.col + self.width + margin
        )

    def cells(self) -> List[Cell]:
        return [
            (r, c)
            for r in range(self.row, self.row + self.height)
            for c in range(self.col, self.col + self.width)
        ]

    def is_edge(self, cell: Cell) -> bool:
        r, c = cell
        return r in (self.row, self.row + self.height - 1) or c in (self.col, self.col + self.width - 1)


def _place_rooms(rng: random.Random, params: ScenarioParams) -> List[Room]:
    room_count = rng.randint(params.min_rooms, params.max_rooms)
    rooms: List[Room] = []
    for _ in range(room_count * 30):
        if len(rooms) == room_count:
            break
        h = rng.randint(params.min_room_size, params.max_room_size)
        w = rng.randint(params.min_room_size, params.max_room_size)
        row = rng.randint(1, params.height - h - 1)
        col = rng.randint(1, params.width - w - 1)
        candidate = Room(row, col, h, w)
        if any(candidate.overlaps(other) for other in rooms):
            continue
        rooms.append(candidate)
    return rooms


def _carve_corridor(blocked: np.ndarray, a: Cell, b: Cell, width: int, horizontal_first: bool) -> None:
    height, grid_width = blocked.shape
    (ra, ca), (rb, cb) = a, b
    corner = (ra, cb) if horizontal_first else (rb, ca)

    for (r0, c0), (r1, c1) in ((a, corner), (corner, b)):
        rows = slice(max(1, min(r0, r1)), min(height - 1, max(r0, r1) + width))
        cols = slice(max(1, min(c0, c1)), min(grid_width - 1, max(c0, c1) + width))
        blocked[rows, cols] = False


def _wall_side_cells(room: Room, blocked: np.ndarray) -> List[Cell]:
    """Room edge cells that touch a wall (4-adjacency)"""
    found = []
    for cell in room.cells():
        if not room.is_edge(cell) or blocked[cell]:
            continue
        if any(blocked[cell[0] + dr, cell[1] + dc] for dr, dc in NEIGHBORS_4):
            found.append(cell)
    return found


def _try_generate(rng: random.Random, params: ScenarioParams) -> Optional[WorldSpec]:
    rooms = _place_rooms(rng, params)
    if len(rooms) < params.min_rooms:
        return None

    blocked = np.ones((params.height, params.width), dtype=bool)
    for room in rooms:
        blocked[room.row:room.row + room.height, room.col:room.col + room.width] = False
    for a, b in zip(rooms, rooms[1:]):
        _carve_corridor(blocked, a.center, b.center, params.corridor_width, rng.random() < 0.5)

    start_room = rng.randrange(len(rooms))
    target_rooms = [i for i in range(len(rooms)) if i != start_room] or [start_room]
    target_count = min(rng.randint(1, params.max_targets), len(target_rooms))

    targets = set()
    for index in sorted(rng.sample(target_rooms, target_count)):
        candidates = _wall_side_cells(rooms[index], blocked)
        if not candidates:
            return None
        cell = rng.choice(candidates)
        blocked[cell] = True
        targets.add(cell)

    free_start = [cell for cell in rooms[start_room].cells() if not blocked[cell]]
    if not free_start:
        return None
    start_cell = rng.choice(free_start)
    start = AgentPose.at_cell(start_cell, heading=0, cell_size=params.cell_size)

    # one 4-connected free region
    _, regions = label(~blocked)
    if regions != 1:
        return None

    label_text = params.target_label or rng.choice(TARGET_LABELS)
    try:
        world = WorldSpec(
            width=params.width,
            height=params.height,
            cell_size=params.cell_size,
            cells=blocked,
            targets=frozenset(targets),
            start=start,
            target_label=label_text,
        )
    except ScenarioInvariantError as e:
        logger.debug("rejected layout: %s", e)
        return None

    if world.nearest_target_distance(start.x, start.y) < params.min_start_distance:
        return None
    return world


def generate_scenario(seed: int = 0, params: Optional[ScenarioParams] = None) -> WorldSpec:
    """
    Generate a rooms-and-corridors world

    Args:
        seed: Random seed
        params: Size and layout bounds (defaults to ScenarioParams())

    Returns:
        WorldSpec with connected free space and at least one wall-adjacent target

    Raises:
        ScenarioGenerationError: constraints not met within params.max_attempts layouts
    """
    params = params or ScenarioParams()
    rng = random.Random(seed)

    for attempt in range(params.max_attempts):
        world = _try_generate(rng, params)
        if world is not None:
            logger.debug("seed %s: layout accepted after %d attempts", seed, attempt + 1)
            return world

    raise ScenarioGenerationError(
        f"no valid layout for seed {seed} after {params.max_attempts} attempts"
    )
