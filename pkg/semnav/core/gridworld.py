"""
Ground-truth grid world - geometry, agent kinematics, depth sensing and success adjudication

Frame: cell (row, col) covers x in [col*s, (col+1)*s), y in [row*s, (row+1)*s).
Heading 0 points along +x ("east"); TURN_LEFT adds +30 degrees.
"""

import math
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import FrozenSet, List, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator

from semnav.core.config import (
    CELL_SIZE,
    FORWARD_STEP,
    MAX_STEPS,
    SENSOR_FOV,
    SENSOR_MAX_RANGE,
    SENSOR_RAYS,
    SUCCESS_RADIUS,
    TURN_DEGREES,
)
from semnav.core.exceptions import ScenarioInvariantError
from semnav.core.grid_graph import NEIGHBORS_8, Cell

# Tolerance for boundary crossings in the collision sweep
_SWEEP_EPS = 1e-9


class Action(str, Enum):
    MOVE_FORWARD = "MOVE_FORWARD"
    TURN_LEFT = "TURN_LEFT"
    TURN_RIGHT = "TURN_RIGHT"
    STOP = "STOP"


class HitKind(str, Enum):
    OBSTACLE = "obstacle"
    TARGET = "target"
    MAX_RANGE = "max_range"


_KIND_CODES = (HitKind.OBSTACLE, HitKind.TARGET, HitKind.MAX_RANGE)


class AgentPose(BaseModel):
    """Continuous position in meters, heading in degrees (multiple of 30)"""

    model_config = ConfigDict(frozen=True)

    x: float
    y: float
    heading: int = 0

    @field_validator("heading")
    @classmethod
    def heading_on_turn_grid(cls, value: int) -> int:
        if not 0 <= value < 360 or value % TURN_DEGREES:
            raise ValueError(f"heading must be a multiple of {TURN_DEGREES} in [0, 360), got {value}")
        return value

    def cell(self, cell_size: float = CELL_SIZE) -> Cell:
        return int(math.floor(self.y / cell_size)), int(math.floor(self.x / cell_size))

    def distance_to(self, x: float, y: float) -> float:
        return math.hypot(x - self.x, y - self.y)

    @classmethod
    def at_cell(cls, cell: Cell, heading: int = 0, cell_size: float = CELL_SIZE) -> "AgentPose":
        row, col = cell
        return cls(x=(col + 0.5) * cell_size, y=(row + 0.5) * cell_size, heading=heading)


def cell_center(cell: Cell, cell_size: float = CELL_SIZE) -> Tuple[float, float]:
    """Center (x, y) in meters of a (row, col) cell"""
    return (cell[1] + 0.5) * cell_size, (cell[0] + 0.5) * cell_size


def wrap_degrees(angle: float) -> float:
    """Wrap an angle to (-180, 180]"""
    wrapped = math.fmod(angle, 360.0)
    if wrapped <= -180.0:
        wrapped += 360.0
    elif wrapped > 180.0:
        wrapped -= 360.0
    return wrapped


@dataclass(frozen=True, eq=False)
class WorldSpec:
    """
    Immutable ground truth. `cells` is True for blocking cells; target cells
    always block movement and are reported separately by the depth sensor.
    """

    width: int
    height: int
    cell_size: float
    cells: np.ndarray
    targets: FrozenSet[Cell]
    start: AgentPose
    target_label: str

    def __post_init__(self):
        cells = np.array(self.cells, dtype=bool, copy=True)
        for row, col in self.targets:
            if 0 <= row < cells.shape[0] and 0 <= col < cells.shape[1]:
                cells[row, col] = True
        cells.setflags(write=False)
        object.__setattr__(self, "cells", cells)
        object.__setattr__(self, "targets", frozenset((int(r), int(c)) for r, c in self.targets))
        validate_world(self)

    def __eq__(self, other) -> bool:
        if not isinstance(other, WorldSpec):
            return NotImplemented
        return (
            self.width == other.width
            and self.height == other.height
            and self.cell_size == other.cell_size
            and np.array_equal(self.cells, other.cells)
            and self.targets == other.targets
            and self.start == other.start
            and self.target_label == other.target_label
        )

    __hash__ = None

    @property
    def shape(self) -> Tuple[int, int]:
        return self.height, self.width

    @property
    def free(self) -> np.ndarray:
        return ~self.cells

    @cached_property
    def target_mask(self) -> np.ndarray:
        mask = np.zeros(self.shape, dtype=bool)
        for cell in self.targets:
            mask[cell] = True
        return mask

    @cached_property
    def target_centers(self) -> np.ndarray:
        return np.array([cell_center(c, self.cell_size) for c in sorted(self.targets)])

    def in_bounds(self, cell: Cell) -> bool:
        return 0 <= cell[0] < self.height and 0 <= cell[1] < self.width

    def is_free(self, cell: Cell) -> bool:
        return self.in_bounds(cell) and not self.cells[cell]

    def nearest_target_distance(self, x: float, y: float) -> float:
        """Euclidean distance from a point to the nearest target cell center"""
        offsets = self.target_centers - np.array([x, y])
        return float(np.min(np.hypot(offsets[:, 0], offsets[:, 1])))

    def target_neighbor_cells(self) -> List[Cell]:
        """Free 8-neighbors of target cells, sorted"""
        found = set()
        for row, col in self.targets:
            for dr, dc in NEIGHBORS_8:
                cell = (row + dr, col + dc)
                if self.is_free(cell):
                    found.add(cell)
        return sorted(found)

    def cells_within_success_radius(self, radius: float = SUCCESS_RADIUS) -> List[Cell]:
        """Free cells whose center lies within `radius` of some target center"""
        rows, cols = np.nonzero(self.free)
        centers = np.stack([(cols + 0.5) * self.cell_size, (rows + 0.5) * self.cell_size], axis=1)
        diff = centers[:, None, :] - self.target_centers[None, :, :]
        near = np.min(np.hypot(diff[..., 0], diff[..., 1]), axis=1) <= radius
        return [(int(r), int(c)) for r, c in zip(rows[near], cols[near])]


def validate_world(world: WorldSpec) -> None:
    """
    Check WorldSpec invariants

    Raises:
        ScenarioInvariantError with the offending row/column
    """
    if world.cells.shape != (world.height, world.width):
        raise ScenarioInvariantError(
            f"grid is {world.cells.shape[1]}x{world.cells.shape[0]}, header says {world.width}x{world.height}"
        )
    if world.cell_size <= 0:
        raise ScenarioInvariantError(f"cell_size must be positive, got {world.cell_size}")

    start_row, start_col = world.start.cell(world.cell_size)
    if not world.in_bounds((start_row, start_col)):
        raise ScenarioInvariantError("start lies outside the grid", start_row, start_col)
    if world.cells[start_row, start_col]:
        raise ScenarioInvariantError("start cell is not free", start_row, start_col)

    if not world.targets:
        raise ScenarioInvariantError("scenario has no target cell")
    for row, col in sorted(world.targets):
        if not world.in_bounds((row, col)):
            raise ScenarioInvariantError("target lies outside the grid", row, col)
    if not world.target_neighbor_cells():
        row, col = min(world.targets)
        raise ScenarioInvariantError("no target cell has a free 8-neighbor", row, col)
    if not world.target_label.strip():
        raise ScenarioInvariantError("target label is empty")


def step(world: WorldSpec, pose: AgentPose, action: Action) -> Tuple[AgentPose, bool]:
    """
    Apply one action

    Returns:
        (new pose, collided). A blocked MOVE_FORWARD leaves the pose unchanged.
    """
    if action == Action.TURN_LEFT:
        return pose.model_copy(update={"heading": (pose.heading + TURN_DEGREES) % 360}), False
    if action == Action.TURN_RIGHT:
        return pose.model_copy(update={"heading": (pose.heading - TURN_DEGREES) % 360}), False
    if action == Action.STOP:
        return pose, False

    theta = math.radians(pose.heading)
    new_x = round(pose.x + FORWARD_STEP * math.cos(theta), 9)
    new_y = round(pose.y + FORWARD_STEP * math.sin(theta), 9)

    for cell in swept_cells(pose.x, pose.y, new_x, new_y, world.cell_size):
        if not world.is_free(cell):
            return pose, True

    moved = AgentPose(x=new_x, y=new_y, heading=pose.heading)
    assert world.is_free(moved.cell(world.cell_size)), "agent entered a blocked cell"
    return moved, False


def swept_cells(x0: float, y0: float, x1: float, y1: float, cell_size: float) -> List[Cell]:
    """
    Every cell the segment (x0, y0) -> (x1, y1) enters, in order

    Exact grid traversal: each cell boundary crossing is one event. A
    crossing through a cell corner adds both side cells as well as the
    diagonal one.
    """
    row, col = math.floor(y0 / cell_size), math.floor(x0 / cell_size)
    events: List[Tuple[float, int, int]] = []  # (t, axis 0=row 1=col, step)
    for axis, start, delta, index in ((0, y0, y1 - y0, row), (1, x0, x1 - x0, col)):
        if delta == 0.0:
            continue
        step_dir = 1 if delta > 0 else -1
        boundary = (index + 1) * cell_size if step_dir > 0 else index * cell_size
        while True:
            t = (boundary - start) / delta
            # leaving a cell downward needs the end strictly past the boundary
            if t > 1.0 + _SWEEP_EPS or (step_dir < 0 and t >= 1.0 - _SWEEP_EPS):
                break
            events.append((t, axis, step_dir))
            boundary += step_dir * cell_size
    events.sort()

    cells: List[Cell] = [(row, col)]
    i = 0
    while i < len(events):
        t, axis, step_dir = events[i]
        nxt = events[i + 1] if i + 1 < len(events) else None
        if nxt is not None and nxt[1] != axis and nxt[0] - t <= _SWEEP_EPS:
            d_row = step_dir if axis == 0 else nxt[2]
            d_col = step_dir if axis == 1 else nxt[2]
            cells += [(row + d_row, col), (row, col + d_col)]
            row, col = row + d_row, col + d_col
            i += 2
        else:
            if axis == 0:
                row += step_dir
            else:
                col += step_dir
            i += 1
        cells.append((row, col))
    return cells


@dataclass(frozen=True, eq=False)
class DepthScan:
    """Planar depth scan; angles are relative to the heading"""

    ray_angles: np.ndarray
    ranges: np.ndarray
    hit_kinds: Tuple[HitKind, ...]
    hit_cells: np.ndarray  # (rays, 2) row, col of the struck cell; -1 when nothing was struck in the grid
    max_range: float
    fov: float

    def absolute_angles(self, heading: float) -> np.ndarray:
        return self.ray_angles + heading

    def target_rays(self) -> List[int]:
        return [i for i, kind in enumerate(self.hit_kinds) if kind == HitKind.TARGET]

    @property
    def center_index(self) -> int:
        return len(self.ranges) // 2


def ray_angles(fov: float, rays: int) -> np.ndarray:
    if rays == 1:
        return np.zeros(1)
    return np.linspace(-fov / 2.0, fov / 2.0, rays)


def cast_rays(
    blocked: np.ndarray,
    targets: np.ndarray,
    x0: float,
    y0: float,
    angles_deg: np.ndarray,
    max_range: float,
    cell_size: float,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Exact grid traversal (DDA) of all rays at once

    Leaving the grid counts as an obstacle hit at the boundary.
    At an exact corner crossing the column step is taken first.

    Returns:
        (ranges in meters, kind codes indexing _KIND_CODES, struck cells (rays, 2))
    """
    height, width = blocked.shape
    n = len(angles_deg)
    theta = np.radians(angles_deg)
    dx, dy = np.cos(theta), np.sin(theta)

    col = np.full(n, int(math.floor(x0 / cell_size)))
    row = np.full(n, int(math.floor(y0 / cell_size)))
    step_c = np.where(dx > 0, 1, -1)
    step_r = np.where(dy > 0, 1, -1)

    with np.errstate(divide="ignore", invalid="ignore"):
        next_x = np.where(dx > 0, (col + 1) * cell_size, col * cell_size)
        next_y = np.where(dy > 0, (row + 1) * cell_size, row * cell_size)
        t_max_x = np.where(dx != 0, (next_x - x0) / dx, np.inf)
        t_max_y = np.where(dy != 0, (next_y - y0) / dy, np.inf)
        t_delta_x = np.where(dx != 0, cell_size / np.abs(dx), np.inf)
        t_delta_y = np.where(dy != 0, cell_size / np.abs(dy), np.inf)

    ranges = np.full(n, float(max_range))
    kinds = np.full(n, 2)
    struck = np.full((n, 2), -1)
    active = np.ones(n, dtype=bool)

    while active.any():
        use_x = t_max_x <= t_max_y
        t = np.where(use_x, t_max_x, t_max_y)
        move_x = active & use_x
        move_y = active & ~use_x
        col = np.where(move_x, col + step_c, col)
        row = np.where(move_y, row + step_r, row)
        t_max_x = np.where(move_x, t_max_x + t_delta_x, t_max_x)
        t_max_y = np.where(move_y, t_max_y + t_delta_y, t_max_y)

        active &= ~(t > max_range)

        outside = active & ((row < 0) | (row >= height) | (col < 0) | (col >= width))
        ranges[outside] = t[outside]
        kinds[outside] = 0
        active &= ~outside

        rr = np.clip(row, 0, height - 1)
        cc = np.clip(col, 0, width - 1)
        hit = active & blocked[rr, cc]
        ranges[hit] = t[hit]
        kinds[hit] = np.where(targets[rr, cc][hit], 1, 0)
        struck[hit] = np.stack([row[hit], col[hit]], axis=1)
        active &= ~hit

    return ranges + 0.0, kinds, struck


def sense_depth(
    world: WorldSpec,
    pose: AgentPose,
    fov: float = SENSOR_FOV,
    rays: int = SENSOR_RAYS,
    max_range: float = SENSOR_MAX_RANGE,
) -> DepthScan:
    """
    Simulated planar depth scan from the agent pose

    Args:
        fov: Field of view in degrees, in (0, 180]
        rays: Odd ray count; the middle ray lies on the optical axis
        max_range: Meters
    """
    if not 0 < fov <= 180:
        raise ValueError(f"fov must be in (0, 180], got {fov}")
    if rays < 1 or rays % 2 == 0:
        raise ValueError(f"rays must be a positive odd count, got {rays}")

    relative = ray_angles(fov, rays)
    ranges, kinds, struck = cast_rays(
        world.cells, world.target_mask, pose.x, pose.y,
        relative + pose.heading, max_range, world.cell_size,
    )
    return DepthScan(
        ray_angles=relative,
        ranges=ranges,
        hit_kinds=tuple(_KIND_CODES[k] for k in kinds),
        hit_cells=struck,
        max_range=float(max_range),
        fov=float(fov),
    )


def is_success(
    world: WorldSpec,
    pose: AgentPose,
    stopped: bool,
    steps: int,
    max_steps: int = MAX_STEPS,
) -> bool:
    """STOP issued within the step budget and within 1 m of a target cell center"""
    if not stopped or steps > max_steps:
        return False
    return world.nearest_target_distance(pose.x, pose.y) <= SUCCESS_RADIUS
