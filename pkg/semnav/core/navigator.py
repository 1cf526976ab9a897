"""
Local navigation - grid paths to the current subgoal and discrete action selection
"""

import logging
import math
from enum import Enum
from typing import List, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, model_validator

from semnav.core.config import (
    ALIGN_THRESHOLD,
    FORWARD_STEP,
    FRONTIER_STOP_RADIUS,
    OBJECT_STOP_RADIUS,
    STUCK_COLLISIONS,
    SUCCESS_RADIUS,
)
from semnav.core.exceptions import NoPathError
from semnav.core.grid_graph import NEIGHBORS_8, Cell, shortest_path_to_any
from semnav.core.gridworld import Action, AgentPose, DepthScan, cell_center, swept_cells, wrap_degrees
from semnav.core.mapping import PartialMap

logger = logging.getLogger(__name__)

# Agent counts as standing on a cell center within this distance (meters)
_CENTER_TOLERANCE = 1e-6


class GoalKind(str, Enum):
    FRONTIER = "frontier"
    OBJECT = "object"


class NavGoal(BaseModel):
    model_config = ConfigDict(frozen=True)

    cell: Tuple[int, int]
    kind: GoalKind
    stop_radius: float

    @model_validator(mode="after")
    def object_stops_inside_success_radius(self):
        if self.kind == GoalKind.OBJECT and not self.stop_radius < SUCCESS_RADIUS:
            raise ValueError(f"object stop radius must be below {SUCCESS_RADIUS} m, got {self.stop_radius}")
        return self

    @classmethod
    def frontier(cls, cell: Cell) -> "NavGoal":
        return cls(cell=cell, kind=GoalKind.FRONTIER, stop_radius=FRONTIER_STOP_RADIUS)

    @classmethod
    def object(cls, cell: Cell) -> "NavGoal":
        return cls(cell=cell, kind=GoalKind.OBJECT, stop_radius=OBJECT_STOP_RADIUS)


def _axis_steps(path: List[Cell], pmap: PartialMap) -> List[Cell]:
    """Split each diagonal step into two axis steps through a free corner cell"""
    if len(path) < 2:
        return path
    expanded = [path[0]]
    for (r0, c0), (r1, c1) in zip(path, path[1:]):
        if r0 != r1 and c0 != c1:
            corner = (r0, c1) if pmap.is_free((r0, c1)) else (r1, c0)
            expanded.append(corner)
        expanded.append((r1, c1))
    return expanded


def plan_path(pmap: PartialMap, start: Cell, goal: NavGoal) -> List[Cell]:
    """
    Shortest known-free path from start to the goal, as axis-aligned cell steps

    Object goals on blocked cells are approached through their nearest free 8-neighbor.

    Raises:
        NoPathError: goal not reachable through known free space
    """
    if pmap.is_free(goal.cell):
        goals = [goal.cell]
    elif goal.kind == GoalKind.OBJECT:
        r, c = goal.cell
        goals = [(r + dr, c + dc) for dr, dc in NEIGHBORS_8 if pmap.is_free((r + dr, c + dc))]
    else:
        goals = []

    found = shortest_path_to_any(pmap.passable, start, goals, pmap.cell_size) if goals else None
    if found is None:
        raise NoPathError(f"no known path from {start} to {goal.kind.value} goal {goal.cell}")
    path, _ = found
    return _axis_steps(path, pmap)


def _next_waypoint(pose: AgentPose, path: Sequence[Cell], cell_size: float) -> Optional[Cell]:
    """First path cell whose center the agent has not reached; None at the end of the path"""
    here = pose.cell(cell_size)
    if here in path:
        index = path.index(here)
    else:
        index = min(range(len(path)), key=lambda i: pose.distance_to(*cell_center(path[i], cell_size)))

    if pose.distance_to(*cell_center(path[index], cell_size)) > _CENTER_TOLERANCE:
        return path[index]
    if index + 1 < len(path):
        return path[index + 1]
    return None


def turn_toward(pose: AgentPose, x: float, y: float, threshold: float = ALIGN_THRESHOLD) -> Action:
    """Turn in the shorter direction (ties turn left) unless already within threshold"""
    bearing = math.degrees(math.atan2(y - pose.y, x - pose.x))
    offset = wrap_degrees(bearing - pose.heading)
    if abs(offset) <= threshold:
        return Action.MOVE_FORWARD
    return Action.TURN_LEFT if offset > 0 else Action.TURN_RIGHT


def next_action(
    pose: AgentPose,
    path: Sequence[Cell],
    goal: NavGoal,
    cell_size: float,
    threshold: float = ALIGN_THRESHOLD,
) -> Action:
    """
    One discrete action toward the goal along the path

    STOP is only issued for object goals. At the end of a frontier path the agent
    turns left to look around.
    """
    if not path:
        raise ValueError("path must not be empty")

    gx, gy = cell_center(goal.cell, cell_size)
    if goal.kind == GoalKind.OBJECT and pose.distance_to(gx, gy) <= goal.stop_radius:
        return Action.STOP

    waypoint = _next_waypoint(pose, path, cell_size)
    if waypoint is None:
        return Action.TURN_LEFT
    return turn_toward(pose, *cell_center(waypoint, cell_size), threshold=threshold)


def goal_from_detection(scan: DepthScan, pose: AgentPose, pmap: Optional[PartialMap] = None) -> NavGoal:
    """
    Object goal at the nearest target hit of the scan

    Raises:
        ValueError: the scan holds no target hit
    """
    hits = scan.target_rays()
    if not hits:
        raise ValueError("scan has no target hit")
    nearest = min(hits, key=lambda i: (scan.ranges[i], i))
    row, col = (int(v) for v in scan.hit_cells[nearest])
    logger.debug("target detected %.2f m away at %s from %s", scan.ranges[nearest], (row, col), pose)
    return NavGoal.object((row, col))


def cell_ahead(pose: AgentPose, cell_size: float, distance: float = FORWARD_STEP) -> Optional[Cell]:
    """First cell other than the agent's own that a forward move would enter"""
    theta = math.radians(pose.heading)
    here = pose.cell(cell_size)
    x1 = pose.x + distance * math.cos(theta)
    y1 = pose.y + distance * math.sin(theta)
    for cell in swept_cells(pose.x, pose.y, x1, y1, cell_size):
        if cell != here:
            return cell
    return None


def recover_if_stuck(
    history: Sequence[Tuple[Action, bool]],
    pose: AgentPose,
    pmap: PartialMap,
    threshold: int = STUCK_COLLISIONS,
) -> Optional[Cell]:
    """
    Mark the blocking cell after repeated collisions

    Args:
        history: Recent (action, collided) pairs, oldest first

    Returns:
        The patched cell (caller should replan), or None when no intervention was needed
    """
    recent = list(history)[-threshold:]
    if len(recent) < threshold or not all(a == Action.MOVE_FORWARD and hit for a, hit in recent):
        return None

    blocking = cell_ahead(pose, pmap.cell_size)
    if blocking is None or not pmap.in_bounds(blocking):
        return None
    pmap.mark_obstacle(blocking)
    logger.info("stuck at %s after %d collisions; marked %s as obstacle", pose.cell(pmap.cell_size), threshold, blocking)
    return blocking
