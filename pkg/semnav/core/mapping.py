"""
Partial occupancy map built from depth scans, frontier extraction
and known-space distances
"""

import logging
import math
from dataclasses import dataclass, field
from enum import IntEnum
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.ndimage import label

from semnav.core.grid_graph import NEIGHBORS_8, Cell, distance_fields
from semnav.core.gridworld import AgentPose, DepthScan, HitKind, WorldSpec

logger = logging.getLogger(__name__)

# Free-space samples per cell along each ray
_SAMPLES_PER_CELL = 4


class CellState(IntEnum):
    UNKNOWN = 0
    FREE = 1
    OBSTACLE = 2


@dataclass
class PartialMap:
    """Agent-side grid of unknown / free / obstacle cells"""

    width: int
    height: int
    cell_size: float
    state: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if self.state is None:
            self.state = np.full((self.height, self.width), CellState.UNKNOWN, dtype=np.int8)
        elif self.state.shape != (self.height, self.width):
            raise ValueError(f"state shape {self.state.shape} does not match {self.height}x{self.width}")

    @classmethod
    def for_world(cls, world: WorldSpec) -> "PartialMap":
        return cls(width=world.width, height=world.height, cell_size=world.cell_size)

    @property
    def shape(self) -> Tuple[int, int]:
        return self.height, self.width

    @property
    def passable(self) -> np.ndarray:
        return self.state == CellState.FREE

    @property
    def known_count(self) -> int:
        return int(np.count_nonzero(self.state != CellState.UNKNOWN))

    def in_bounds(self, cell: Cell) -> bool:
        return 0 <= cell[0] < self.height and 0 <= cell[1] < self.width

    def is_free(self, cell: Cell) -> bool:
        return self.in_bounds(cell) and self.state[cell] == CellState.FREE

    def mark_obstacle(self, cell: Cell) -> None:
        if self.in_bounds(cell):
            self.state[cell] = CellState.OBSTACLE

    def copy(self) -> "PartialMap":
        return PartialMap(self.width, self.height, self.cell_size, self.state.copy())


@dataclass(frozen=True)
class Frontier:
    id: int
    cells: Tuple[Cell, ...]
    midpoint: Cell

    def __len__(self) -> int:
        return len(self.cells)


def observed_cells(
    pose: AgentPose,
    scan: DepthScan,
    cell_size: float,
    shape: Tuple[int, int],
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Cells a scan proves free and cells it proves blocked

    Returns:
        (free cells (m, 2), struck cells (k, 2)), unique rows of (row, col)
    """
    height, width = shape
    theta = np.radians(scan.absolute_angles(pose.heading))
    spacing = cell_size / _SAMPLES_PER_CELL
    t = np.arange(int(math.ceil(scan.max_range / spacing)) + 1) * spacing

    # strictly before the hit; the struck cell itself comes from the raycaster
    before_hit = t[None, :] < scan.ranges[:, None] - 1e-9
    xs = pose.x + t[None, :] * np.cos(theta)[:, None]
    ys = pose.y + t[None, :] * np.sin(theta)[:, None]
    rows = np.floor(ys / cell_size).astype(int)
    cols = np.floor(xs / cell_size).astype(int)
    inside = before_hit & (rows >= 0) & (rows < height) & (cols >= 0) & (cols < width)

    free = np.unique(np.stack([rows[inside], cols[inside]], axis=1), axis=0)

    struck = scan.hit_cells
    hit = np.array([kind != HitKind.MAX_RANGE for kind in scan.hit_kinds]) & (struck[:, 0] >= 0)
    blocked = np.unique(struck[hit].reshape(-1, 2), axis=0)
    return free.reshape(-1, 2), blocked


def integrate_scan(pmap: PartialMap, pose: AgentPose, scan: DepthScan) -> PartialMap:
    """
    Fold one scan into the map (in place; the same map is returned)

    Obstacles are sticky: a cell once marked obstacle never becomes free.
    """
    free, blocked = observed_cells(pose, scan, pmap.cell_size, pmap.shape)
    return apply_observation(pmap, pose, free, blocked)


def apply_observation(pmap: PartialMap, pose: AgentPose, free: np.ndarray, blocked: np.ndarray) -> PartialMap:
    """Mark precomputed scan cells (see observed_cells)"""
    if len(free):
        rows, cols = free[:, 0], free[:, 1]
        keep = pmap.state[rows, cols] != CellState.OBSTACLE
        pmap.state[rows[keep], cols[keep]] = CellState.FREE
    if len(blocked):
        pmap.state[blocked[:, 0], blocked[:, 1]] = CellState.OBSTACLE

    own = pose.cell(pmap.cell_size)
    if pmap.state[own] == CellState.UNKNOWN:
        pmap.state[own] = CellState.FREE
    return pmap


def frontier_mask(pmap: PartialMap) -> np.ndarray:
    """Free cells 4-adjacent to at least one unknown cell"""
    unknown = np.pad(pmap.state == CellState.UNKNOWN, 1, constant_values=False)
    touches = unknown[:-2, 1:-1] | unknown[2:, 1:-1] | unknown[1:-1, :-2] | unknown[1:-1, 2:]
    return pmap.passable & touches


def is_frontier_cell(pmap: PartialMap, cell: Cell) -> bool:
    return pmap.in_bounds(cell) and bool(frontier_mask(pmap)[cell])


def _boundary_order(cells: Sequence[Cell]) -> List[Cell]:
    """
    Depth-first walk of a component starting from its most end-like cell

    For a boundary line this is the line order, so the median entry is the
    middle of the line.
    """
    members = set(cells)

    def degree(cell: Cell) -> int:
        return sum((cell[0] + dr, cell[1] + dc) in members for dr, dc in NEIGHBORS_8)

    start = min(members, key=lambda cell: (degree(cell), cell))
    order: List[Cell] = []
    seen = set()
    stack = [start]
    while stack:
        cell = stack.pop()
        if cell in seen:
            continue
        seen.add(cell)
        order.append(cell)
        for dr, dc in reversed(NEIGHBORS_8):
            nxt = (cell[0] + dr, cell[1] + dc)
            if nxt in members and nxt not in seen:
                stack.append(nxt)
    return order


def extract_frontiers(pmap: PartialMap) -> List[Frontier]:
    """
    Group frontier cells into 8-connected components

    Ids follow the lexicographic order of the component midpoints.
    """
    mask = frontier_mask(pmap)
    labels, count = label(mask, structure=np.ones((3, 3), dtype=int))

    components = []
    for k in range(1, count + 1):
        cells = [tuple(int(v) for v in rc) for rc in np.argwhere(labels == k)]
        order = _boundary_order(cells)
        components.append((order[len(order) // 2], tuple(order)))

    components.sort(key=lambda item: item[0])
    return [Frontier(id=i, cells=cells, midpoint=mid) for i, (mid, cells) in enumerate(components)]


def known_distance(pmap: PartialMap, start: Cell, goal: Cell) -> Optional[float]:
    """
    Shortest free-space distance in meters, or None when unreachable
    """
    if not pmap.is_free(start) or not pmap.is_free(goal):
        return None
    dist = distance_fields(pmap.passable, [start], pmap.cell_size)[0][goal]
    return float(dist) if np.isfinite(dist) else None


def pairwise_known_distances(pmap: PartialMap, cells: Sequence[Cell]) -> np.ndarray:
    """
    Known-space distance matrix between the given free cells (np.inf when unreachable)
    """
    fields = distance_fields(pmap.passable, list(cells), pmap.cell_size)
    if not len(cells):
        return np.zeros((0, 0))
    rows = np.array([c[0] for c in cells])
    cols = np.array([c[1] for c in cells])
    return fields[:, rows, cols]
