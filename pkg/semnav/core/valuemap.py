"""
Semantic value map - per-cell value V and confidence C fused over time
"""

import math
from dataclasses import dataclass, field
from typing import Iterable, Tuple, Union

import numpy as np

from semnav.core.config import EPSILON, VALUE_RADIUS
from semnav.core.grid_graph import Cell
from semnav.core.gridworld import AgentPose, cell_center
from semnav.core.mapping import Frontier, PartialMap

ArrayLike = Union[float, np.ndarray]


@dataclass
class ValueMap:
    width: int
    height: int
    cell_size: float
    V: np.ndarray = field(default=None, repr=False)
    C: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if self.V is None:
            self.V = np.zeros((self.height, self.width))
        if self.C is None:
            self.C = np.zeros((self.height, self.width))

    @classmethod
    def like(cls, pmap: PartialMap) -> "ValueMap":
        return cls(width=pmap.width, height=pmap.height, cell_size=pmap.cell_size)


def confidence_profile(angle_offset: ArrayLike, fov: float) -> ArrayLike:
    """
    cos^2 falloff from 1 on the optical axis to 0 at the edge of the field of view

    Offsets beyond half the fov get 0.

    Example:
        >>> round(confidence_profile(22.5, 90.0), 12)
        0.5
    """
    half = fov / 2.0
    offset = np.abs(np.asarray(angle_offset, dtype=float))
    conf = np.where(offset <= half, np.cos(np.radians(offset / half * 90.0)) ** 2, 0.0)
    # cos(90 deg) is not exactly zero in floating point
    conf = np.where(offset >= half, 0.0, conf)
    return float(conf) if conf.ndim == 0 else conf


def fuse_values(
    v_curr: ArrayLike,
    c_curr: ArrayLike,
    v_prev: ArrayLike,
    c_prev: ArrayLike,
) -> Tuple[ArrayLike, ArrayLike]:
    """
    Confidence-weighted fusion of a new observation into a prior one

        v_new = (c_curr * v_curr + c_prev * v_prev) / (c_curr + c_prev)
        c_new = (c_curr^2 + c_prev^2) / (c_curr + c_prev)

    Where c_curr + c_prev == 0 the prior pair is returned unchanged.
    """
    v_curr, c_curr, v_prev, c_prev = np.broadcast_arrays(
        *(np.asarray(a, dtype=float) for a in (v_curr, c_curr, v_prev, c_prev))
    )
    total = c_curr + c_prev
    seen = total > 0
    safe = np.where(seen, total, 1.0)
    v_new = np.where(seen, (c_curr * v_curr + c_prev * v_prev) / safe, v_prev)
    c_new = np.where(seen, (c_curr * c_curr + c_prev * c_prev) / safe, c_prev)
    if v_new.ndim == 0:
        return float(v_new), float(c_new)
    return v_new, c_new


def bearing_offsets(pose: AgentPose, cells: np.ndarray, cell_size: float) -> np.ndarray:
    """Signed angle (degrees) between the heading and each cell center, in (-180, 180]"""
    xs = (cells[:, 1] + 0.5) * cell_size
    ys = (cells[:, 0] + 0.5) * cell_size
    bearing = np.degrees(np.arctan2(ys - pose.y, xs - pose.x))
    offset = (bearing - pose.heading) % 360.0
    return np.where(offset > 180.0, offset - 360.0, offset)


def fuse_observation(
    vm: ValueMap,
    pose: AgentPose,
    fov: float,
    score: float,
    visible_cells: Union[np.ndarray, Iterable[Cell]],
) -> ValueMap:
    """
    Fuse one scored observation into the visible cells (in place; the map is returned)

    The agent's own cell has no bearing and is skipped.
    """
    if not 0.0 <= score <= 1.0:
        raise ValueError(f"score must be in [0, 1], got {score}")
    cells = np.asarray(list(visible_cells) if not isinstance(visible_cells, np.ndarray) else visible_cells)
    cells = cells.reshape(-1, 2).astype(int)
    own = pose.cell(vm.cell_size)
    cells = cells[~((cells[:, 0] == own[0]) & (cells[:, 1] == own[1]))]
    if not len(cells):
        return vm

    rows, cols = cells[:, 0], cells[:, 1]
    c_curr = confidence_profile(bearing_offsets(pose, cells, vm.cell_size), fov)
    v_new, c_new = fuse_values(score, c_curr, vm.V[rows, cols], vm.C[rows, cols])
    vm.V[rows, cols] = np.clip(v_new, 0.0, 1.0)
    vm.C[rows, cols] = np.clip(c_new, 0.0, 1.0)
    return vm


def frontier_probability(
    vm: ValueMap,
    frontier: Frontier,
    radius: float = VALUE_RADIUS,
    epsilon: float = EPSILON,
) -> float:
    """
    P_S read-out: max V over observed cells within radius of the frontier midpoint

    Clamped to [epsilon, 1 - epsilon]; epsilon when nothing nearby was observed.
    """
    mx, my = cell_center(frontier.midpoint, vm.cell_size)
    reach = int(math.ceil(radius / vm.cell_size))
    r0, c0 = frontier.midpoint
    rows = slice(max(0, r0 - reach), min(vm.height, r0 + reach + 1))
    cols = slice(max(0, c0 - reach), min(vm.width, c0 + reach + 1))

    rr, cc = np.mgrid[rows, cols]
    dist = np.hypot((cc + 0.5) * vm.cell_size - mx, (rr + 0.5) * vm.cell_size - my)
    near = (dist <= radius + 1e-9) & (vm.C[rows, cols] > 0)
    if not near.any():
        return epsilon
    return float(np.clip(vm.V[rows, cols][near].max(), epsilon, 1.0 - epsilon))
