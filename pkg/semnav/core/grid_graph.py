"""
Grid shortest paths - scipy sparse-graph Dijkstra over passable cells

8-connected; axis step = cell_size, diagonal step = cell_size * sqrt(2).
A diagonal move requires both orthogonal cells to be passable.
"""

import math
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

Cell = Tuple[int, int]

# Half of the 8-neighborhood; the reverse edges are added explicitly
_OFFSETS = ((0, 1), (1, 0), (1, 1), (1, -1))

NEIGHBORS_8 = ((-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1))
NEIGHBORS_4 = ((-1, 0), (0, -1), (0, 1), (1, 0))


def build_grid_graph(passable: np.ndarray, cell_size: float) -> csr_matrix:
    """
    Build the sparse adjacency matrix of the passable cells

    Args:
        passable: Boolean (height, width) array
        cell_size: Meters per cell

    Returns:
        CSR matrix of shape (height*width, height*width) with edge lengths in meters
    """
    height, width = passable.shape
    index = np.arange(height * width).reshape(height, width)
    sources, targets, weights = [], [], []

    for dr, dc in _OFFSETS:
        r1 = height - dr
        c0, c1 = max(0, -dc), width - max(0, dc)
        ok = passable[0:r1, c0:c1] & passable[dr:r1 + dr, c0 + dc:c1 + dc]
        if dr and dc:
            ok &= passable[dr:r1 + dr, c0:c1] & passable[0:r1, c0 + dc:c1 + dc]
            length = cell_size * math.sqrt(2.0)
        else:
            length = cell_size

        a = index[0:r1, c0:c1][ok]
        b = index[dr:r1 + dr, c0 + dc:c1 + dc][ok]
        sources.extend((a, b))
        targets.extend((b, a))
        weights.append(np.full(2 * a.size, length))

    n = height * width
    return csr_matrix(
        (np.concatenate(weights), (np.concatenate(sources), np.concatenate(targets))),
        shape=(n, n),
    )


def _flat(cells: Iterable[Cell], width: int) -> List[int]:
    return [r * width + c for r, c in cells]


def distance_fields(passable: np.ndarray, sources: Sequence[Cell], cell_size: float) -> np.ndarray:
    """
    One distance field per source cell

    Returns:
        Array (len(sources), height, width); np.inf where unreachable
    """
    height, width = passable.shape
    if not sources:
        return np.empty((0, height, width))
    graph = build_grid_graph(passable, cell_size)
    dist = dijkstra(graph, directed=True, indices=_flat(sources, width))
    return np.asarray(dist).reshape(len(sources), height, width)


def nearest_source_field(passable: np.ndarray, sources: Sequence[Cell], cell_size: float) -> np.ndarray:
    """
    Distance from every cell to the nearest of several passable sources

    Non-passable sources are ignored. Returns an all-inf field if none remain.
    """
    height, width = passable.shape
    usable = [cell for cell in sources if passable[cell]]
    if not usable:
        return np.full((height, width), np.inf)
    graph = build_grid_graph(passable, cell_size)
    dist = dijkstra(graph, directed=True, indices=_flat(usable, width), min_only=True)
    return np.asarray(dist).reshape(height, width)


def shortest_path_to_any(
    passable: np.ndarray,
    start: Cell,
    goals: Sequence[Cell],
    cell_size: float,
) -> Optional[Tuple[List[Cell], float]]:
    """
    Shortest path from start to the closest reachable goal

    Ties between equally distant goals go to the lexicographically smallest cell.

    Returns:
        (cells from start to goal inclusive, length in meters) or None if no goal is reachable
    """
    height, width = passable.shape
    graph = build_grid_graph(passable, cell_size)
    start_index = start[0] * width + start[1]
    dist, predecessors = dijkstra(
        graph, directed=True, indices=start_index, return_predecessors=True
    )

    reachable = [g for g in goals if np.isfinite(dist[g[0] * width + g[1]])]
    if not reachable:
        return None
    goal = min(reachable, key=lambda g: (dist[g[0] * width + g[1]], g))

    path = []
    node = goal[0] * width + goal[1]
    while node != start_index:
        path.append((int(node // width), int(node % width)))
        node = predecessors[node]
    path.append(start)
    path.reverse()
    return path, float(dist[goal[0] * width + goal[1]])
