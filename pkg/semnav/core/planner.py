"""
Frontier selection

lsp      minimum expected cost of the whole remaining search, exact subset DP
greedy   highest success probability
nearest  shortest known-space distance (classic frontier exploration)
"""

import logging
from dataclasses import dataclass, replace
from enum import Enum
from typing import Iterable, List, Optional, Sequence

import numpy as np
from pydantic import BaseModel

from semnav.core.config import EXPLORATION_COST, MAX_FRONTIERS, SUCCESS_COST, VALUE_RADIUS
from semnav.core.exceptions import NoFrontierError
from semnav.core.grid_graph import Cell
from semnav.core.mapping import Frontier, PartialMap, pairwise_known_distances
from semnav.core.valuemap import ValueMap, frontier_probability

logger = logging.getLogger(__name__)

_TIE_TOLERANCE = 1e-9


class PlannerMethod(str, Enum):
    LSP = "lsp"
    GREEDY = "greedy"
    NEAREST = "nearest"


@dataclass(frozen=True, eq=False)
class PlannerState:
    """
    Frontier candidates with success probabilities and known-space distances

    pairwise_d is (n+1, n+1): index 0 is the agent, index i+1 is frontiers[i].
    """

    frontiers: Sequence[Frontier]
    probabilities: np.ndarray
    agent_cell: Cell
    pairwise_d: np.ndarray
    rs: float = SUCCESS_COST
    re: float = EXPLORATION_COST
    k: int = MAX_FRONTIERS

    def __post_init__(self):
        n = len(self.frontiers)
        if self.probabilities.shape != (n,):
            raise ValueError(f"expected {n} probabilities, got shape {self.probabilities.shape}")
        if self.pairwise_d.shape != (n + 1, n + 1):
            raise ValueError(f"expected a {(n + 1, n + 1)} distance matrix, got {self.pairwise_d.shape}")
        if n and not np.all((self.probabilities > 0) & (self.probabilities < 1)):
            raise ValueError("success probabilities must lie strictly between 0 and 1")

    @property
    def agent_distances(self) -> np.ndarray:
        return self.pairwise_d[0, 1:]

    @property
    def ids(self) -> List[int]:
        return [f.id for f in self.frontiers]


class FrontierRecord(BaseModel):
    id: int
    distance: float
    probability: float
    expected_cost: float


class PlanDecision(BaseModel):
    chosen: int
    method: PlannerMethod
    frontiers: List[FrontierRecord]
    step: Optional[int] = None

    @property
    def q_values(self) -> dict:
        return {f.id: f.expected_cost for f in self.frontiers}


def lsp_expected_costs(state: PlannerState, terminal_cost: float = 0.0) -> np.ndarray:
    """
    Expected cost Q of committing to each frontier first

        Q(a) = D(agent, a) + P(a) R_S + (1 - P(a)) (R_E + best continuation from a)

    The continuation is the same expression minimized over the frontiers not yet
    visited; with nothing left it costs terminal_cost.

    Returns:
        Q per frontier, in state.frontiers order

    Raises:
        NoFrontierError: no candidates
    """
    n = len(state.frontiers)
    if n == 0:
        raise NoFrontierError("no frontiers to plan over")

    p = state.probabilities
    d = state.pairwise_d
    immediate = p * state.rs + (1.0 - p) * state.re
    fail = 1.0 - p

    # best[mask, i]: cost-to-go after failing at i with `mask` still unvisited
    full = (1 << n) - 1
    best = np.full((1 << n, n), np.inf)
    best[0, :] = terminal_cost
    for mask in range(1, full + 1):
        members = [a for a in range(n) if mask >> a & 1]
        for a in members:
            rest = mask ^ (1 << a)
            via_a = d[1:, a + 1] + immediate[a] + fail[a] * best[rest, a]
            np.minimum(best[mask], via_a, out=best[mask])

    q = np.empty(n)
    for a in range(n):
        q[a] = d[0, a + 1] + immediate[a] + fail[a] * best[full ^ (1 << a), a]
    return q


def _decision(state: PlannerState, index: int, method: PlannerMethod, q: np.ndarray) -> PlanDecision:
    records = [
        FrontierRecord(
            id=f.id,
            distance=float(state.agent_distances[i]),
            probability=float(state.probabilities[i]),
            expected_cost=float(q[i]),
        )
        for i, f in enumerate(state.frontiers)
    ]
    return PlanDecision(chosen=state.frontiers[index].id, method=method, frontiers=records)


def _pick(state: PlannerState, candidates: Iterable[int]) -> int:
    return min(candidates, key=lambda i: (state.agent_distances[i], state.frontiers[i].id))


def select_frontier_lsp(state: PlannerState) -> PlanDecision:
    q = lsp_expected_costs(state)
    q_min = q.min()
    tied = np.flatnonzero(q <= q_min + _TIE_TOLERANCE * max(1.0, abs(q_min)))
    return _decision(state, _pick(state, tied), PlannerMethod.LSP, q)


def select_frontier_greedy(state: PlannerState) -> PlanDecision:
    q = lsp_expected_costs(state)
    p = state.probabilities
    tied = np.flatnonzero(p == p.max())
    return _decision(state, _pick(state, tied), PlannerMethod.GREEDY, q)


def select_frontier_nearest(state: PlannerState) -> PlanDecision:
    q = lsp_expected_costs(state)
    dist = state.agent_distances
    tied = np.flatnonzero(dist == dist.min())
    return _decision(state, _pick(state, tied), PlannerMethod.NEAREST, q)


_SELECTORS = {
    PlannerMethod.LSP: select_frontier_lsp,
    PlannerMethod.GREEDY: select_frontier_greedy,
    PlannerMethod.NEAREST: select_frontier_nearest,
}


def select_frontier(state: PlannerState, method: PlannerMethod) -> PlanDecision:
    return _SELECTORS[PlannerMethod(method)](state)


def prune_frontiers(state: PlannerState) -> PlannerState:
    """Keep the state.k frontiers nearest the agent; equal distances keep the lower id"""
    n = len(state.frontiers)
    if n <= state.k:
        return state
    order = sorted(range(n), key=lambda i: (state.agent_distances[i], state.frontiers[i].id))
    keep = sorted(order[:state.k])
    index = [0] + [i + 1 for i in keep]
    return replace(
        state,
        frontiers=[state.frontiers[i] for i in keep],
        probabilities=state.probabilities[keep],
        pairwise_d=state.pairwise_d[np.ix_(index, index)],
    )


def build_planner_state(
    pmap: PartialMap,
    vm: ValueMap,
    frontiers: Sequence[Frontier],
    agent_cell: Cell,
    rs: float = SUCCESS_COST,
    re: float = EXPLORATION_COST,
    k: int = MAX_FRONTIERS,
    radius: float = VALUE_RADIUS,
    excluded: Iterable[Cell] = (),
) -> PlannerState:
    """
    Planner input for the current map

    Frontiers whose midpoint is excluded or unreachable in known space are dropped,
    then the set is capped at k.
    """
    skip = set(excluded)
    candidates = [f for f in frontiers if f.midpoint not in skip]
    d = pairwise_known_distances(pmap, [agent_cell] + [f.midpoint for f in candidates])

    reachable = [i for i in range(len(candidates)) if np.isfinite(d[0, i + 1])]
    if len(reachable) < len(candidates):
        logger.debug("dropped %d unreachable frontiers", len(candidates) - len(reachable))
    index = [0] + [i + 1 for i in reachable]
    kept = [candidates[i] for i in reachable]

    state = PlannerState(
        frontiers=kept,
        probabilities=np.array([frontier_probability(vm, f, radius) for f in kept], dtype=float),
        agent_cell=agent_cell,
        pairwise_d=d[np.ix_(index, index)],
        rs=rs,
        re=re,
        k=k,
    )
    return prune_frontiers(state)
