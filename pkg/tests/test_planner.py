from itertools import permutations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from semnav.core.exceptions import NoFrontierError
from semnav.core.mapping import CellState, Frontier, PartialMap, extract_frontiers
from semnav.core.planner import (
    PlannerMethod,
    PlannerState,
    build_planner_state,
    lsp_expected_costs,
    prune_frontiers,
    select_frontier,
    select_frontier_greedy,
    select_frontier_lsp,
    select_frontier_nearest,
)
from semnav.core.valuemap import ValueMap


def _state(d, p, rs=3.0, re=6.0, k=8, ids=None):
    p = np.asarray(p, dtype=float)
    ids = ids if ids is not None else list(range(len(p)))
    frontiers = [Frontier(id=i, cells=((0, i),), midpoint=(0, i)) for i in ids]
    return PlannerState(
        frontiers=frontiers, probabilities=p, agent_cell=(9, 9),
        pairwise_d=np.asarray(d, dtype=float), rs=rs, re=re, k=k,
    )


def _two(d_qa, d_qb, d_ab, pa, pb, **kw):
    d = [[0.0, d_qa, d_qb], [d_qa, 0.0, d_ab], [d_qb, d_ab, 0.0]]
    return _state(d, [pa, pb], **kw)


def _ordering_cost(order, state, terminal=0.0):
    d, p = state.pairwise_d, state.probabilities
    total, reach, pos = 0.0, 1.0, 0
    for a in order:
        total += reach * (d[pos, a + 1] + p[a] * state.rs + (1 - p[a]) * state.re)
        reach *= 1 - p[a]
        pos = a + 1
    return total + reach * terminal


def _brute_force_q(state, terminal=0.0):
    n = len(state.frontiers)
    return np.array([
        min(
            _ordering_cost((a,) + rest, state, terminal)
            for rest in permutations([b for b in range(n) if b != a])
        )
        for a in range(n)
    ])


def _random_state(seed, n=None):
    rng = np.random.default_rng(seed)
    n = n or int(rng.integers(1, 7))
    points = rng.uniform(0.0, 10.0, size=(n + 1, 2))
    d = np.linalg.norm(points[:, None, :] - points[None, :, :], axis=-1)
    return _state(d, rng.uniform(0.02, 0.98, size=n))


def test_single_frontier_cost():
    state = _state([[0.0, 2.0], [2.0, 0.0]], [0.99])
    assert lsp_expected_costs(state) == pytest.approx([5.03], abs=1e-12)


def test_two_frontiers_match_both_visit_orders():
    state = _two(1.0, 4.0, 4.0, 0.2, 0.9)
    q = lsp_expected_costs(state)
    # a then b, b then a
    assert q[0] == pytest.approx(1 + 0.6 + 0.8 * 6 + 0.8 * (4 + 2.7 + 0.1 * 6))
    assert q[1] == pytest.approx(4 + 2.7 + 0.1 * 6 + 0.1 * (4 + 0.6 + 0.8 * 6))
    assert np.allclose(q, _brute_force_q(state), atol=1e-9)


@pytest.mark.parametrize("seed", range(200))
def test_dp_matches_exhaustive_orderings(seed):
    state = _random_state(seed)
    assert np.allclose(lsp_expected_costs(state), _brute_force_q(state), rtol=0, atol=1e-9)


def test_exact_tie_goes_to_nearer_frontier():
    state = _two(2.0, 1.0, 2.0, 0.625, 0.5)
    decision = select_frontier_lsp(state)
    assert decision.q_values == {0: 8.5625, 1: 8.5625}
    assert decision.chosen == 1


def test_lsp_picks_minimum():
    decision = select_frontier_lsp(_two(1.0, 8.0, 8.0, 0.5, 0.6))
    assert decision.q_values[0] == pytest.approx(11.6)
    assert decision.q_values[1] == pytest.approx(17.2)
    assert decision.chosen == 0
    assert decision.method == PlannerMethod.LSP


def test_lsp_and_greedy_disagree():
    state = _two(1.0, 8.0, 8.0, 0.5, 0.6)
    assert select_frontier_lsp(state).chosen == 0
    assert select_frontier_greedy(state).chosen == 1


def test_greedy_examples():
    d = np.array([[0, 1, 2, 3], [1, 0, 1, 2], [2, 1, 0, 1], [3, 2, 1, 0]], dtype=float)
    assert select_frontier_greedy(_state(d, [0.2, 0.9, 0.5])).chosen == 1

    tied = _two(3.0, 1.5, 2.0, 0.5, 0.5)
    assert select_frontier_greedy(tied).chosen == 1


def test_single_frontier_methods_agree():
    state = _state([[0.0, 4.0], [4.0, 0.0]], [0.3])
    assert select_frontier_lsp(state).chosen == select_frontier_greedy(state).chosen == 0
    assert select_frontier(state, "nearest").chosen == 0


def test_nearest_ignores_probability():
    assert select_frontier_nearest(_two(1.0, 8.0, 8.0, 0.1, 0.9)).chosen == 0


def test_decision_records_every_frontier():
    decision = select_frontier(_two(1.0, 8.0, 8.0, 0.5, 0.6), PlannerMethod.GREEDY)
    assert [(f.id, f.distance, f.probability) for f in decision.frontiers] == [(0, 1.0, 0.5), (1, 8.0, 0.6)]


def test_no_frontiers():
    empty = _state(np.zeros((1, 1)), [])
    with pytest.raises(NoFrontierError):
        lsp_expected_costs(empty)
    for method in PlannerMethod:
        with pytest.raises(NoFrontierError):
            select_frontier(empty, method)


def _star(distances, ids=None, k=8):
    n = len(distances)
    d = np.zeros((n + 1, n + 1))
    d[0, 1:] = d[1:, 0] = distances
    d[1:, 1:] = 1.0 - np.eye(n)
    return _state(d, [0.5] * n, k=k, ids=ids)


def test_prune_keeps_k_nearest():
    distances = [7.0, 2.0, 11.0, 5.0, 1.0, 9.0, 3.0, 12.0, 4.0, 10.0, 6.0, 8.0]
    pruned = prune_frontiers(_star(distances))
    assert len(pruned.frontiers) == 8
    assert sorted(pruned.agent_distances) == [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0]
    assert pruned.pairwise_d.shape == (9, 9)


def test_prune_under_cap_keeps_all():
    state = _star([3.0, 1.0, 2.0])
    assert prune_frontiers(state) is state


def test_prune_tie_at_cut_keeps_lower_id():
    pruned = prune_frontiers(_star([1, 2, 3, 4, 5, 6, 7, 8, 8], ids=[10, 11, 12, 13, 14, 15, 16, 18, 17]))
    assert 17 in pruned.ids and 18 not in pruned.ids


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 10_000), terminal=st.floats(-20.0, 20.0))
def test_terminal_cost_shifts_by_failure_mass(seed, terminal):
    state = _random_state(seed)
    shift = terminal * np.prod(1.0 - state.probabilities)
    q0, qt = lsp_expected_costs(state), lsp_expected_costs(state, terminal_cost=terminal)
    assert np.allclose(qt - q0, shift, atol=1e-9)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 10_000), alpha=st.floats(0.1, 10.0))
def test_joint_scaling(seed, alpha):
    state = _random_state(seed)
    scaled = _state(state.pairwise_d * alpha, state.probabilities, rs=3.0 * alpha, re=6.0 * alpha)
    q, q_scaled = lsp_expected_costs(state), lsp_expected_costs(scaled)
    assert np.allclose(q_scaled, alpha * q, rtol=1e-9, atol=1e-9)
    gaps = np.sort(q)
    if len(q) == 1 or gaps[1] - gaps[0] > 1e-6:
        assert np.argmin(q) == np.argmin(q_scaled)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 10_000), bump=st.floats(0.0, 1.0))
def test_raising_probability_never_raises_cost(seed, bump):
    state = _random_state(seed)
    p = state.probabilities.copy()
    p[0] = p[0] + (0.99 - p[0]) * bump
    raised = _state(state.pairwise_d, p)
    assert lsp_expected_costs(raised)[0] <= lsp_expected_costs(state)[0] + 1e-9


def _pmap(state):
    state = np.asarray(state, dtype=np.int8)
    return PartialMap(width=state.shape[1], height=state.shape[0], cell_size=0.25, state=state)


def test_build_state_drops_unreachable_and_excluded():
    state = np.full((5, 9), CellState.OBSTACLE)
    state[2, 1:6] = CellState.FREE
    state[2, 6] = CellState.UNKNOWN
    # sealed pocket with its own frontier
    state[4, 7] = CellState.FREE
    state[4, 8] = CellState.UNKNOWN
    pmap = _pmap(state)
    frontiers = extract_frontiers(pmap)
    assert len(frontiers) == 2

    planner_state = build_planner_state(pmap, ValueMap.like(pmap), frontiers, (2, 1))
    assert [f.midpoint for f in planner_state.frontiers] == [(2, 5)]
    assert planner_state.agent_distances == pytest.approx([1.0])
    assert planner_state.probabilities == pytest.approx([0.01])

    excluded = build_planner_state(pmap, ValueMap.like(pmap), frontiers, (2, 1), excluded=[(2, 5)])
    with pytest.raises(NoFrontierError):
        select_frontier_lsp(excluded)
