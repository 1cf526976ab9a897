import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from pydantic import ValidationError

from conftest import make_world, open_rows
from semnav.core.gridworld import (
    Action,
    AgentPose,
    HitKind,
    WorldSpec,
    is_success,
    sense_depth,
    step,
    swept_cells,
    wrap_degrees,
)


def test_forward_moves_a_quarter_meter(open_room):
    pose, collided = step(open_room, AgentPose(x=1.0, y=1.0, heading=0), Action.MOVE_FORWARD)
    assert not collided
    assert (pose.x, pose.y, pose.heading) == (1.25, 1.0, 0)


def test_turns_are_thirty_degrees(open_room):
    pose = AgentPose(x=1.0, y=1.0, heading=0)
    left, _ = step(open_room, pose, Action.TURN_LEFT)
    right, _ = step(open_room, pose, Action.TURN_RIGHT)
    assert left.heading == 30
    assert right.heading == 330
    assert (left.x, left.y) == (pose.x, pose.y)


def test_stop_leaves_pose_unchanged(open_room):
    pose = AgentPose(x=1.0, y=1.0, heading=90)
    assert step(open_room, pose, Action.STOP) == (pose, False)


def test_blocked_forward_is_a_no_op(open_room):
    # east wall starts at x = 2.75
    pose = AgentPose(x=2.65, y=1.0, heading=0)
    moved, collided = step(open_room, pose, Action.MOVE_FORWARD)
    assert collided
    assert moved == pose


def test_forward_move_clipping_an_obstacle_corner_collides():
    # the segment from (2, 1) to (1, 2) briefly crosses the corner of (2, 2)
    pose = AgentPose(x=0.346, y=0.5916, heading=330)
    corner = make_world(open_rows(6, 6, start=(1, 1), target=(4, 4), walls=[(2, 2)]))
    assert step(corner, pose, Action.MOVE_FORWARD) == (pose, True)

    clear = make_world(open_rows(6, 6, start=(1, 1), target=(4, 4)))
    moved, collided = step(clear, pose, Action.MOVE_FORWARD)
    assert not collided
    assert moved.cell(clear.cell_size) == (1, 2)


def test_swept_cells_follow_boundary_crossings():
    assert swept_cells(0.346, 0.5916, 0.5625, 0.4666, 0.25) == [(2, 1), (2, 2), (1, 2)]
    assert swept_cells(0.6, 0.6, 0.5, 0.6, 0.25) == [(2, 2)]
    assert swept_cells(0.4, 0.4, 0.6, 0.6, 0.25) == [(1, 1), (2, 1), (1, 2), (2, 2)]


def test_heading_must_be_on_turn_grid():
    with pytest.raises(ValidationError):
        AgentPose(x=0.0, y=0.0, heading=45)
    with pytest.raises(ValidationError):
        AgentPose(x=0.0, y=0.0, heading=360)


def test_wrap_degrees():
    assert wrap_degrees(190) == -170
    assert wrap_degrees(-180) == 180
    assert wrap_degrees(30) == 30


def _wall_world():
    # solid wall in column 10 (x from 2.5 m)
    rows = []
    for r in range(9):
        row = ["."] * 14
        row[10] = "#"
        rows.append(row)
    rows[4][2] = "S"
    rows[8][13] = "T"
    return make_world(["".join(r) for r in rows])


def test_center_ray_hits_wall_two_meters_ahead():
    world = _wall_world()
    scan = sense_depth(world, AgentPose(x=0.5, y=1.125, heading=0))
    c = scan.center_index
    assert scan.ray_angles[c] == 0.0
    assert scan.ranges[c] == pytest.approx(2.0, abs=1e-12)
    assert scan.hit_kinds[c] == HitKind.OBSTACLE
    assert tuple(scan.hit_cells[c]) == (4, 10)


def test_open_space_rays_reach_max_range():
    rows = open_rows(40, 40, start=(20, 20), target=(1, 1))
    world = make_world(rows)
    scan = sense_depth(world, world.start, max_range=2.0)
    assert np.all(scan.ranges == 2.0)
    assert set(scan.hit_kinds) == {HitKind.MAX_RANGE}
    assert np.all(scan.hit_cells == -1)


def test_target_on_axis_is_reported_as_target():
    rows = open_rows(12, 6, start=(2, 2), target=(2, 6))
    world = make_world(rows)
    scan = sense_depth(world, AgentPose(x=0.5, y=0.625, heading=0))
    c = scan.center_index
    assert scan.hit_kinds[c] == HitKind.TARGET
    assert scan.ranges[c] == pytest.approx(1.0, abs=1e-12)
    assert c in scan.target_rays()


def test_scan_shape_and_bounds(open_room):
    scan = sense_depth(open_room, open_room.start)
    assert len(scan.ranges) == 91
    assert scan.ray_angles[0] == -45.0 and scan.ray_angles[-1] == 45.0
    assert np.all(scan.ranges >= 0) and np.all(scan.ranges <= scan.max_range)


@pytest.mark.parametrize("fov,rays", [(0, 91), (190, 91), (90, 90)])
def test_sense_depth_rejects_bad_sensor(open_room, fov, rays):
    with pytest.raises(ValueError):
        sense_depth(open_room, open_room.start, fov=fov, rays=rays)


@pytest.mark.parametrize("offset,expected", [(0.9, True), (0.99, True), (1.01, False), (1.1, False)])
def test_success_radius_boundary(offset, expected):
    world = make_world(open_rows(16, 12, start=(5, 3), target=(5, 10)))
    tx, ty = (10 + 0.5) * 0.25, (5 + 0.5) * 0.25
    pose = AgentPose(x=tx - offset, y=ty, heading=0)
    assert is_success(world, pose, stopped=True, steps=120) is expected


def test_success_requires_stop_and_budget():
    world = make_world(open_rows(16, 12, start=(5, 3), target=(5, 10)))
    pose = AgentPose(x=(10 + 0.5) * 0.25 - 0.5, y=(5 + 0.5) * 0.25)
    assert not is_success(world, pose, stopped=False, steps=10)
    assert is_success(world, pose, stopped=True, steps=500)
    assert not is_success(world, pose, stopped=True, steps=501)


def test_world_is_read_only(open_room):
    with pytest.raises(ValueError):
        open_room.cells[3, 3] = True
    assert open_room.cells[1, 1]  # target cells block movement


def test_world_rejects_unreachable_target():
    cells = np.zeros((5, 5), dtype=bool)
    cells[0:3, 0:3] = True
    with pytest.raises(ValueError):
        WorldSpec(
            width=5, height=5, cell_size=0.25, cells=cells, targets=frozenset({(1, 1)}),
            start=AgentPose.at_cell((4, 4)), target_label="bed",
        )


actions = st.lists(st.sampled_from(list(Action)), max_size=60)


@settings(max_examples=50, deadline=None)
@given(seq=actions)
def test_heading_and_position_invariants(seq):
    world = make_world(open_rows(12, 10, start=(5, 5), target=(1, 1), walls=[(4, 7), (5, 7), (3, 3)]))
    pose = world.start
    for action in seq:
        pose, _ = step(world, pose, action)
        assert pose.heading % 30 == 0 and 0 <= pose.heading < 360
        assert world.is_free(pose.cell(world.cell_size))


@settings(max_examples=40, deadline=None)
@given(
    heading=st.sampled_from(range(0, 360, 30)),
    removed=st.sampled_from([(3, 8), (6, 2), (2, 5), (7, 7)]),
)
def test_removing_an_obstacle_never_shortens_a_ray(heading, removed):
    walls = [(3, 8), (6, 2), (2, 5), (7, 7)]
    before = make_world(open_rows(12, 10, start=(5, 5), target=(1, 10), walls=walls))
    after = make_world(open_rows(12, 10, start=(5, 5), target=(1, 10), walls=[w for w in walls if w != removed]))
    pose = before.start.model_copy(update={"heading": heading})
    assert np.all(sense_depth(after, pose).ranges >= sense_depth(before, pose).ranges - 1e-12)


def test_sensing_and_stepping_are_deterministic(open_room):
    pose = AgentPose(x=1.3, y=1.7, heading=60)
    a, b = sense_depth(open_room, pose), sense_depth(open_room, pose)
    assert np.array_equal(a.ranges, b.ranges) and a.hit_kinds == b.hit_kinds
    assert step(open_room, pose, Action.MOVE_FORWARD) == step(open_room, pose, Action.MOVE_FORWARD)
    moved, _ = step(open_room, pose, Action.MOVE_FORWARD)
    assert moved.distance_to(pose.x, pose.y) == pytest.approx(0.25, abs=1e-8)


@settings(max_examples=200, deadline=None)
@given(
    x=st.floats(0.3, 0.7),
    y=st.floats(0.3, 0.7),
    heading=st.sampled_from(range(0, 360, 30)),
)
def test_swept_cells_cover_every_point_of_the_move(x, y, heading):
    theta = np.radians(heading)
    x1, y1 = round(x + 0.25 * np.cos(theta), 9), round(y + 0.25 * np.sin(theta), 9)
    swept = set(swept_cells(x, y, x1, y1, 0.25))
    assert (int(np.floor(y1 / 0.25)), int(np.floor(x1 / 0.25))) in swept
    t = np.linspace(0.0, 1.0, 2001)[1:-1]
    rows = np.floor((y + t * (y1 - y)) / 0.25).astype(int)
    cols = np.floor((x + t * (x1 - x)) / 0.25).astype(int)
    assert set(zip(rows.tolist(), cols.tolist())) <= swept
