import numpy as np
import pytest

from semnav.core.exceptions import ScenarioInvariantError, ScenarioParseError
from semnav.core.gridworld import AgentPose, WorldSpec
from semnav.core.scenario_generator import ScenarioParams, generate_scenario
from semnav.core.scenario_io import dump_scenario, load_scenario, parse_scenario, save_scenario

MINIMAL = """semnav-scenario v1
3 3 0.25
...
.S.
..T
target_label: chair
"""


def test_minimal_file(tmp_path):
    path = tmp_path / "tiny.txt"
    path.write_text(MINIMAL, encoding="utf-8")
    world = load_scenario(path)
    assert world.targets == frozenset({(2, 2)})
    assert world.start == AgentPose(x=0.375, y=0.375, heading=0)
    assert world.target_label == "chair"
    assert world.cells.sum() == 1


def test_start_on_obstacle_is_rejected_with_position():
    cells = np.zeros((3, 3), dtype=bool)
    cells[1, 1] = True
    with pytest.raises(ScenarioInvariantError) as err:
        WorldSpec(
            width=3, height=3, cell_size=0.25, cells=cells, targets=frozenset({(2, 2)}),
            start=AgentPose.at_cell((1, 1)), target_label="chair",
        )
    assert (err.value.row, err.value.column) == (1, 1)


def test_generated_world_round_trips(tmp_path):
    params = ScenarioParams(width=20, height=20, min_rooms=2, max_rooms=3, min_room_size=4, max_room_size=7)
    world = generate_scenario(3, params)
    path = save_scenario(world, tmp_path / "nested" / "seed3.txt")
    assert load_scenario(path) == world
    assert dump_scenario(parse_scenario(dump_scenario(world))) == dump_scenario(world)


@pytest.mark.parametrize(
    "text,line,column",
    [
        ("semnav-scenario v2\n3 3 0.25\n...\n.S.\n..T\ntarget_label: x\n", 1, None),
        ("semnav-scenario v1\n3 three 0.25\n...\n.S.\n..T\ntarget_label: x\n", 2, None),
        ("semnav-scenario v1\n3 3 0.25\n...\n.S?\n..T\ntarget_label: x\n", 4, 3),
        ("semnav-scenario v1\n3 3 0.25\n...\n.S\n..T\ntarget_label: x\n", 4, None),
        ("semnav-scenario v1\n3 3 0.25\nS..\n.S.\n..T\ntarget_label: x\n", 4, None),
        ("semnav-scenario v1\n3 3 0.25\n...\n.S.\n..T\nlabel: x\n", 6, None),
        ("semnav-scenario v1\n3 3 0.25\n...\n.S.\n..T\ntarget_label: x\nextra\n", 7, None),
    ],
)
def test_parse_errors_report_line_and_column(text, line, column):
    with pytest.raises(ScenarioParseError) as err:
        parse_scenario(text)
    assert err.value.line == line
    assert err.value.column == column


def test_missing_start_is_a_parse_error():
    with pytest.raises(ScenarioParseError):
        parse_scenario(MINIMAL.replace("S", "."))


def test_target_without_free_neighbor_is_rejected():
    text = "semnav-scenario v1\n4 4 0.25\nS...\n..##\n..#T\n..##\ntarget_label: bed\n"
    with pytest.raises(ScenarioInvariantError) as err:
        parse_scenario(text)
    assert (err.value.row, err.value.column) == (2, 3)
