"""
Scenario file reader/writer (format "semnav-scenario v1")

    semnav-scenario v1
    <width> <height> <cell_size>
    <height rows of '#' obstacle, '.' free, 'T' target, 'S' start>
    target_label: <text>

Parse errors report 1-based file line and column; invariant errors report
0-based grid row and column.
"""

import os
from typing import List, Union

import numpy as np

from semnav.core.exceptions import ScenarioParseError
from semnav.core.gridworld import AgentPose, WorldSpec

HEADER = "semnav-scenario v1"
LABEL_PREFIX = "target_label:"

OBSTACLE_CHAR = "#"
FREE_CHAR = "."
TARGET_CHAR = "T"
START_CHAR = "S"
_GRID_CHARS = {OBSTACLE_CHAR, FREE_CHAR, TARGET_CHAR, START_CHAR}


def parse_scenario(text: str) -> WorldSpec:
    """
    Parse scenario text into a validated WorldSpec

    Raises:
        ScenarioParseError: malformed text
        ScenarioInvariantError: well-formed text describing an invalid world
    """
    lines: List[str] = text.splitlines()
    while lines and not lines[-1].strip():
        lines.pop()

    if not lines or lines[0].strip() != HEADER:
        raise ScenarioParseError(f"expected header '{HEADER}'", line=1)

    if len(lines) < 2:
        raise ScenarioParseError("missing 'width height cell_size' line", line=2)
    dims = lines[1].split()
    if len(dims) != 3:
        raise ScenarioParseError("expected 'width height cell_size'", line=2)
    try:
        width, height = int(dims[0]), int(dims[1])
        cell_size = float(dims[2])
    except ValueError:
        raise ScenarioParseError(f"cannot read dimensions from '{lines[1].strip()}'", line=2)
    if width < 1 or height < 1:
        raise ScenarioParseError(f"grid must be at least 1x1, got {width}x{height}", line=2)
    if cell_size <= 0:
        raise ScenarioParseError(f"cell_size must be positive, got {cell_size}", line=2)

    if len(lines) < 2 + height + 1:
        raise ScenarioParseError(f"expected {height} grid rows and a target_label line", line=len(lines) + 1)

    cells = np.zeros((height, width), dtype=bool)
    targets = set()
    starts = []
    for row in range(height):
        line_no = row + 3
        raw = lines[2 + row].rstrip("\r")
        if len(raw) != width:
            raise ScenarioParseError(f"row has {len(raw)} cells, expected {width}", line=line_no)
        for col, char in enumerate(raw):
            if char not in _GRID_CHARS:
                raise ScenarioParseError(f"unknown cell character '{char}'", line=line_no, column=col + 1)
            if char == OBSTACLE_CHAR:
                cells[row, col] = True
            elif char == TARGET_CHAR:
                targets.add((row, col))
            elif char == START_CHAR:
                starts.append((row, col, line_no))

    if len(starts) != 1:
        line_no = starts[1][2] if len(starts) > 1 else 3
        raise ScenarioParseError(f"expected exactly one '{START_CHAR}', found {len(starts)}", line=line_no)

    label_line_no = 3 + height
    label_line = lines[2 + height].strip()
    if not label_line.startswith(LABEL_PREFIX):
        raise ScenarioParseError(f"expected '{LABEL_PREFIX} <text>'", line=label_line_no)
    if len(lines) > 3 + height:
        raise ScenarioParseError("unexpected content after target_label", line=label_line_no + 1)
    target_label = label_line[len(LABEL_PREFIX):].strip()

    start_row, start_col, _ = starts[0]
    return WorldSpec(
        width=width,
        height=height,
        cell_size=cell_size,
        cells=cells,
        targets=frozenset(targets),
        start=AgentPose.at_cell((start_row, start_col), heading=0, cell_size=cell_size),
        target_label=target_label,
    )


def load_scenario(path: Union[str, os.PathLike]) -> WorldSpec:
    """
    Load and validate a scenario file

    Args:
        path: Scenario file location (UTF-8 text)

    Returns:
        Validated WorldSpec
    """
    with open(path, "r", encoding="utf-8") as f:
        return parse_scenario(f.read())


def dump_scenario(world: WorldSpec) -> str:
    """
    Serialize a world to scenario text

    The start is written as the 'S' cell; its heading is not stored (reloads as 0).
    """
    start_cell = world.start.cell(world.cell_size)
    rows = []
    for row in range(world.height):
        chars = []
        for col in range(world.width):
            if (row, col) == start_cell:
                chars.append(START_CHAR)
            elif (row, col) in world.targets:
                chars.append(TARGET_CHAR)
            elif world.cells[row, col]:
                chars.append(OBSTACLE_CHAR)
            else:
                chars.append(FREE_CHAR)
        rows.append("".join(chars))

    return "\n".join(
        [HEADER, f"{world.width} {world.height} {world.cell_size!r}", *rows, f"{LABEL_PREFIX} {world.target_label}"]
    ) + "\n"


def save_scenario(world: WorldSpec, path: Union[str, os.PathLike]) -> str:
    """
    Write a world to a scenario file

    Returns:
        The path written
    """
    directory = os.path.dirname(os.fspath(path))
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        f.write(dump_scenario(world))
    return os.fspath(path)
