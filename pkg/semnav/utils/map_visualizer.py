"""
Map visualizer - grayscale snapshots of the partial map and value map,
and the observation image sent to the external scorer
"""

import io
import logging
import os

import numpy as np
from PIL import Image, ImageDraw

from semnav.core.gridworld import DepthScan, HitKind
from semnav.core.mapping import CellState, PartialMap
from semnav.core.valuemap import ValueMap

logger = logging.getLogger(__name__)

# Gray levels for map snapshots
OBSTACLE_GRAY = 0
UNKNOWN_GRAY = 128
FREE_GRAY = 255

OBSERVATION_HEIGHT = 64


def map_to_gray(pmap: PartialMap) -> np.ndarray:
    gray = np.full(pmap.shape, UNKNOWN_GRAY, dtype=np.uint8)
    gray[pmap.state == CellState.FREE] = FREE_GRAY
    gray[pmap.state == CellState.OBSTACLE] = OBSTACLE_GRAY
    return gray


def values_to_gray(vm: ValueMap) -> np.ndarray:
    return np.round(np.clip(vm.V, 0.0, 1.0) * 255).astype(np.uint8)


def _save_pgm(gray: np.ndarray, path: str) -> str:
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    # Pillow writes mode "L" PPM-family files as binary P5
    Image.fromarray(gray).save(path, format="PPM")
    return path


def save_map_snapshot(pmap: PartialMap, output_dir: str, episode: str, step: int) -> str:
    """
    Write the partial map as map_<episode>_<step>.pgm

    Returns:
        Path of the written file
    """
    path = os.path.join(output_dir, f"map_{episode}_{step}.pgm")
    logger.debug("map snapshot %s", path)
    return _save_pgm(map_to_gray(pmap), path)


def save_value_snapshot(vm: ValueMap, output_dir: str, episode: str, step: int) -> str:
    """Write the value channel as value_<episode>_<step>.pgm"""
    path = os.path.join(output_dir, f"value_{episode}_{step}.pgm")
    logger.debug("value snapshot %s", path)
    return _save_pgm(values_to_gray(vm), path)


def render_observation_png(scan: DepthScan, height: int = OBSERVATION_HEIGHT) -> bytes:
    """
    Depth scan as a grayscale PNG strip

    One column per ray, left edge = leftmost ray; brighter is nearer. Each
    column is filled from the horizon outward in proportion to nearness, and
    target hits get a white marker on the top row.
    """
    rays = len(scan.ranges)
    nearness = 1.0 - np.clip(scan.ranges / scan.max_range, 0.0, 1.0)
    shade = np.round(40 + 200 * nearness).astype(np.uint8)

    image = Image.new("L", (rays, height), color=0)
    draw = ImageDraw.Draw(image)
    horizon = height // 2
    # rays are ordered right to left (angles increase counter-clockwise)
    for column, ray in enumerate(reversed(range(rays))):
        half = int(round(nearness[ray] * (horizon - 2)))
        draw.line([(column, horizon - half), (column, horizon + half)], fill=int(shade[ray]))
        if scan.hit_kinds[ray] == HitKind.TARGET:
            draw.point((column, 0), fill=255)

    buffer = io.BytesIO()
    image.save(buffer, format="PNG")
    return buffer.getvalue()
