"""
Configuration module for the navigation stack
Contains episode rules, sensor and planner defaults, scenario presets
and environment-driven settings
"""

import os

from dotenv import load_dotenv

load_dotenv()

# Episode rules
CELL_SIZE = 0.25          # meters per grid cell
FORWARD_STEP = 0.25       # meters per MOVE_FORWARD
TURN_DEGREES = 30         # degrees per TURN_LEFT / TURN_RIGHT
SUCCESS_RADIUS = 1.0      # meters from a target cell center
MAX_STEPS = 500

# Depth sensor
SENSOR_FOV = 90.0
SENSOR_RAYS = 91
SENSOR_MAX_RANGE = 5.0

# Semantic scoring and value map
EPSILON = 0.01
ORACLE_LAMBDA = 5.0
VALUE_RADIUS = 0.5

# Frontier planning
SUCCESS_COST = 3.0        # R_S
EXPLORATION_COST = 6.0    # R_E
MAX_FRONTIERS = 8         # K
REPLAN_INTERVAL = 20

# Local navigation
ALIGN_THRESHOLD = 15.0
OBJECT_STOP_RADIUS = 0.9
FRONTIER_STOP_RADIUS = 0.25
STUCK_COLLISIONS = 3
LOOK_AROUND_TURNS = 360 // TURN_DEGREES

# Scenario generator presets (grid cells)
SCENARIO_PRESETS = {
    "small": {
        "width": 24,
        "height": 24,
        "min_rooms": 2,
        "max_rooms": 3,
        "min_room_size": 5,
        "max_room_size": 8,
        "description": "Two or three rooms, 6 m x 6 m"
    },
    "default": {
        "width": 36,
        "height": 36,
        "min_rooms": 3,
        "max_rooms": 5,
        "min_room_size": 5,
        "max_room_size": 10,
        "description": "Three to five rooms, 9 m x 9 m"
    },
    "large": {
        "width": 56,
        "height": 48,
        "min_rooms": 5,
        "max_rooms": 8,
        "min_room_size": 6,
        "max_room_size": 12,
        "description": "Five to eight rooms, 14 m x 12 m"
    }
}

TARGET_LABELS = ("bed", "couch", "chair", "potted plant", "toilet", "tv")

# External scorer
VLM_KEY_ENV = "SEMNAV_VLM_KEY"
VLM_MODEL = os.getenv("SEMNAV_VLM_MODEL", "gpt-4o")
VLM_TIMEOUT = 30.0
VLM_PROMPT = (
    "Output only a floating point value denoting the likelihood of finding "
    "a {target} if I move in this direction."
)

# Results store
DATABASE_URL = os.getenv("SEMNAV_DATABASE_URL", "sqlite:///semnav.db")


def get_preset(name: str) -> dict:
    """
    Get generator parameters for a named scenario preset

    Args:
        name: Preset name ("small", "default" or "large")

    Returns:
        Dictionary of generator parameters without the description

    Example:
        >>> get_preset("small")["width"]
        24
    """
    if name not in SCENARIO_PRESETS:
        raise KeyError(f"Unknown scenario preset: {name}")
    return {k: v for k, v in SCENARIO_PRESETS[name].items() if k != "description"}


def get_vlm_api_key() -> str:
    """
    API key for the external scorer, read from the environment (.env honored)
    """
    return os.getenv(VLM_KEY_ENV, "")


def build_prompt(target_label: str) -> str:
    """
    Scorer prompt with the target object substituted

    Example:
        >>> build_prompt("couch").endswith("a couch if I move in this direction.")
        True
    """
    return VLM_PROMPT.format(target=target_label.strip())
