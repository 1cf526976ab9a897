"""
Episode runner - sense, map, score, fuse, plan and act until STOP or the step budget runs out
"""

import logging
from collections import deque
from enum import Enum
from typing import List, Optional, Set

import httpx
from pydantic import BaseModel, ConfigDict, Field, model_validator

from semnav.core.config import (
    EPSILON,
    EXPLORATION_COST,
    FORWARD_STEP,
    LOOK_AROUND_TURNS,
    MAX_FRONTIERS,
    MAX_STEPS,
    ORACLE_LAMBDA,
    REPLAN_INTERVAL,
    SENSOR_FOV,
    SENSOR_MAX_RANGE,
    SENSOR_RAYS,
    STUCK_COLLISIONS,
    SUCCESS_COST,
    SUCCESS_RADIUS,
    VALUE_RADIUS,
    VLM_TIMEOUT,
)
from semnav.core.exceptions import NoFrontierError, NoPathError
from semnav.core.grid_graph import Cell, nearest_source_field
from semnav.core.gridworld import Action, AgentPose, DepthScan, WorldSpec, cell_center, is_success, sense_depth
from semnav.core.gridworld import step as apply_action
from semnav.core.mapping import (
    CellState,
    PartialMap,
    apply_observation,
    extract_frontiers,
    is_frontier_cell,
    observed_cells,
)
from semnav.core.navigator import NavGoal, goal_from_detection, next_action, plan_path, recover_if_stuck
from semnav.core.planner import PlanDecision, PlannerMethod, build_planner_state, select_frontier
from semnav.core.scorer import (
    ExternalScorer,
    MockScorer,
    MockTable,
    OracleScorer,
    ScanSummary,
    ScorerKind,
    ScoreRequest,
    score_or_floor,
)
from semnav.core.valuemap import ValueMap, fuse_observation
from semnav.utils.map_visualizer import render_observation_png, save_map_snapshot, save_value_snapshot

logger = logging.getLogger(__name__)

# Floor for the oracle path when the start already lies within the success radius
MIN_ORACLE_PATH = 1e-6


class Termination(str, Enum):
    STOP = "stop"
    MAX_STEPS = "max_steps"
    NO_FRONTIER = "no_frontier"
    ERROR = "error"


class EpisodeConfig(BaseModel):
    """Run-level settings for one episode; invalid values raise ValidationError"""

    model_config = ConfigDict(frozen=True)

    planner: PlannerMethod = PlannerMethod.LSP
    scorer: ScorerKind = ScorerKind.ORACLE
    max_steps: int = Field(MAX_STEPS, ge=1)
    fov: float = Field(SENSOR_FOV, gt=0, le=180)
    rays: int = Field(SENSOR_RAYS, ge=1)
    max_range: float = Field(SENSOR_MAX_RANGE, gt=0)
    rs: float = Field(SUCCESS_COST, gt=0)
    re: float = Field(EXPLORATION_COST, gt=0)
    k: int = Field(MAX_FRONTIERS, ge=1, le=12)
    seed: int = 0
    oracle_lambda: float = Field(ORACLE_LAMBDA, gt=0)
    mock_table: MockTable = Field(default_factory=MockTable)
    vlm_endpoint: Optional[str] = None
    vlm_timeout: float = Field(VLM_TIMEOUT, gt=0)
    replan_interval: int = Field(REPLAN_INTERVAL, ge=1)
    value_radius: float = Field(VALUE_RADIUS, gt=0)

    @model_validator(mode="after")
    def check_providers(self):
        if self.rays % 2 == 0:
            raise ValueError(f"rays must be odd, got {self.rays}")
        if self.scorer == ScorerKind.EXTERNAL and not self.vlm_endpoint:
            raise ValueError("the external scorer needs vlm_endpoint")
        return self

    @property
    def config_id(self) -> str:
        return f"{self.planner.value}-{self.scorer.value}-rs{self.rs:g}-re{self.re:g}-k{self.k}"


class StepRecord(BaseModel):
    step: int
    pose: AgentPose
    action: Action
    score: float
    collided: bool
    decision: Optional[PlanDecision] = None
    scorer_error: Optional[str] = None


class EpisodeResult(BaseModel):
    scenario: str = "0"
    config_id: str = ""
    success: bool
    steps: int = Field(ge=0)
    agent_path_length: float = Field(ge=0)
    oracle_shortest: float = Field(gt=0)
    termination: Termination
    trace: List[StepRecord] = Field(default_factory=list)
    error: Optional[str] = None


def oracle_shortest(world: WorldSpec) -> float:
    """
    Ground-truth shortest path from the start to any free cell within the success radius
    of a target (np.inf when none is reachable)
    """
    sources = world.cells_within_success_radius(SUCCESS_RADIUS)
    field = nearest_source_field(world.free, sources, world.cell_size)
    return max(float(field[world.start.cell(world.cell_size)]), MIN_ORACLE_PATH)


def build_scorer(cfg: EpisodeConfig, world: WorldSpec, client: Optional[httpx.Client] = None):
    if cfg.scorer == ScorerKind.MOCK:
        return MockScorer(cfg.mock_table)
    if cfg.scorer == ScorerKind.ORACLE:
        return OracleScorer(world, lam=cfg.oracle_lambda, max_range=cfg.max_range)
    return ExternalScorer(cfg.vlm_endpoint, timeout=cfg.vlm_timeout, client=client)


class EpisodeRunner:
    """
    One episode of object-goal search in a known-nothing map

    Each step: depth scan -> partial map -> semantic score -> value map fusion ->
    subgoal (detected object, else planned frontier) -> one action.
    """

    def __init__(
        self,
        world: WorldSpec,
        cfg: EpisodeConfig,
        scorer=None,
        snapshot_dir: Optional[str] = None,
        label: str = "0",
    ):
        self.world = world
        self.cfg = cfg
        self.scorer = scorer or build_scorer(cfg, world)
        self.snapshot_dir = snapshot_dir
        self.label = label

        self.pose = world.start
        self.pmap = PartialMap.for_world(world)
        self.vm = ValueMap.like(self.pmap)

        self.object_goal: Optional[NavGoal] = None
        self.frontier_goal: Optional[NavGoal] = None
        self.path: List[Cell] = []
        self.path_goal: Optional[NavGoal] = None

        self.force_replan = True
        self.steps_since_replan = 0
        self.look_turns = 0
        self.idle_turns = 0
        self.excluded: Set[Cell] = set()
        self.history = deque(maxlen=STUCK_COLLISIONS)

    def _request(self, scan: DepthScan) -> ScoreRequest:
        if getattr(self.scorer, "needs_image", False):
            return ScoreRequest(
                target_label=self.world.target_label, pose=self.pose, image_png=render_observation_png(scan)
            )
        return ScoreRequest(
            target_label=self.world.target_label, pose=self.pose, scan_summary=ScanSummary.from_scan(scan)
        )

    def _sense(self):
        scan = sense_depth(self.world, self.pose, self.cfg.fov, self.cfg.rays, self.cfg.max_range)
        free, blocked = observed_cells(self.pose, scan, self.pmap.cell_size, self.pmap.shape)
        apply_observation(self.pmap, self.pose, free, blocked)

        score, error = score_or_floor(self.scorer, self._request(scan), EPSILON)
        visible = free[self.pmap.state[free[:, 0], free[:, 1]] == CellState.FREE] if len(free) else free
        fuse_observation(self.vm, self.pose, self.cfg.fov, score, visible)
        return scan, score, error

    def _replan(self, step: int) -> Optional[PlanDecision]:
        self.force_replan = False
        self.steps_since_replan = 0
        self.look_turns = 0

        state = build_planner_state(
            self.pmap, self.vm, extract_frontiers(self.pmap), self.pose.cell(self.pmap.cell_size),
            rs=self.cfg.rs, re=self.cfg.re, k=self.cfg.k, radius=self.cfg.value_radius,
            excluded=self.excluded,
        )
        if not state.frontiers:
            self.frontier_goal = None
            return None

        decision = select_frontier(state, self.cfg.planner).model_copy(update={"step": step})
        chosen = next(f for f in state.frontiers if f.id == decision.chosen)
        self.frontier_goal = NavGoal.frontier(chosen.midpoint)
        logger.debug(
            "step %d: %s chose frontier %d at %s of %d", step, decision.method.value,
            chosen.id, chosen.midpoint, len(state.frontiers),
        )
        if self.snapshot_dir:
            save_map_snapshot(self.pmap, self.snapshot_dir, self.label, step)
            save_value_snapshot(self.vm, self.snapshot_dir, self.label, step)
        return decision

    def _path_to(self, goal: NavGoal) -> List[Cell]:
        """Cached path, recomputed when the goal changes or the agent leaves it"""
        here = self.pose.cell(self.pmap.cell_size)
        stale = (
            goal != self.path_goal
            or here not in self.path
            or not all(self.pmap.is_free(cell) for cell in self.path)
        )
        if stale:
            self.path = plan_path(self.pmap, here, goal)
            self.path_goal = goal
        return self.path

    def _exclude_frontier_at(self, cell: Cell) -> None:
        for frontier in extract_frontiers(self.pmap):
            if cell in frontier.cells:
                self.excluded.update(frontier.cells)
                return
        self.excluded.add(cell)

    def _explore(self, step: int):
        decision = None
        goal = self.frontier_goal
        lost = goal is None or not is_frontier_cell(self.pmap, goal.cell)
        if self.force_replan or lost or self.steps_since_replan >= self.cfg.replan_interval:
            decision = self._replan(step)

        if self.frontier_goal is None:
            self.idle_turns += 1
            if self.idle_turns > LOOK_AROUND_TURNS:
                raise NoFrontierError(f"no reachable frontier after {LOOK_AROUND_TURNS} turns")
            return Action.TURN_LEFT, decision
        self.idle_turns = 0

        # standing on a frontier that is still open: look around, then give up on it
        if self.pose.cell(self.pmap.cell_size) == self.frontier_goal.cell:
            self.look_turns += 1
            if self.look_turns > LOOK_AROUND_TURNS:
                logger.debug("step %d: frontier at %s stays open, excluding it", step, self.frontier_goal.cell)
                self._exclude_frontier_at(self.frontier_goal.cell)
                self.force_replan = True
            return Action.TURN_LEFT, decision

        try:
            path = self._path_to(self.frontier_goal)
        except NoPathError as e:
            logger.debug("step %d: %s", step, e)
            self.force_replan = True
            return Action.TURN_LEFT, decision
        return next_action(self.pose, path, self.frontier_goal, self.pmap.cell_size), decision

    def _choose_action(self, scan: DepthScan, step: int):
        # detection is sticky: once an object goal exists it is never dropped
        if self.object_goal is None and scan.target_rays():
            self.object_goal = goal_from_detection(scan, self.pose, self.pmap)

        if self.object_goal is not None:
            try:
                path = self._path_to(self.object_goal)
                return next_action(self.pose, path, self.object_goal, self.pmap.cell_size), None
            except NoPathError as e:
                logger.debug("step %d: object goal not reachable yet: %s", step, e)
                if self.pose.distance_to(*cell_center(self.object_goal.cell, self.pmap.cell_size)) <= self.object_goal.stop_radius:
                    return Action.STOP, None

        return self._explore(step)

    def run(self) -> EpisodeResult:
        """
        Run until STOP, the step budget, or no frontier is left to explore

        Returns:
            EpisodeResult with the full step trace
        """
        trace: List[StepRecord] = []
        path_length = 0.0
        stopped = False
        termination = Termination.MAX_STEPS

        for step in range(1, self.cfg.max_steps + 1):
            # Step 1: observe
            scan, score, error = self._sense()

            # Step 2: decide
            try:
                action, decision = self._choose_action(scan, step)
            except NoFrontierError as e:
                logger.info("episode %s: %s", self.label, e)
                termination = Termination.NO_FRONTIER
                break

            # Step 3: act
            new_pose, collided = apply_action(self.world, self.pose, action)
            if action == Action.MOVE_FORWARD and not collided:
                path_length += FORWARD_STEP
            self.history.append((action, collided))

            trace.append(StepRecord(
                step=step, pose=new_pose, action=action, score=score,
                collided=collided, decision=decision, scorer_error=error,
            ))
            self.pose = new_pose
            self.steps_since_replan += 1

            if recover_if_stuck(self.history, self.pose, self.pmap) is not None:
                self.history.clear()
                self.force_replan = True

            if action == Action.STOP:
                stopped = True
                termination = Termination.STOP
                break

        steps = len(trace)
        success = is_success(self.world, self.pose, stopped, steps, self.cfg.max_steps)
        logger.info(
            "episode %s [%s]: %s after %d steps (%s), path %.2f m",
            self.label, self.cfg.config_id, "success" if success else "failure",
            steps, termination.value, path_length,
        )
        return EpisodeResult(
            scenario=self.label,
            config_id=self.cfg.config_id,
            success=success,
            steps=steps,
            agent_path_length=path_length,
            oracle_shortest=oracle_shortest(self.world),
            termination=termination,
            trace=trace,
        )


def run_episode(
    world: WorldSpec,
    cfg: Optional[EpisodeConfig] = None,
    scorer=None,
    snapshot_dir: Optional[str] = None,
    label: str = "0",
) -> EpisodeResult:
    """
    Run one episode

    Args:
        world: Ground-truth scenario
        cfg: Episode settings (defaults to EpisodeConfig())
        scorer: Provider override; built from cfg when omitted
        snapshot_dir: Directory for map/value PGM snapshots at replans
        label: Episode name used in logs, traces and snapshot file names

    Returns:
        EpisodeResult
    """
    return EpisodeRunner(world, cfg or EpisodeConfig(), scorer, snapshot_dir, label).run()
