"""Relocation planners and the two comparison baselines.

``static_plan`` is the min-hop planner for fully known scenes.
``dynamic_plan`` executes it online, replanning when hidden objects show up
and clearing objects that the arm would hit. ``uncertain_plan`` first
searches for a hidden target with a greedy strategy, then retrieves it.
"""
from __future__ import annotations

import enum
import math
import time
from dataclasses import dataclass, field
from typing import Callable

from .collision import Predicate, dist_point_segment
from .errors import Disconnected, NoAccessibleObject, PlannerError, TargetNeverFound, TargetUnknown
from .occlusion import OcclusionModel, RevealPolicy, accessible_set, occluded_area, reveal_update
from .plangraph import PathResult, better_path, gen_graph, min_hop_path
from .scene import RobotConfig, SceneState, Visibility


@dataclass(frozen=True)
class RelocationPlan:
    sequence: tuple[int, ...]
    source_path: PathResult | None = None

    @property
    def k(self) -> int:
        return len(self.sequence)


@dataclass(frozen=True)
class ArmProxy:
    """Planar stand-in for the arm: a stadium from the base to the grasp point."""

    base: tuple[float, float]
    half_width: float

    def __post_init__(self):
        if self.half_width <= 0:
            raise ValueError("half_width must be positive")

    @classmethod
    def from_robot(cls, robot: RobotConfig) -> "ArmProxy":
        return cls(robot.base, robot.arm_half_width)


class Strategy(enum.Enum):
    VOLUME = "volume"
    CLOSEST = "closest"
    FARTHEST = "farthest"


def _known_target(scene: SceneState, target_id: int | None) -> int:
    if target_id is None:
        target_id = scene.target.id
    if target_id not in scene or not scene[target_id].known:
        raise TargetUnknown(f"target {target_id} is not known")
    return target_id


def static_plan(
    scene: SceneState,
    predicate: Predicate = Predicate.STRAIGHT,
    target_id: int | None = None,
) -> RelocationPlan:
    """Fewest relocations along the pose graph, ties broken by path length.

    ``target_id`` lets callers plan towards a temporary target (an obstacle
    that has to go first).
    """
    target_id = _known_target(scene, target_id)
    starts = accessible_set(scene, predicate)
    if not starts:
        raise NoAccessibleObject("no known object is accessible")
    graph = gen_graph(scene, predicate, target_id=target_id)
    best = None
    for v in sorted(starts):
        path = min_hop_path(graph, v, target_id)
        if path is not None and better_path(path, best):
            best = path
    if best is None:
        raise Disconnected(f"no accessible object connects to target {target_id}")
    return RelocationPlan(best.nodes[:-1], best)


def arm_colliding_objects(scene: SceneState, grasp_target_id: int, arm: ArmProxy) -> set[int]:
    grasp = scene[grasp_target_id]
    return {
        o.id
        for o in scene.known
        if o.id != grasp_target_id
        and dist_point_segment(o.center, arm.base, grasp.center) < arm.half_width + o.radius
    }


def baseline_distance(scene: SceneState, target_id: int | None = None) -> RelocationPlan:
    """Clear every known obstacle on the straight gripper path to the target."""
    target_id = _known_target(scene, target_id)
    t = scene[target_id]
    access = scene.robot.access_point
    reach = t.radius + scene.robot.r_r + scene.robot.r_s
    hits = [
        o for o in scene.known
        if o.id != target_id and dist_point_segment(o.center, access, t.center) < reach + o.radius
    ]
    hits.sort(key=lambda o: (math.dist(o.center, access), o.id))
    return RelocationPlan(tuple(o.id for o in hits))


def _ray_exit(p, angle_rad, width, depth):
    """Where the ray from ``p`` leaves the workspace rectangle, and through which edge."""
    dx, dy = math.cos(angle_rad), math.sin(angle_rad)
    best = (math.inf, None)
    if dx > 1e-12:
        best = min(best, ((width - p[0]) / dx, "right"))
    if dx < -1e-12:
        best = min(best, (-p[0] / dx, "left"))
    if dy > 1e-12:
        best = min(best, ((depth - p[1]) / dy, "top"))
    if dy < -1e-12:
        best = min(best, (-p[1] / dy, "bottom"))
    t, edge = best
    return (p[0] + t * dx, p[1] + t * dy), edge


@dataclass(frozen=True)
class DensitySector:
    index: int
    centre_deg: float
    deviation_deg: float  # from the target -> access bearing
    hits: tuple[int, ...]  # obstacles in the sector's corridor, far from the target first

    def key(self):
        return (len(self.hits), self.deviation_deg, self.index)


def density_sectors(
    scene: SceneState, target_id: int | None = None, n_sectors: int = 36
) -> list[DensitySector]:
    """Sectors around the target whose central ray leaves the table through the robot's edge."""
    target_id = _known_target(scene, target_id)
    t = scene[target_id]
    ws = scene.workspace
    reach = t.radius + scene.robot.r_r + scene.robot.r_s
    access = scene.robot.access_point
    to_access = math.degrees(math.atan2(access[1] - t.y, access[0] - t.x))
    obstacles = [o for o in scene.known if o.id != target_id]
    width = 360.0 / n_sectors
    out = []
    for s in range(n_sectors):
        centre = (s + 0.5) * width
        exit_point, edge = _ray_exit(t.center, math.radians(centre), ws.width, ws.depth)
        if edge != "bottom":
            continue
        hits = [
            o for o in obstacles
            if dist_point_segment(o.center, t.center, exit_point) < reach + o.radius
        ]
        hits.sort(key=lambda o: (-math.dist(o.center, t.center), o.id))
        deviation = abs((centre - to_access + 180.0) % 360.0 - 180.0)
        out.append(DensitySector(s, centre, deviation, tuple(o.id for o in hits)))
    return out


def baseline_density(
    scene: SceneState, target_id: int | None = None, n_sectors: int = 36
) -> RelocationPlan:
    """Clear the least crowded straight way out of the clutter.

    Bearings around the target are split into ``n_sectors``; only sectors
    whose central ray leaves the table through the robot's edge qualify.
    Fewest obstacles wins, then the smaller deviation from the bearing to
    the access point. Obstacles are cleared from the outside in.
    """
    best = min(density_sectors(scene, target_id, n_sectors), key=DensitySector.key)
    return RelocationPlan(best.hits)


# ---------------------------------------------------------------------------
# Online execution


@dataclass(frozen=True)
class Event:
    kind: str  # relocate | grasp | reveal | replan | arm_conflict | arm_reroute | unstick
    ids: tuple[int, ...] = ()
    phase: str = "retrieval"

    def to_dict(self) -> dict:
        return {"kind": self.kind, "ids": list(self.ids), "phase": self.phase}


@dataclass
class ExecutionTrace:
    events: list[Event] = field(default_factory=list)
    plan_times: list[float] = field(default_factory=list)
    final_scene: SceneState | None = None
    phase: str = "retrieval"
    inaccessible_steps: int = 0

    def add(self, kind: str, *ids: int) -> None:
        self.events.append(Event(kind, tuple(ids), self.phase))

    def ids_of(self, kind: str, phase: str | None = None) -> list[int]:
        return [
            i for e in self.events
            if e.kind == kind and (phase is None or e.phase == phase)
            for i in e.ids
        ]

    @property
    def relocated(self) -> list[int]:
        return self.ids_of("relocate")

    @property
    def relocations(self) -> int:
        return len(self.relocated)

    @property
    def search_relocations(self) -> int:
        return len(self.ids_of("relocate", "search"))

    @property
    def reveals(self) -> int:
        return len(self.ids_of("reveal"))

    @property
    def replans(self) -> int:
        return sum(1 for e in self.events if e.kind == "replan")


PlanFn = Callable[[SceneState, int], tuple[int, ...]]
RevealFn = Callable[[SceneState], tuple[SceneState, list[int]]]


class _Executor:
    """Shared loop for the online planners.

    Every iteration senses, replans on the updated scene and acts on the head
    of the fresh plan, so both newly revealed objects and the space freed by
    earlier removals are taken into account.
    """

    def __init__(self, scene: SceneState, plan_fn: PlanFn, arm: ArmProxy | None,
                 reveal: RevealFn, trace: ExecutionTrace):
        self.scene = scene
        self.plan_fn = plan_fn
        self.arm = arm
        self.reveal = reveal
        self.trace = trace
        self.root = scene.target.id

    def sense(self) -> bool:
        self.scene, new = self.reveal(self.scene)
        for oid in new:
            self.trace.add("reveal", oid)
        return bool(new)

    def plan(self, target: int) -> list[int]:
        start = time.perf_counter()
        try:
            return list(self.plan_fn(self.scene, target))
        finally:
            self.trace.plan_times.append(time.perf_counter() - start)
            self.trace.add("replan", target)

    def remove(self, oid: int) -> None:
        if not self.scene[oid].known:
            raise AssertionError(f"attempt to remove non-known object {oid}")
        self.scene = self.scene.remove(oid)
        self.trace.add("grasp" if oid == self.root else "relocate", oid)

    def clear(self, target: int, stack: tuple[int, ...] = ()) -> None:
        """Remove ``target`` (the real one or a temporary one) from the scene.

        Objects the arm would hit on the way to the next pick are cleared
        first, recursively. A conflicting object that cannot be cleared (it is
        already being cleared further up, or no plan reaches it) is bypassed:
        the arm then follows the gripper's own collision-free route.
        """
        stack = stack + (target,)
        while self.scene[target].present:
            self.sense()
            queue = self.plan(target)
            head = queue[0] if queue else target
            hit = arm_colliding_objects(self.scene, head, self.arm) if self.arm else set()
            if hit:
                self.trace.add("arm_conflict", *sorted(hit))
                before = len(self.scene.present)
                bypass = []
                for c in sorted(hit, key=lambda i: (math.dist(self.scene[i].center, self.arm.base), i)):
                    if not self.scene[c].present:
                        continue
                    if c in stack:
                        bypass.append(c)
                        continue
                    try:
                        self.clear(c, stack)
                    except (Disconnected, NoAccessibleObject):
                        bypass.append(c)
                if len(self.scene.present) != before:
                    continue  # the scene changed: replan
                self.trace.add("arm_reroute", *sorted(bypass))
            self.remove(head)


def _reveal_fn(policy, model, predicate) -> RevealFn:
    return lambda s: reveal_update(s, policy, model, predicate)


def _retrieve(
    scene: SceneState,
    plan_fn: PlanFn,
    arm: ArmProxy | None,
    reveal: RevealFn,
    trace: ExecutionTrace,
    unstick: Callable[[SceneState], int],
) -> SceneState:
    """Clear the way to the target and grasp it; returns the final scene.

    When no plan exists (hidden objects can hide the only route), ``unstick``
    names an accessible object to move, and the executor carries on with
    the scene that removal uncovers. Raises if nothing can be moved.
    """
    target_id = scene.target.id
    while True:
        ex = _Executor(scene, plan_fn, arm, reveal, trace)
        try:
            ex.clear(target_id)
            return ex.scene
        except (Disconnected, NoAccessibleObject) as exc:
            scene = ex.scene
            try:
                pick = unstick(scene)
            except PlannerError:
                trace.final_scene = scene
                exc.trace = trace
                raise exc from None
            if pick == target_id:
                # accessible, yet every plan failed on arm conflicts
                trace.final_scene = scene
                exc.trace = trace
                raise exc
            trace.add("unstick", pick)
            scene = scene.remove(pick)
            trace.add("relocate", pick)


def dynamic_plan(
    scene: SceneState,
    arm: ArmProxy | None = None,
    policy: RevealPolicy = RevealPolicy.ACCESSIBILITY,
    predicate: Predicate = Predicate.STRAIGHT,
    model: OcclusionModel | None = None,
    plan_fn: PlanFn | None = None,
) -> ExecutionTrace:
    """Execute the min-hop plan online until the target is grasped.

    ``plan_fn`` swaps the planner used at each (re)plan; the Distance
    replanner baseline is ``plan_fn=distance_plan_fn``. If the known scene
    offers no route, the accessible object farthest from the access point
    is moved and planning resumes.
    """
    trace = ExecutionTrace()
    _known_target(scene, None)
    model = model or OcclusionModel()
    if plan_fn is None:
        def plan_fn(s, t):
            return static_plan(s, predicate, target_id=t).sequence

    def unstick(s):
        return choose_search_object(s, Strategy.FARTHEST, model, predicate)

    trace.final_scene = _retrieve(scene, plan_fn, arm, _reveal_fn(policy, model, predicate),
                                  trace, unstick)
    return trace


def distance_plan_fn(scene: SceneState, target: int) -> tuple[int, ...]:
    return baseline_distance(scene, target).sequence


def strategy_metric(strategy: Strategy, obj, scene: SceneState, model: OcclusionModel) -> float:
    """Score to maximise when choosing what to move during search."""
    if strategy is Strategy.VOLUME:
        return occluded_area(obj, scene, model)
    d = math.dist(obj.center, scene.robot.access_point)
    return -d if strategy is Strategy.CLOSEST else d


def choose_search_object(
    scene: SceneState,
    strategy: Strategy,
    model: OcclusionModel | None = None,
    predicate: Predicate = Predicate.STRAIGHT,
) -> int:
    model = model or OcclusionModel()
    acc = sorted(accessible_set(scene, predicate))
    if not acc:
        raise NoAccessibleObject("no known object is accessible")
    # max over (metric, -id): ties go to the smaller id
    return max(acc, key=lambda i: (strategy_metric(strategy, scene[i], scene, model), -i))


def uncertain_plan(
    scene: SceneState,
    strategy: Strategy = Strategy.FARTHEST,
    arm: ArmProxy | None = None,
    policy: RevealPolicy = RevealPolicy.COMBINED,
    predicate: Predicate = Predicate.STRAIGHT,
    model: OcclusionModel | None = None,
) -> ExecutionTrace:
    """Search for a hidden target greedily, then retrieve it with ``dynamic_plan``.

    If the retrieval planner finds no route, the search strategy keeps
    relocating accessible objects until one appears; removing everything
    else always leaves the target reachable.
    """
    model = model or OcclusionModel()
    reveal = _reveal_fn(policy, model, predicate)
    trace = ExecutionTrace(phase="search")

    def fail(exc):
        trace.final_scene = scene
        exc.trace = trace
        raise exc

    target_id = scene.target.id
    while True:
        scene, new = reveal(scene)
        for oid in new:
            trace.add("reveal", oid)
        if scene[target_id].known:
            break
        if not scene.known:
            fail(TargetNeverFound("every known object was removed but the target never showed up"))
        start = time.perf_counter()
        try:
            pick = choose_search_object(scene, strategy, model, predicate)
        except PlannerError as exc:
            fail(exc)
        finally:
            trace.plan_times.append(time.perf_counter() - start)
        scene = scene.remove(pick)
        trace.add("relocate", pick)

    trace.phase = "retrieval"

    def plan_fn(s, t):
        return static_plan(s, predicate, target_id=t).sequence

    def unstick(s):
        return choose_search_object(s, strategy, model, predicate)

    trace.final_scene = _retrieve(scene, plan_fn, arm, reveal, trace, unstick)
    return trace
