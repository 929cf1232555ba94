"""Scene model: cylinders on a walled tabletop, robot and camera placement.

Coordinates are SI metres. The workspace is the rectangle
``[0, width] x [0, depth]``; the robot sits in front of the ``y = 0`` edge,
which is the only edge the end-effector may pass through.
"""
from __future__ import annotations

import enum
import json
import math
import random
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable

from .errors import (
    InstanceGenerationError,
    MultipleTargetsError,
    NoTargetError,
    OutOfBoundsError,
    OverlapError,
    PlannerError,
    SchemaError,
)

OVERLAP_SLACK = 1e-9
MAX_COVERAGE = 0.4  # share of the placement area covered by gap-grown discs
RESTART_AFTER = 200  # consecutive failed placements before resampling the layout

# Object sizes used by the instance generator.
DIAMETER_RANGE = (0.05, 0.06)
HEIGHT_RANGE = (0.08, 0.16)

DEFAULT_R_R = 0.035
DEFAULT_R_S = 0.005


class Role(enum.Enum):
    TARGET = "target"
    OBSTACLE = "obstacle"


class Visibility(enum.Enum):
    KNOWN = "known"
    HIDDEN = "hidden"
    REMOVED = "removed"


@dataclass(frozen=True)
class Workspace:
    width: float = 0.7
    depth: float = 0.5

    @property
    def area(self) -> float:
        return self.width * self.depth


@dataclass(frozen=True)
class SceneObject:
    id: int
    x: float
    y: float
    radius: float
    height: float
    role: Role = Role.OBSTACLE
    visibility: Visibility = Visibility.KNOWN

    @property
    def center(self) -> tuple[float, float]:
        return (self.x, self.y)

    @property
    def is_target(self) -> bool:
        return self.role is Role.TARGET

    @property
    def present(self) -> bool:
        return self.visibility is not Visibility.REMOVED

    @property
    def known(self) -> bool:
        return self.visibility is Visibility.KNOWN


@dataclass(frozen=True)
class RobotConfig:
    """Fixed manipulator base and end-effector dimensions.

    ``h`` (base height) is carried for completeness; nothing in the planar
    planners reads it.
    """

    x: float = 0.35
    y: float = -0.15
    h: float = 0.1
    r_r: float = DEFAULT_R_R
    r_s: float = DEFAULT_R_S
    arm_half_width: float = 0.03
    access_x: float = 0.35
    access_y: float = 0.0

    @property
    def base(self) -> tuple[float, float]:
        return (self.x, self.y)

    @property
    def access_point(self) -> tuple[float, float]:
        return (self.access_x, self.access_y)

    @classmethod
    def centered(cls, workspace: Workspace, **kw) -> "RobotConfig":
        cx = workspace.width / 2
        return cls(x=cx, access_x=cx, **kw)


@dataclass(frozen=True)
class CameraConfig:
    x: float = 0.35
    y: float = -0.25
    z: float = 0.45

    @property
    def position(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.z)

    @classmethod
    def centered(cls, workspace: Workspace, **kw) -> "CameraConfig":
        return cls(x=workspace.width / 2, **kw)


@dataclass(frozen=True)
class SceneState:
    """Immutable snapshot of the tabletop.

    Objects are stored sorted by id. Removed objects stay in ``objects`` with
    ``Visibility.REMOVED`` so that traces can still refer to their poses.
    """

    workspace: Workspace
    objects: tuple[SceneObject, ...]
    robot: RobotConfig = field(default_factory=RobotConfig)
    camera: CameraConfig = field(default_factory=CameraConfig)

    def __post_init__(self):
        objs = tuple(sorted(self.objects, key=lambda o: o.id))
        object.__setattr__(self, "objects", objs)
        object.__setattr__(self, "_index", {o.id: o for o in objs})

    def __getitem__(self, oid: int) -> SceneObject:
        return self._index[oid]

    def __contains__(self, oid) -> bool:
        return oid in self._index

    @property
    def target(self) -> SceneObject:
        targets = [o for o in self.objects if o.is_target]
        if not targets:
            raise NoTargetError("scene has no target")
        if len(targets) > 1:
            raise MultipleTargetsError("multiple targets")
        return targets[0]

    @property
    def present(self) -> list[SceneObject]:
        return [o for o in self.objects if o.present]

    @property
    def known(self) -> list[SceneObject]:
        return [o for o in self.objects if o.known]

    @property
    def hidden(self) -> list[SceneObject]:
        return [o for o in self.objects if o.visibility is Visibility.HIDDEN]

    @property
    def n_obstacles(self) -> int:
        return sum(1 for o in self.objects if o.present and not o.is_target)

    @property
    def n_hidden(self) -> int:
        return len(self.hidden)

    def with_visibility(self, ids: Iterable[int], visibility: Visibility) -> "SceneState":
        ids = set(ids)
        if not ids:
            return self
        objs = tuple(
            replace(o, visibility=visibility) if o.id in ids else o for o in self.objects
        )
        return replace(self, objects=objs)

    def remove(self, oid: int) -> "SceneState":
        return self.with_visibility([oid], Visibility.REMOVED)

    def all_known(self) -> "SceneState":
        """The same scene with every hidden object treated as known."""
        return self.with_visibility([o.id for o in self.hidden], Visibility.KNOWN)

    def validate(self) -> "SceneState":
        """Check the scene invariants; return self so calls can chain."""
        ws = self.workspace
        if ws.width <= 0 or ws.depth <= 0:
            raise SchemaError("workspace dimensions must be positive")
        if len(self._index) != len(self.objects):
            raise SchemaError("duplicate object ids")
        n_targets = sum(1 for o in self.objects if o.is_target)
        if n_targets == 0:
            raise NoTargetError("no target")
        if n_targets > 1:
            raise MultipleTargetsError("multiple targets")
        r = self.robot
        if r.r_r <= 0 or r.r_s < 0 or r.arm_half_width <= 0:
            raise SchemaError("robot dimensions must satisfy r_r > 0, r_s >= 0, arm_half_width > 0")
        if abs(r.access_y) > OVERLAP_SLACK or not (0.0 <= r.access_x <= ws.width):
            raise SchemaError("access point must lie on the y = 0 workspace edge")
        live = self.present
        for o in live:
            if o.radius <= 0 or o.height <= 0:
                raise SchemaError(f"object {o.id}: radius and height must be positive")
            if (
                o.x - o.radius < -OVERLAP_SLACK
                or o.y - o.radius < -OVERLAP_SLACK
                or o.x + o.radius > ws.width + OVERLAP_SLACK
                or o.y + o.radius > ws.depth + OVERLAP_SLACK
            ):
                raise OutOfBoundsError(f"object {o.id} is outside the workspace")
        for i, a in enumerate(live):
            for b in live[i + 1:]:
                if math.dist(a.center, b.center) < a.radius + b.radius - OVERLAP_SLACK:
                    raise OverlapError(f"objects {a.id} and {b.id} overlap")
        tallest = max((o.height for o in live), default=0.0)
        if self.camera.z <= tallest:
            raise SchemaError("camera must be above the tallest object")
        return self


# ---------------------------------------------------------------------------
# Scene files

_TOP_KEYS = {"units", "workspace", "robot", "camera", "objects"}
_WS_KEYS = {"width", "depth"}
_ROBOT_KEYS = {"x", "y", "h", "r_r", "r_s", "arm_half_width", "access_x", "access_y"}
_CAMERA_KEYS = {"x", "y", "z"}
_OBJECT_KEYS = {"id", "x", "y", "r", "h", "target", "hidden"}


def _check_keys(d, expected, where):
    if not isinstance(d, dict):
        raise SchemaError(f"{where}: expected an object")
    extra = set(d) - expected
    if extra:
        raise SchemaError(f"{where}: unknown keys {sorted(extra)}")
    missing = expected - set(d)
    if missing:
        raise SchemaError(f"{where}: missing keys {sorted(missing)}")


def _num(v, where):
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise SchemaError(f"{where}: expected a number")
    return float(v)


def scene_to_dict(scene: SceneState) -> dict:
    ws, r, c = scene.workspace, scene.robot, scene.camera
    return {
        "units": "m",
        "workspace": {"width": ws.width, "depth": ws.depth},
        "robot": {
            "x": r.x, "y": r.y, "h": r.h, "r_r": r.r_r, "r_s": r.r_s,
            "arm_half_width": r.arm_half_width, "access_x": r.access_x, "access_y": r.access_y,
        },
        "camera": {"x": c.x, "y": c.y, "z": c.z},
        "objects": [
            {
                "id": o.id, "x": o.x, "y": o.y, "r": o.radius, "h": o.height,
                "target": o.is_target, "hidden": o.visibility is Visibility.HIDDEN,
            }
            for o in scene.objects
            if o.present
        ],
    }


def scene_from_dict(data: dict) -> SceneState:
    _check_keys(data, _TOP_KEYS, "scene")
    if data["units"] != "m":
        raise SchemaError('units must be "m"')
    _check_keys(data["workspace"], _WS_KEYS, "workspace")
    _check_keys(data["robot"], _ROBOT_KEYS, "robot")
    _check_keys(data["camera"], _CAMERA_KEYS, "camera")
    ws = Workspace(**{k: _num(v, f"workspace.{k}") for k, v in data["workspace"].items()})
    robot = RobotConfig(**{k: _num(v, f"robot.{k}") for k, v in data["robot"].items()})
    camera = CameraConfig(**{k: _num(v, f"camera.{k}") for k, v in data["camera"].items()})
    if not isinstance(data["objects"], list):
        raise SchemaError("objects: expected an array")
    objects = []
    for n, od in enumerate(data["objects"]):
        where = f"objects[{n}]"
        _check_keys(od, _OBJECT_KEYS, where)
        if isinstance(od["id"], bool) or not isinstance(od["id"], int):
            raise SchemaError(f"{where}.id: expected an integer")
        for flag in ("target", "hidden"):
            if not isinstance(od[flag], bool):
                raise SchemaError(f"{where}.{flag}: expected a boolean")
        objects.append(
            SceneObject(
                id=od["id"],
                x=_num(od["x"], f"{where}.x"),
                y=_num(od["y"], f"{where}.y"),
                radius=_num(od["r"], f"{where}.r"),
                height=_num(od["h"], f"{where}.h"),
                role=Role.TARGET if od["target"] else Role.OBSTACLE,
                visibility=Visibility.HIDDEN if od["hidden"] else Visibility.KNOWN,
            )
        )
    return SceneState(ws, tuple(objects), robot, camera).validate()


def dumps_scene(scene: SceneState) -> str:
    return json.dumps(scene_to_dict(scene), indent=2) + "\n"


def save_scene(scene: SceneState, path) -> None:
    Path(path).write_text(dumps_scene(scene), encoding="utf-8")


def load_scene(path) -> SceneState:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: not valid JSON ({exc.msg})") from exc
    return scene_from_dict(data)


# ---------------------------------------------------------------------------
# Random instances


def wall_margin(robot: RobotConfig) -> float:
    """Clearance kept between generated object centres and the walls.

    Equal to the largest possible dilated radius, so straight corridors
    between object centres never clip a wall.
    """
    return DIAMETER_RANGE[1] / 2 + robot.r_r + robot.r_s


def default_min_gap(n_objects: int, workspace: Workspace, robot: RobotConfig) -> float:
    """Room for the gripper between neighbouring discs, shrunk on crowded tables.

    The gap is ``r_r + r_s`` unless discs grown by half the gap would cover
    more than ``MAX_COVERAGE`` of the area open to object centres; then it
    is reduced until they cover exactly that share (never below zero).
    """
    margin = wall_margin(robot)
    area = max(0.0, workspace.width - 2 * margin) * max(0.0, workspace.depth - 2 * margin)
    r_mean = sum(DIAMETER_RANGE) / 4
    grown = math.sqrt(MAX_COVERAGE * area / (n_objects * math.pi))
    return max(0.0, min(robot.r_r + robot.r_s, 2 * (grown - r_mean)))


def generate_instance(
    seed: int,
    n_objects: int,
    hidden_fraction: float = 0.0,
    workspace: Workspace | None = None,
    *,
    hide_target: bool = False,
    robot: RobotConfig | None = None,
    camera: CameraConfig | None = None,
    visibility_threshold: float = 0.5,
    require_plannable: bool = False,
    predicate=None,
    min_gap: float | None = None,
    max_rejections: int = 10_000,
) -> SceneState:
    """Sample a random cluttered tabletop.

    Diameters are uniform in ``DIAMETER_RANGE``. Instances whose target is
    directly accessible are discarded and resampled; every discard or failed
    disc placement counts against ``max_rejections``.

    With ``hide_target`` the target is drawn among poorly visible objects and
    starts hidden (search scenario). ``require_plannable`` additionally
    discards instances that the static planner cannot solve even with every
    object known. Neighbouring discs keep at least ``min_gap`` between
    them; see ``default_min_gap``.
    """
    from . import occlusion, planners  # noqa: circular at import time
    from .collision import Predicate

    if n_objects < 2:
        raise ValueError("n_objects must be at least 2")
    if not 0.0 <= hidden_fraction < 1.0:
        raise ValueError("hidden_fraction must be in [0, 1)")
    workspace = workspace or Workspace()
    robot = robot or RobotConfig.centered(workspace)
    camera = camera or CameraConfig.centered(workspace)
    predicate = predicate or Predicate.STRAIGHT
    if min_gap is None:
        min_gap = default_min_gap(n_objects, workspace, robot)

    rng = random.Random(seed)
    margin = wall_margin(robot)
    if workspace.width <= 2 * margin or workspace.depth <= 2 * margin:
        raise InstanceGenerationError(seed, "workspace too small for the wall margin")
    n_hidden = math.floor(hidden_fraction * n_objects)
    rejections = 0

    def reject(reason):
        nonlocal rejections
        rejections += 1
        if rejections > max_rejections:
            raise InstanceGenerationError(
                seed, f"gave up after {max_rejections} rejections (last: {reason})"
            )

    while True:
        placed: list[SceneObject] = []
        misses = 0
        while len(placed) < n_objects:
            if misses >= RESTART_AFTER:
                placed, misses = [], 0  # jammed layout: start over
            r = round(rng.uniform(*DIAMETER_RANGE) / 2, 5)
            h = round(rng.uniform(*HEIGHT_RANGE), 4)
            x = round(rng.uniform(margin, workspace.width - margin), 5)
            y = round(rng.uniform(margin, workspace.depth - margin), 5)
            if any(math.dist((x, y), o.center) < r + o.radius + min_gap for o in placed):
                misses += 1
                reject("disc placement")
                continue
            misses = 0
            placed.append(SceneObject(len(placed), x, y, r, h))
        full = SceneState(workspace, tuple(placed), robot, camera)

        vis_model = occlusion.OcclusionModel(visibility_threshold=visibility_threshold)
        if hide_target:
            low = [
                o.id for o in placed
                if occlusion.visible_fraction(o, full, vis_model) < visibility_threshold
            ]
            if not low:
                reject("no occluded object to hide the target behind")
                continue
            target_id = low[rng.randrange(len(low))]
        else:
            target_id = rng.randrange(n_objects)
        full = replace(
            full,
            objects=tuple(
                replace(o, role=Role.TARGET) if o.id == target_id else o for o in placed
            ),
        )
        if target_id in occlusion.accessible_set(full, predicate):
            reject("target directly accessible")
            continue

        candidates = [o for o in full.objects if not o.is_target]
        low_vis = [
            o.id for o in candidates
            if occlusion.visible_fraction(o, full, vis_model) < visibility_threshold
        ]
        if len(low_vis) >= n_hidden:
            hidden_ids = rng.sample(low_vis, n_hidden)
        else:
            rest = [o.id for o in candidates if o.id not in low_vis]
            hidden_ids = low_vis + rng.sample(rest, n_hidden - len(low_vis))
        if hide_target:
            hidden_ids = hidden_ids + [target_id]
        scene = full.with_visibility(hidden_ids, Visibility.HIDDEN)

        if require_plannable:
            try:
                planners.static_plan(full, predicate=predicate)
            except PlannerError as exc:
                reject(type(exc).__name__)
                continue
        return scene.validate()
