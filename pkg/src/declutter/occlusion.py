"""What the fixed camera sees and what the gripper can reach.

Occlusion is evaluated in 3D against upright cylinders; the occluded
"volume" of an object is measured as the area of table it hides, computed
on a regular grid and independently per object (overlaps between shadows
are not subtracted).
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from . import kernels
from .collision import Predicate, edge_free, points_clear_of_walls
from .scene import CameraConfig, SceneObject, SceneState, Visibility


class RevealPolicy(enum.Enum):
    ACCESSIBILITY = "accessibility"
    VISIBILITY = "visibility"
    # accessible objects count as seen, others need a clear line of sight
    COMBINED = "combined"


@dataclass(frozen=True)
class OcclusionModel:
    grid_resolution: float = 0.005
    visibility_threshold: float = 0.5
    boundary_samples: int = 64
    camera: CameraConfig | None = None  # None: use the scene's camera

    def __post_init__(self):
        if self.grid_resolution <= 0:
            raise ValueError("grid_resolution must be positive")
        if not 0 < self.visibility_threshold <= 1:
            raise ValueError("visibility_threshold must be in (0, 1]")

    def camera_for(self, scene: SceneState) -> CameraConfig:
        return self.camera or scene.camera


def sightline_blocked(camera: CameraConfig, p: tuple[float, float, float], obj: SceneObject) -> bool:
    """Does the segment from the camera to ``p`` pass through ``obj``'s cylinder?"""
    cx, cy, cz = camera.position
    px, py, pz = p
    ux = px - cx
    uy = py - cy
    fx = cx - obj.x
    fy = cy - obj.y
    a = ux * ux + uy * uy
    c = fx * fx + fy * fy - obj.radius * obj.radius
    if cz <= obj.height:
        tz = 0.0
    elif pz >= cz:
        return False
    else:
        tz = (cz - obj.height) / (cz - pz)
    if a == 0.0:
        return c <= 0.0 and tz <= 1.0
    b = 2.0 * (fx * ux + fy * uy)
    disc = b * b - 4.0 * a * c
    if disc < 0.0:
        return False
    s = math.sqrt(disc)
    t1 = (-b - s) / (2.0 * a)
    t2 = (-b + s) / (2.0 * a)
    return max(t1, 0.0, tz) <= min(t2, 1.0)


def point_occluded_by(p: tuple[float, float], obj: SceneObject, camera: CameraConfig) -> bool:
    """Is the table point ``p`` hidden from the camera by ``obj``?

    Points under the object's own footprint are not counted as occluded.
    """
    gx = p[0] - obj.x
    gy = p[1] - obj.y
    if not gx * gx + gy * gy > obj.radius * obj.radius:
        return False
    if obj.height <= 0.0:
        return False
    return sightline_blocked(camera, (p[0], p[1], 0.0), obj)


def occluded_area(obj: SceneObject, scene: SceneState, model: OcclusionModel | None = None) -> float:
    model = model or OcclusionModel()
    cam = model.camera_for(scene)
    res = model.grid_resolution
    ws = scene.workspace
    n = kernels.shadow_count(
        cam.x, cam.y, cam.z, obj.x, obj.y, obj.radius, obj.height, ws.width, ws.depth, res
    )
    return n * res * res


def visible_fraction(obj: SceneObject, scene: SceneState, model: OcclusionModel | None = None) -> float:
    """Share of rim points (at the object's top) with a clear line of sight."""
    model = model or OcclusionModel()
    cam = model.camera_for(scene)
    blockers = [o for o in scene.present if o.id != obj.id]
    n = model.boundary_samples
    visible = 0
    for k in range(n):
        ang = 2.0 * math.pi * k / n
        p = (obj.x + obj.radius * math.cos(ang), obj.y + obj.radius * math.sin(ang), obj.height)
        if not any(sightline_blocked(cam, p, o) for o in blockers):
            visible += 1
    return visible / n


def dilated_radius(scene: SceneState, objects=None) -> float:
    """Largest radius among ``objects`` (default: known objects) plus gripper and margin."""
    objects = scene.known if objects is None else objects
    r_max = max((o.radius for o in objects), default=0.0)
    return r_max + scene.robot.r_r + scene.robot.r_s


def _reachable_from(p, scene, known, r_g, predicate) -> list[bool]:
    """For each known object: can the gripper go straight from ``p`` and grasp it?"""
    access = scene.robot.access_point
    ws = scene.workspace
    if predicate is Predicate.STRAIGHT:
        free = kernels.star_free(
            p[0], p[1],
            [o.x for o in known], [o.y for o in known], [o.radius for o in known],
            r_g,
        )
        open_bottom = p == access
        return [
            bool(ok) and points_clear_of_walls((p, o.center), r_g, ws, open_bottom)
            for o, ok in zip(known, free)
        ]
    return [
        edge_free(p, o.center, [k for k in known if k.id != o.id], r_g, ws, predicate,
                  access_point=access)
        for o in known
    ]


def freed_poses_reachable(
    scene: SceneState, r_g: float, predicate: Predicate = Predicate.STRAIGHT
) -> list[tuple[float, float]]:
    """Access point plus every cleared pose the gripper can travel to through cleared space."""
    access = scene.robot.access_point
    ws = scene.workspace
    known = scene.known
    pending = [o.center for o in scene.objects if not o.present]
    reached = [access]
    frontier = [access]
    while frontier and pending:
        p = frontier.pop()
        still = []
        for q in pending:
            if edge_free(p, q, known, r_g, ws, predicate, access_point=access):
                reached.append(q)
                frontier.append(q)
            else:
                still.append(q)
        pending = still
    return reached


def accessible_set(
    scene: SceneState,
    predicate: Predicate = Predicate.STRAIGHT,
    r_g: float | None = None,
) -> set[int]:
    """Ids of known objects the gripper can grasp without moving anything else.

    The gripper enters at the access point and may pass through the poses of
    objects already removed from the scene.
    """
    known = scene.known
    if not known:
        return set()
    r_g = dilated_radius(scene, known) if r_g is None else r_g
    out: set[int] = set()
    for p in freed_poses_reachable(scene, r_g, predicate):
        out.update(o.id for o, ok in zip(known, _reachable_from(p, scene, known, r_g, predicate)) if ok)
        if len(out) == len(known):
            break
    return out


def reveal_update(
    scene: SceneState,
    policy: RevealPolicy = RevealPolicy.ACCESSIBILITY,
    model: OcclusionModel | None = None,
    predicate: Predicate = Predicate.STRAIGHT,
) -> tuple[SceneState, list[int]]:
    """Turn hidden objects into known ones according to ``policy``.

    Returns the updated scene and the revealed ids, in reveal order.
    """
    model = model or OcclusionModel()
    revealed: list[int] = []
    while True:
        hidden = scene.hidden
        if not hidden:
            break
        reachable = set()
        if policy is not RevealPolicy.VISIBILITY:
            reachable = accessible_set(scene.all_known(), predicate)
        new = [
            o.id for o in hidden
            if o.id in reachable
            or (policy is not RevealPolicy.ACCESSIBILITY
                and visible_fraction(o, scene, model) >= model.visibility_threshold)
        ]
        if not new:
            break
        scene = scene.with_visibility(new, Visibility.KNOWN)
        revealed.extend(new)
    return scene, revealed
