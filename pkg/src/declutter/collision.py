"""Planar collision primitives for a gripper carrying a disc.

The moving body is a disc of radius ``r_g`` (largest object radius plus
end-effector size plus safety margin). Walls of the workspace block it,
except the ``y = 0`` edge for motions that start or end at the robot's
access point.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .scene import SceneObject, Workspace

Point = tuple[float, float]

_SAME_POINT = 1e-12
# bin edges within this many bin widths of an interval end are not crossed
_BIN_EPS = 1e-9


class Predicate(enum.Enum):
    STRAIGHT = "straight"
    VFH = "vfh"


@dataclass(frozen=True)
class Corridor:
    start: Point
    end: Point
    sweep_radius: float

    def __post_init__(self):
        if self.sweep_radius <= 0:
            raise ValueError("sweep_radius must be positive")


def dist_point_segment(p: Point, a: Point, b: Point) -> float:
    px, py = p
    ax, ay = a
    bx, by = b
    dx = bx - ax
    dy = by - ay
    l2 = dx * dx + dy * dy
    t = 0.0
    if l2 != 0.0:
        t = ((px - ax) * dx + (py - ay) * dy) / l2
        t = min(max(t, 0.0), 1.0)
    ex = px - (ax + t * dx)
    ey = py - (ay + t * dy)
    return math.sqrt(ex * ex + ey * ey)


def _is_access(p: Point, access_point: Point | None) -> bool:
    return access_point is not None and math.dist(p, access_point) <= _SAME_POINT


def points_clear_of_walls(
    points: Sequence[Point], r_g: float, workspace: Workspace, open_bottom: bool
) -> bool:
    """True if every point is at least ``r_g`` from each closed wall.

    Distance to a wall is linear along a segment, so checking a polyline's
    vertices covers the whole polyline.
    """
    for x, y in points:
        if x < r_g or x > workspace.width - r_g or y > workspace.depth - r_g:
            return False
        if not open_bottom and y < r_g:
            return False
    return True


def corridor_free(
    c: Corridor,
    others: Iterable[SceneObject],
    workspace: Workspace | None = None,
    access_point: Point | None = None,
) -> bool:
    """Can a disc of radius ``c.sweep_radius`` slide from start to end?

    ``others`` must not contain the objects sitting at the two endpoints.
    Touching (clearance exactly zero) counts as free.
    """
    r_g = c.sweep_radius
    for o in others:
        if dist_point_segment(o.center, c.start, c.end) < r_g + o.radius:
            return False
    if workspace is not None:
        open_bottom = _is_access(c.start, access_point) or _is_access(c.end, access_point)
        if not points_clear_of_walls((c.start, c.end), r_g, workspace, open_bottom):
            return False
    return True


@dataclass(frozen=True)
class PolarHistogram:
    """Binary polar histogram; ``blocked[b]`` covers ``[b*w, (b+1)*w)`` degrees."""

    bin_width: float
    blocked: tuple[bool, ...]

    def bin_of(self, bearing_deg: float) -> int:
        return int(math.floor((bearing_deg % 360.0) / self.bin_width)) % len(self.blocked)

    def is_free(self, bearing_deg: float) -> bool:
        return not self.blocked[self.bin_of(bearing_deg)]

    @property
    def free_bins(self) -> list[int]:
        return [b for b, v in enumerate(self.blocked) if not v]


def _bearing(a: Point, b: Point) -> float:
    return math.degrees(math.atan2(b[1] - a[1], b[0] - a[0])) % 360.0


def build_histogram(
    at: Point,
    others: Iterable[SceneObject],
    r_g: float,
    bin_width: float = 5.0,
    workspace: Workspace | None = None,
    open_bottom: bool = False,
) -> PolarHistogram:
    """Mark the headings in which a disc of radius ``r_g`` at ``at`` is obstructed.

    A free bin guarantees that the whole ray from ``at`` in any heading of
    that bin misses every dilated obstacle. Blocked intervals are widened
    outward to whole bins.
    """
    n_bins = round(360.0 / bin_width)
    if n_bins <= 0 or abs(n_bins * bin_width - 360.0) > 1e-9:
        raise ValueError("bin_width must divide 360")
    blocked = [False] * n_bins

    def block(lo_deg, hi_deg):
        # open interval: tangent headings graze without penetrating
        lo_b = math.floor(lo_deg / bin_width + _BIN_EPS)
        hi_b = math.ceil(hi_deg / bin_width - _BIN_EPS) - 1
        for b in range(lo_b, hi_b + 1):
            blocked[b % n_bins] = True

    for o in others:
        d = math.dist(at, o.center)
        reach = r_g + o.radius
        if d <= reach:
            return PolarHistogram(bin_width, (True,) * n_bins)
        theta = _bearing(at, o.center)
        half = math.degrees(math.asin(reach / d))
        block(theta - half, theta + half)

    if workspace is not None:
        x, y = at
        walls = [(x, 180.0), (workspace.width - x, 0.0), (workspace.depth - y, 90.0)]
        if not open_bottom:
            walls.append((y, 270.0))
        for gap, normal in walls:
            if gap < r_g:
                block(normal - 90.0, normal + 90.0)
    return PolarHistogram(bin_width, tuple(blocked))


def vfh_detour(
    i_pose: Point,
    j_pose: Point,
    others: Iterable[SceneObject],
    r_g: float,
    workspace: Workspace | None = None,
    access_point: Point | None = None,
    bin_width: float = 5.0,
    max_deflection: float = 45.0,
) -> Point | None:
    """Apex of the least deflected free two-leg detour from ``i_pose`` to ``j_pose``.

    Deflections are tried in order 0, +w, -w, +2w, ... up to
    ``max_deflection``. Returns ``None`` when no deflection works.
    """
    others = list(others)
    length = math.dist(i_pose, j_pose)
    open_bottom = _is_access(i_pose, access_point) or _is_access(j_pose, access_point)
    if length == 0.0:
        ok = corridor_free(Corridor(i_pose, j_pose, r_g), others, workspace, access_point)
        return i_pose if ok else None
    hist_i = build_histogram(i_pose, others, r_g, bin_width, workspace, open_bottom)
    hist_j = build_histogram(j_pose, others, r_g, bin_width, workspace, open_bottom)
    theta = _bearing(i_pose, j_pose)
    phi = _bearing(j_pose, i_pose)
    steps = int(math.floor(max_deflection / bin_width + 1e-9))
    for s in range(steps + 1):
        for delta in ((0.0,) if s == 0 else (s * bin_width, -s * bin_width)):
            if not (hist_i.is_free(theta + delta) and hist_j.is_free(phi - delta)):
                continue
            # both rays are obstacle free, so the legs i -> apex -> j are too
            apex = detour_apex(i_pose, j_pose, delta)
            if workspace is None or points_clear_of_walls(
                (i_pose, apex, j_pose), r_g, workspace, open_bottom
            ):
                return apex
    return None


def detour_apex(i_pose: Point, j_pose: Point, delta_deg: float) -> Point:
    """Apex of the symmetric two-leg detour deflected by ``delta_deg`` at ``i_pose``."""
    length = math.dist(i_pose, j_pose)
    leg = (length / 2) / math.cos(math.radians(delta_deg))
    heading = math.radians(_bearing(i_pose, j_pose) + delta_deg)
    return (i_pose[0] + leg * math.cos(heading), i_pose[1] + leg * math.sin(heading))


def edge_free(
    i_pose: Point,
    j_pose: Point,
    others: Iterable[SceneObject],
    r_g: float,
    workspace: Workspace | None = None,
    predicate: Predicate = Predicate.STRAIGHT,
    access_point: Point | None = None,
    bin_width: float = 5.0,
    max_deflection: float = 45.0,
) -> bool:
    """Edge test between two poses.

    ``STRAIGHT`` requires the straight swept corridor to be clear.
    ``VFH`` looks for a heading, deflected from the direct bearing by at most
    ``max_deflection`` degrees, that is free in the polar histogram at ``i``
    while the mirrored heading is free at ``j``; the two rays then meet in a
    collision-free two-leg detour.
    """
    if predicate is Predicate.STRAIGHT:
        return corridor_free(Corridor(i_pose, j_pose, r_g), others, workspace, access_point)
    apex = vfh_detour(i_pose, j_pose, others, r_g, workspace, access_point, bin_width, max_deflection)
    return apex is not None
