"""Pose graph over known objects and min-hop search on it.

Two poses are joined when the gripper, dilated to carry the largest known
object, can travel between them with both pose owners absent. A path from
an accessible node to the target therefore lists objects that, removed in
order, open a route to the target.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

from . import kernels
from .collision import Predicate, edge_free, points_clear_of_walls
from .errors import TargetUnknown
from .occlusion import dilated_radius
from .scene import SceneState

DIST_TIE = 1e-9


@dataclass(frozen=True)
class PlanGraph:
    nodes: tuple[int, ...]
    adjacency: dict[int, frozenset[int]]
    target: int | None
    poses: dict[int, tuple[float, float]]
    r_g: float
    predicate: Predicate
    n_checks: int = field(default=0, compare=False)

    def has_edge(self, i: int, j: int) -> bool:
        return j in self.adjacency.get(i, ())

    def edges(self) -> list[tuple[int, int]]:
        return sorted((i, j) for i in self.nodes for j in self.adjacency[i] if i < j)

    def dump_edges(self) -> str:
        """Edge list, one ``i j`` pair per line."""
        return "".join(f"{i} {j}\n" for i, j in self.edges())

    def distance(self, i: int, j: int) -> float:
        return math.dist(self.poses[i], self.poses[j])


@dataclass(frozen=True)
class PathResult:
    nodes: tuple[int, ...]
    distance: float

    @property
    def hop_count(self) -> int:
        return len(self.nodes)

    def key(self):
        return (self.hop_count, self.distance, self.nodes)


def better_path(a: PathResult, b: PathResult | None) -> bool:
    """Ordering used everywhere paths compete: hops, then distance, then ids."""
    if b is None:
        return True
    if a.hop_count != b.hop_count:
        return a.hop_count < b.hop_count
    if abs(a.distance - b.distance) > DIST_TIE:
        return a.distance < b.distance
    return a.nodes < b.nodes


def gen_graph(
    scene: SceneState,
    predicate: Predicate = Predicate.STRAIGHT,
    target_id: int | None = None,
    r_g: float | None = None,
    bin_width: float = 5.0,
    max_deflection: float = 45.0,
) -> PlanGraph:
    known = scene.known
    if not known:
        raise TargetUnknown("no known objects to build a graph from")
    if target_id is None:
        target_id = scene.target.id
    if target_id not in {o.id for o in known}:
        target_id = None
    r_g = dilated_radius(scene, known) if r_g is None else r_g
    ws = scene.workspace
    ids = [o.id for o in known]
    n = len(known)
    adjacency: dict[int, set[int]] = {i: set() for i in ids}

    if predicate is Predicate.STRAIGHT:
        free = kernels.pair_free(
            [o.x for o in known], [o.y for o in known], [o.radius for o in known], r_g
        )
        inside = [points_clear_of_walls([o.center], r_g, ws, open_bottom=False) for o in known]
        for a in range(n):
            if not inside[a]:
                continue
            for b in range(a + 1, n):
                if inside[b] and free[a, b]:
                    adjacency[ids[a]].add(ids[b])
                    adjacency[ids[b]].add(ids[a])
    else:
        for a in range(n):
            for b in range(a + 1, n):
                others = [o for k, o in enumerate(known) if k != a and k != b]
                if edge_free(known[a].center, known[b].center, others, r_g, ws, predicate,
                             access_point=scene.robot.access_point,
                             bin_width=bin_width, max_deflection=max_deflection):
                    adjacency[ids[a]].add(ids[b])
                    adjacency[ids[b]].add(ids[a])

    return PlanGraph(
        nodes=tuple(ids),
        adjacency={i: frozenset(v) for i, v in adjacency.items()},
        target=target_id,
        poses={o.id: o.center for o in known},
        r_g=r_g,
        predicate=predicate,
        n_checks=(n * (n - 1) // 2) * max(n - 2, 0),
    )


def _hop_layers(g: PlanGraph, source: int) -> dict[int, int]:
    layer = {source: 0}
    queue = deque([source])
    while queue:
        v = queue.popleft()
        for u in sorted(g.adjacency[v]):
            if u not in layer:
                layer[u] = layer[v] + 1
                queue.append(u)
    return layer


def min_hop_path(g: PlanGraph, start: int, goal: int) -> PathResult | None:
    """Fewest-node path ``start -> goal``; ties go to the shorter Euclidean length.

    Exact over all min-hop paths: BFS layers from ``goal`` define the
    shortest-path DAG and a distance relaxation runs over it.
    """
    layer = _hop_layers(g, goal)
    if start not in layer:
        return None
    depth = layer[start]
    best: dict[int, PathResult] = {goal: PathResult((goal,), 0.0)}
    by_layer: dict[int, list[int]] = {}
    for v, lv in layer.items():
        if 0 < lv <= depth:
            by_layer.setdefault(lv, []).append(v)
    for lv in range(1, depth + 1):
        for v in by_layer.get(lv, []):
            choice = None
            for u in g.adjacency[v]:
                if layer.get(u) != lv - 1:
                    continue
                tail = best[u]
                cand = PathResult((v,) + tail.nodes, g.distance(v, u) + tail.distance)
                if better_path(cand, choice):
                    choice = cand
            best[v] = choice
    return best[start]
