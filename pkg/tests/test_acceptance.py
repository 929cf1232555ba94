"""Exit criteria of the package, each checked at its stated tolerance.

Every test records one ``criterion N PASS/FAIL: ...`` line, shown in the
terminal summary, then asserts. Instance streams are fixed up front:
criterion ``N`` experiments never reuse the seeds of another criterion
except where the same benchmark scenes are meant to be shared.
"""
import math
import statistics
import time
from collections import deque

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from declutter.errors import Disconnected, NoAccessibleObject, PlannerError
from declutter.occlusion import OcclusionModel, accessible_set, occluded_area, point_occluded_by
from declutter.plangraph import gen_graph
from declutter.planners import ArmProxy, Strategy, dynamic_plan, static_plan, uncertain_plan
from declutter.scene import CameraConfig, generate_instance
from declutter.sim import PlannerConfig, Scenario, bench_instance, brute_force_min_relocations, run_scenario

from oracles import exhaustive_min_hop
from properties import check_dense_oracle, check_monotonicity, check_scale_invariance, check_symmetry

pytestmark = pytest.mark.acceptance

BENCH_SEED = 10_000  # benchmark stream at 10 objects: seed + 1000 * size + r with seed 0


def report(n, ok, detail):
    line = f"criterion {n} {'PASS' if ok else 'FAIL'}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def mean_relocations(scenario, planner, scenes):
    return statistics.fmean(run_scenario(s, scenario, PlannerConfig(planner)).relocations for s in scenes)


def graph_oracle_k(scene):
    """Exhaustive min-hop over the plan graph from every accessible object."""
    t = scene.target.id
    g = gen_graph(scene, target_id=t)
    adj = {v: {} for v in g.nodes}
    for i, j in g.edges():
        adj[i][j] = adj[j][i] = math.dist(scene[i].center, scene[j].center)
    best = None
    for v in sorted(accessible_set(scene)):
        r = exhaustive_min_hop(adj, v, t)
        if r is not None and (best is None or r[0] < best[0]):
            best = r
    return None if best is None else best[0] - 1


def test_criterion_1_optimality():
    start = time.perf_counter()
    graph_bad, space_bad = [], []
    for i in range(100):
        s = generate_instance(i, 6 + i % 5, require_plannable=True)
        k = static_plan(s).k
        if graph_oracle_k(s) != k:
            graph_bad.append(i)
        exact = brute_force_min_relocations(s)
        if exact != k:
            space_bad.append((i, k, exact))
    elapsed = time.perf_counter() - start
    agree = 1 - len(space_bad) / 100
    ok = not graph_bad and agree >= 0.95 and elapsed < 120
    report(1, ok, f"graph oracle mismatches {len(graph_bad)}/100; state-space agreement {agree:.0%} "
                  f"(need >= 95%; discrepancies (seed, k, exact) {space_bad}); {elapsed:.1f} s")
    assert ok


def test_criterion_2_static_vs_distance():
    start = time.perf_counter()
    scenes = [bench_instance(BENCH_SEED + r, 10, Scenario.S1) for r in range(50)]
    static = mean_relocations(Scenario.S1, "static", scenes)
    distance = mean_relocations(Scenario.S1, "distance", scenes)
    elapsed = time.perf_counter() - start
    reduction = (distance - static) / distance
    ok = static <= distance and reduction >= 0.10 and elapsed < 60
    report(2, ok, f"static {static:.2f} vs distance {distance:.2f} relocations, "
                  f"reduction {reduction:.1%} (need >= 10%); {elapsed:.1f} s")
    assert ok


def test_criterion_3_strategy_ordering():
    start = time.perf_counter()
    scenes = [bench_instance(BENCH_SEED + r, 10, Scenario.S3) for r in range(50)]
    m = {p: mean_relocations(Scenario.S3, p, scenes) for p in ("volume", "closest", "farthest")}
    elapsed = time.perf_counter() - start
    ok = m["farthest"] <= m["closest"] and m["volume"] <= m["closest"] and elapsed < 120
    report(3, ok, f"volume {m['volume']:.2f}, closest {m['closest']:.2f}, farthest {m['farthest']:.2f} "
                  f"(need farthest <= closest and volume <= closest); {elapsed:.1f} s")
    assert ok


def test_criterion_4_dynamic_vs_distance_replanner():
    start = time.perf_counter()
    scenes = [bench_instance(BENCH_SEED + r, 10, Scenario.S2) for r in range(50)]
    dynamic = mean_relocations(Scenario.S2, "dynamic", scenes)
    distance = mean_relocations(Scenario.S2, "distance", scenes)
    elapsed = time.perf_counter() - start
    reduction = (distance - dynamic) / distance
    ok = dynamic <= distance and reduction >= 0.10
    report(4, ok, f"dynamic {dynamic:.2f} vs distance replanner {distance:.2f} relocations, "
                  f"reduction {reduction:.1%} (need >= 10%); {elapsed:.1f} s")
    assert ok


def test_criterion_5_planning_time_scaling():
    sizes = list(range(6, 21, 2))
    times = []
    for n in sizes:
        per = []
        for r in range(5):
            s = bench_instance(1000 * n + r, n, Scenario.S1)
            best = math.inf
            for _ in range(3):
                t0 = time.perf_counter()
                static_plan(s)
                best = min(best, time.perf_counter() - t0)
            per.append(best)
        times.append(statistics.fmean(per))
    slope = float(np.polyfit(np.log(sizes), np.log(times), 1)[0])
    t20 = times[-1]
    ok = t20 < 3.0 and slope <= 4.5
    report(5, ok, f"static_plan at 20 objects {t20 * 1e3:.2f} ms (need < 3 s); "
                  f"log-log slope over 6-20 {slope:.2f} (need <= 4.5)")
    assert ok


def _graph_connects(scene):
    t = scene.target.id
    g = gen_graph(scene, target_id=t)
    adj = {v: set() for v in g.nodes}
    for i, j in g.edges():
        adj[i].add(j)
        adj[j].add(i)
    seen = set(accessible_set(scene))
    queue = deque(seen)
    while queue:
        v = queue.popleft()
        for u in adj[v] - seen:
            seen.add(u)
            queue.append(u)
    return t in seen


def test_criterion_6_completeness():
    static_fail, connected = [], 0
    for i in range(200):
        s = generate_instance(30_000 + i, 6 + i % 5)
        if _graph_connects(s):
            connected += 1
            try:
                static_plan(s)
            except PlannerError:
                static_fail.append(i)
        else:
            with pytest.raises((Disconnected, NoAccessibleObject)):
                static_plan(s)

    dyn_fail, dyn_over = [], []
    for i in range(200):
        s = bench_instance(40_000 + i, 6 + i % 5, Scenario.S2)
        bound = s.n_obstacles + len(s.hidden)  # N + M
        try:
            trace = dynamic_plan(s, ArmProxy.from_robot(s.robot))
        except PlannerError:
            dyn_fail.append(i)
            continue
        if trace.relocations > bound:
            dyn_over.append(i)

    unc_fail = []
    for i in range(200):
        s = bench_instance(50_000 + i, 6 + i % 5, Scenario.S3)
        for strategy in Strategy:
            try:
                uncertain_plan(s, strategy, ArmProxy.from_robot(s.robot))
            except PlannerError:
                unc_fail.append((i, strategy.value))

    ok = not (static_fail or dyn_fail or dyn_over or unc_fail)
    report(6, ok, f"static failures {len(static_fail)} on {connected} connected graphs; "
                  f"dynamic failures {len(dyn_fail)}, bound violations {len(dyn_over)} on 200 S2; "
                  f"uncertain failures {len(unc_fail)} on 200 S3 x 3 strategies")
    assert ok


def test_criterion_7_geometry_properties():
    bad = {
        "monotonicity": check_monotonicity(10_000),
        "symmetry": check_symmetry(10_000),
        "scale invariance": check_scale_invariance(10_000),
        "dense oracle": check_dense_oracle(1_000),
    }
    ok = not any(bad.values())
    report(7, ok, "; ".join(f"{k} {len(v)} failures" for k, v in bad.items())
           + " (10,000 cases each, 1,000 dense-oracle corridors)")
    assert ok


def test_criterion_8_occlusion_numerics():
    coarse, fine = OcclusionModel(grid_resolution=0.005), OcclusionModel(grid_resolution=0.0025)
    corpus = [bench_instance(BENCH_SEED + r, 10, Scenario.S1) for r in range(20)]
    diffs = []
    for s in corpus:
        for o in s.objects:
            a, b = occluded_area(o, s, coarse), occluded_area(o, s, fine)
            diffs.append(0.0 if a == b else abs(a - b) / b if b else math.inf)
    worst = max(diffs)
    over = sum(d >= 0.05 for d in diffs)
    total_a = sum(occluded_area(o, s, coarse) for s in corpus for o in s.objects)
    total_b = sum(occluded_area(o, s, fine) for s in corpus for o in s.objects)

    res = 0.005
    stray = 0
    for s in corpus[:5]:
        cam = CameraConfig(s.workspace.width / 2, s.workspace.depth / 2, 1e6)
        nx, ny = int(s.workspace.width / res), int(s.workspace.depth / res)
        for o in s.objects:
            for ix in range(max(0, int((o.x - 0.05) / res)), min(nx, int((o.x + 0.05) / res) + 1)):
                for iy in range(max(0, int((o.y - 0.05) / res)), min(ny, int((o.y + 0.05) / res) + 1)):
                    p = ((ix + 0.5) * res, (iy + 0.5) * res)
                    if point_occluded_by(p, o, cam) and math.dist(p, o.center) > o.radius + res:
                        stray += 1

    ok = over == 0 and stray == 0
    report(8, ok, f"5 mm vs 2.5 mm per-object difference: worst {worst:.2%}, {over}/{len(diffs)} "
                  f"objects at or above 5% (corpus total differs by {abs(total_a - total_b) / total_b:.2%}); "
                  f"nadir shadow cells beyond one grid cell of the footprint: {stray}")
    assert ok
