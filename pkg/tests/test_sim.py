import math

import pytest

from declutter.errors import PlannerError
from declutter.occlusion import RevealPolicy
from declutter.planners import static_plan
from declutter.scene import generate_instance
from declutter.sim import (
    CSV_HEADER,
    SCENARIO_PLANNERS,
    BenchRow,
    CostModel,
    PlannerConfig,
    Scenario,
    ScenarioMismatch,
    bench,
    bench_csv,
    bench_instance,
    brute_force_min_relocations,
    run_scenario,
)

from builders import obj, scene_of


def hidden_blocker_scene():
    return scene_of(obj(0, 0.35, 0.42, target=True), obj(1, 0.35, 0.15), obj(2, 0.35, 0.28, hidden=True))


# --- cost model ---------------------------------------------------------------


def test_cost_model_defaults_and_validation():
    c = CostModel()
    assert (c.pick_place_cost, c.transport_cost) == (45.0, 2.0)
    with pytest.raises(ValueError):
        CostModel(-1.0, 2.0)
    with pytest.raises(ValueError):
        CostModel(45.0, -0.1)


def test_cost_of_uses_distance_to_access():
    s = scene_of(obj(0, 0.35, 0.3, target=True))
    assert CostModel(10.0, 3.0).of(s, [0]) == pytest.approx(10.0 + 3.0 * 0.3)


# --- run_scenario -------------------------------------------------------------


def test_s1_accessible_target_costs_only_extraction():
    s = scene_of(obj(0, 0.35, 0.3, target=True), obj(1, 0.1, 0.4))
    m = run_scenario(s, Scenario.S1)
    assert m.completed
    assert m.relocations == 0
    assert m.proxy_cost == pytest.approx(45.0 + 2.0 * 0.3)


def test_s1_runs_static_plan_in_order():
    s = generate_instance(3, 8, require_plannable=True)
    m = run_scenario(s, 1)
    relocated = [i for e in m.events if e.kind == "relocate" for i in e.ids]
    assert tuple(relocated) == static_plan(s).sequence
    assert [e.kind for e in m.events][-1] == "grasp"


@pytest.mark.parametrize("planner", SCENARIO_PLANNERS[Scenario.S1])
@pytest.mark.parametrize("seed", range(5))
def test_metrics_invariants(planner, seed):
    s = generate_instance(seed, 9, require_plannable=True)
    m = run_scenario(s, Scenario.S1, PlannerConfig(planner))
    assert m.relocations == sum(1 for e in m.events if e.kind == "relocate")
    assert abs(sum(m.planning_time_per_iteration) - m.planning_time_total) < 1e-6
    moved = [i for e in m.events if e.kind in ("relocate", "grasp") for i in e.ids]
    assert len(moved) == len(set(moved))
    assert m.proxy_cost == pytest.approx(CostModel().of(s, moved))


def test_s2_scripted_reveal_and_replan():
    m = run_scenario(hidden_blocker_scene(), Scenario.S2)
    kinds = [e.kind for e in m.events]
    assert m.reveals >= 1
    assert "replan" in kinds
    assert m.relocations == 2


@pytest.mark.parametrize("seed", range(10))
def test_s2_event_conservation(seed):
    s = bench_instance(seed, 10, Scenario.S2)
    m = run_scenario(s, Scenario.S2)
    revealed = set()
    known = {o.id for o in s.known}
    for e in m.events:
        if e.kind == "reveal":
            revealed.update(e.ids)
        if e.kind in ("relocate", "grasp"):
            (oid,) = e.ids
            assert oid in known | revealed
            known.discard(oid)
            revealed.discard(oid)
    assert m.relocations <= s.n_obstacles


def test_s3_known_target_has_no_search():
    for planner in SCENARIO_PLANNERS[Scenario.S3]:
        m = run_scenario(hidden_blocker_scene(), Scenario.S3, PlannerConfig(planner))
        assert m.search_relocations == 0
        assert m.completed


def test_s3_hidden_target_is_searched():
    s = scene_of(obj(0, 0.35, 0.42, target=True, hidden=True), obj(1, 0.35, 0.22))
    m = run_scenario(s, Scenario.S3, PlannerConfig("closest", reveal_policy=RevealPolicy.ACCESSIBILITY))
    assert m.search_relocations == 1
    assert m.to_dict()["search_relocations"] == 1


def test_scenario_mismatch():
    with pytest.raises(ScenarioMismatch):
        run_scenario(hidden_blocker_scene(), Scenario.S1)
    hidden_target = scene_of(obj(0, 0.35, 0.42, target=True, hidden=True), obj(1, 0.35, 0.22))
    with pytest.raises(ScenarioMismatch):
        run_scenario(hidden_target, Scenario.S2)
    with pytest.raises(ScenarioMismatch):
        run_scenario(hidden_blocker_scene(), Scenario.S2, PlannerConfig("density"))


def test_planner_failure_carries_partial_metrics():
    row = [obj(i + 1, 0.07 + 0.06 * i, 0.12) for i in range(10)]
    s = scene_of(obj(0, 0.35, 0.4, target=True), *row)
    with pytest.raises(PlannerError) as info:
        run_scenario(s, Scenario.S1)
    assert info.value.metrics.completed is False


def test_metrics_to_dict_round_trips_events():
    m = run_scenario(hidden_blocker_scene(), Scenario.S2)
    d = m.to_dict()
    assert d["scenario"] == 2
    assert d["relocations"] == m.relocations
    assert [e["kind"] for e in d["events"]] == [e.kind for e in m.events]


# --- brute force oracle -------------------------------------------------------


def test_brute_force_accessible_target():
    s = scene_of(obj(0, 0.35, 0.3, target=True), obj(1, 0.1, 0.4))
    assert brute_force_min_relocations(s) == 0


def test_brute_force_single_blocker():
    s = scene_of(obj(0, 0.35, 0.4, target=True), obj(1, 0.35, 0.2))
    assert brute_force_min_relocations(s) == 1


def test_brute_force_size_guard():
    s = generate_instance(0, 12, min_gap=0.0)
    with pytest.raises(ValueError):
        brute_force_min_relocations(s)


@pytest.mark.parametrize("seed", range(50))
def test_static_plan_is_an_upper_bound_on_brute_force(seed):
    # the exact minimum over scene states is a lower bound on the graph plan
    s = generate_instance(seed, 8, require_plannable=True)
    assert brute_force_min_relocations(s) <= static_plan(s).k


# --- bench --------------------------------------------------------------------


def test_bench_single_rep_has_zero_std():
    rows = bench([6], 1, seed=5)
    assert [r.planner for r in rows] == list(SCENARIO_PLANNERS[Scenario.S1])
    for r in rows:
        fields = r.csv_fields()
        assert fields[4] == "0" and fields[6] == "0" and fields[8] == "0"


def test_bench_csv_is_reproducible_without_timing():
    a = bench_csv(bench([6, 8], 3, seed=11, scenarios=(1, 2)), include_timing=False)
    b = bench_csv(bench([6, 8], 3, seed=11, scenarios=(1, 2)), include_timing=False)
    assert a == b
    lines = a.splitlines()
    assert lines[0] == CSV_HEADER
    assert len(lines) == 1 + 2 * (3 + 2)


def test_bench_rejects_zero_reps():
    with pytest.raises(ValueError):
        bench([6], 0)


def test_bench_row_stats():
    row = BenchRow(6, Scenario.S1, "static", (1, 3), (0.1, 0.3), (50.0, 150.0))
    f = row.csv_fields()
    assert f[:3] == ["6", "1", "static"]
    assert float(f[3]) == 2.0 and float(f[4]) == 1.0
    assert float(f[7]) == 100.0
    assert row.csv_fields(include_timing=False)[5:7] == ["0", "0"]


def test_bench_row_without_values_is_nan():
    row = BenchRow(6, Scenario.S2, "dynamic", (), (), (), failures=3)
    assert math.isnan(float(row.csv_fields()[3]))


def test_bench_instances_follow_the_scenario():
    assert not bench_instance(1, 8, Scenario.S1).hidden
    s2 = bench_instance(1, 10, Scenario.S2)
    assert s2.target.known and len(s2.hidden) == 2
    s3 = bench_instance(1, 10, Scenario.S3)
    assert not s3.target.known
