"""Scenario runs, a time proxy for execution, exact oracles and the benchmark table."""
from __future__ import annotations

import csv
import enum
import io
import math
import statistics
import time
from dataclasses import dataclass, field
from typing import Iterable

from .collision import Predicate
from .errors import DeclutterError, PlannerError
from .occlusion import OcclusionModel, RevealPolicy, accessible_set, reveal_update
from .planners import (
    ArmProxy,
    Event,
    ExecutionTrace,
    Strategy,
    baseline_density,
    baseline_distance,
    distance_plan_fn,
    dynamic_plan,
    static_plan,
    uncertain_plan,
)
from .scene import SceneState, generate_instance

BRUTE_FORCE_LIMIT = 10
CSV_HEADER = (
    "size,scenario,planner,mean_relocations,std_relocations,"
    "mean_plan_time_s,std_plan_time_s,mean_proxy_cost_s,std_proxy_cost_s"
)


class Scenario(enum.IntEnum):
    S1 = 1  # everything known
    S2 = 2  # some obstacles hidden, target known
    S3 = 3  # target may be hidden too


class ScenarioMismatch(DeclutterError):
    """The scene's visibility pattern does not fit the requested scenario."""


# planners that make sense in each scenario; the first is the default
SCENARIO_PLANNERS = {
    Scenario.S1: ("static", "distance", "density"),
    Scenario.S2: ("dynamic", "distance"),
    Scenario.S3: ("volume", "closest", "farthest"),
}

DEFAULT_REVEAL = {
    Scenario.S1: RevealPolicy.ACCESSIBILITY,
    Scenario.S2: RevealPolicy.ACCESSIBILITY,
    Scenario.S3: RevealPolicy.COMBINED,
}


@dataclass(frozen=True)
class CostModel:
    """Seconds spent per pick-and-place plus seconds per metre carried."""

    pick_place_cost: float = 45.0
    transport_cost: float = 2.0

    def __post_init__(self):
        if self.pick_place_cost < 0 or self.transport_cost < 0:
            raise ValueError("costs must be non-negative")

    def of(self, scene: SceneState, ids: Iterable[int]) -> float:
        access = scene.robot.access_point
        return sum(
            self.pick_place_cost + self.transport_cost * math.dist(scene[i].center, access)
            for i in ids
        )


@dataclass(frozen=True)
class PlannerConfig:
    planner: str | None = None  # None: the scenario's default planner
    predicate: Predicate = Predicate.STRAIGHT
    reveal_policy: RevealPolicy | None = None  # None: the scenario's default
    use_arm: bool = True
    model: OcclusionModel = field(default_factory=OcclusionModel)
    cost: CostModel = field(default_factory=CostModel)


@dataclass
class RunMetrics:
    scenario: Scenario
    planner: str
    relocations: int = 0
    search_relocations: int = 0
    planning_time_total: float = 0.0
    planning_time_per_iteration: list[float] = field(default_factory=list)
    proxy_cost: float = 0.0
    events: list[Event] = field(default_factory=list)
    # removals of objects that were not accessible at that moment
    inaccessible_steps: int = 0
    completed: bool = False

    @property
    def arm_conflicts(self) -> int:
        return sum(1 for e in self.events if e.kind == "arm_conflict")

    @property
    def reveals(self) -> int:
        return sum(len(e.ids) for e in self.events if e.kind == "reveal")

    def to_dict(self) -> dict:
        return {
            "scenario": int(self.scenario),
            "planner": self.planner,
            "completed": self.completed,
            "relocations": self.relocations,
            "search_relocations": self.search_relocations,
            "planning_time_total": self.planning_time_total,
            "planning_time_per_iteration": list(self.planning_time_per_iteration),
            "proxy_cost": self.proxy_cost,
            "inaccessible_steps": self.inaccessible_steps,
            "events": [e.to_dict() for e in self.events],
        }


def check_scenario(scene: SceneState, scenario: Scenario) -> None:
    if scenario is Scenario.S1 and scene.hidden:
        raise ScenarioMismatch("scenario 1 needs a fully known scene")
    if scenario is Scenario.S2 and not scene.target.known:
        raise ScenarioMismatch("scenario 2 needs a known target")


def _metrics_from_trace(scenario, planner, original: SceneState, trace: ExecutionTrace,
                        cost: CostModel, completed: bool) -> RunMetrics:
    moved = [i for e in trace.events if e.kind in ("relocate", "grasp") for i in e.ids]
    return RunMetrics(
        scenario=scenario,
        planner=planner,
        relocations=trace.relocations,
        search_relocations=trace.search_relocations,
        planning_time_total=math.fsum(trace.plan_times),
        planning_time_per_iteration=list(trace.plan_times),
        proxy_cost=cost.of(original, moved),
        events=list(trace.events),
        inaccessible_steps=trace.inaccessible_steps,
        completed=completed,
    )


def _run_fixed(scene: SceneState, planner: str, config: PlannerConfig) -> ExecutionTrace:
    """S1: plan once, then remove in order, sensing after every removal."""
    trace = ExecutionTrace()
    start = time.perf_counter()
    try:
        if planner == "static":
            seq = static_plan(scene, config.predicate).sequence
        elif planner == "distance":
            seq = baseline_distance(scene).sequence
        else:
            seq = baseline_density(scene).sequence
    finally:
        trace.plan_times.append(time.perf_counter() - start)
        trace.add("replan", scene.target.id)
    policy = config.reveal_policy or DEFAULT_REVEAL[Scenario.S1]
    target = scene.target.id
    for oid in seq + (target,):
        if oid not in accessible_set(scene, config.predicate):
            trace.inaccessible_steps += 1
        scene = scene.remove(oid)
        trace.add("grasp" if oid == target else "relocate", oid)
        if oid != target:
            scene, new = reveal_update(scene, policy, config.model, config.predicate)
            for r in new:
                trace.add("reveal", r)
    trace.final_scene = scene
    return trace


def run_scenario(
    scene: SceneState,
    scenario: Scenario | int,
    config: PlannerConfig | None = None,
) -> RunMetrics:
    """Run one planner on one scene under the rules of ``scenario``.

    Planner failures propagate; the exception carries the partial metrics
    in its ``metrics`` attribute.
    """
    scenario = Scenario(scenario)
    config = config or PlannerConfig()
    check_scenario(scene, scenario)
    planner = config.planner or SCENARIO_PLANNERS[scenario][0]
    if planner not in SCENARIO_PLANNERS[scenario]:
        raise ScenarioMismatch(f"planner {planner!r} does not run in scenario {int(scenario)}")
    policy = config.reveal_policy or DEFAULT_REVEAL[scenario]
    arm = ArmProxy.from_robot(scene.robot) if config.use_arm else None

    try:
        if scenario is Scenario.S1:
            trace = _run_fixed(scene, planner, config)
        elif scenario is Scenario.S2:
            plan_fn = distance_plan_fn if planner == "distance" else None
            trace = dynamic_plan(scene, arm, policy, config.predicate, config.model, plan_fn=plan_fn)
        else:
            trace = uncertain_plan(
                scene, Strategy(planner), arm, policy, config.predicate, config.model
            )
    except PlannerError as exc:
        partial = exc.trace or ExecutionTrace()
        exc.metrics = _metrics_from_trace(scenario, planner, scene, partial, config.cost, False)
        raise
    return _metrics_from_trace(scenario, planner, scene, trace, config.cost, True)


def brute_force_min_relocations(
    scene: SceneState,
    predicate: Predicate = Predicate.STRAIGHT,
    limit: int = BRUTE_FORCE_LIMIT,
) -> int:
    """Fewest removals of accessible objects after which the target is accessible.

    Breadth-first search over sets of removed objects; exponential, hence
    the size guard.
    """
    if scene.n_obstacles > limit or len(scene.known) - 1 > limit:
        raise ValueError(f"brute force is limited to {limit} known obstacles")
    target = scene.target.id
    if not scene[target].known:
        raise PlannerError(f"target {target} is not known")
    seen = {frozenset()}
    layer = [scene]
    depth = 0
    while layer:
        nxt = []
        for state in layer:
            acc = accessible_set(state, predicate)
            if target in acc:
                return depth
            for oid in sorted(acc):
                removed = frozenset(o.id for o in state.objects if not o.present) | {oid}
                if removed not in seen:
                    seen.add(removed)
                    nxt.append(state.remove(oid))
        layer = nxt
        depth += 1
    raise PlannerError("the target cannot be made accessible")


@dataclass(frozen=True)
class BenchRow:
    size: int
    scenario: Scenario
    planner: str
    relocations: tuple[int, ...]
    plan_times: tuple[float, ...]
    proxy_costs: tuple[float, ...]
    failures: int = 0

    @staticmethod
    def _stats(values) -> tuple[float, float]:
        if not values:
            return math.nan, math.nan
        mean = statistics.fmean(values)
        std = statistics.pstdev(values) if len(values) > 1 else 0.0
        return mean, std

    def csv_fields(self, include_timing: bool = True) -> list[str]:
        out = [str(self.size), str(int(self.scenario)), self.planner]
        for name, values in (("r", self.relocations), ("t", self.plan_times), ("c", self.proxy_costs)):
            mean, std = self._stats(values)
            if name == "t" and not include_timing:
                mean, std = 0.0, 0.0
            out += [f"{mean:.6g}", f"{std:.6g}"]
        return out


BENCH_REJECTIONS = 200_000  # crowded plannable scenes (18-20 objects) are rare


def bench_instance(seed: int, size: int, scenario: Scenario, hidden_fraction: float = 0.2) -> SceneState:
    """The scene used for one benchmark repetition."""
    if scenario is Scenario.S1:
        hidden_fraction = 0.0
    return generate_instance(
        seed, size, hidden_fraction, hide_target=scenario is Scenario.S3,
        require_plannable=True, max_rejections=BENCH_REJECTIONS,
    )


def bench(
    sizes: Iterable[int],
    repetitions: int,
    seed: int = 0,
    scenarios: Iterable[Scenario | int] = (Scenario.S1,),
    config: PlannerConfig | None = None,
) -> list[BenchRow]:
    """Aggregate every scenario planner over ``repetitions`` instances per size.

    Repetition ``r`` of size ``n`` uses instance seed ``seed + 1000 * n + r``,
    so the same scene is shared by all planners.
    """
    if repetitions < 1:
        raise ValueError("repetitions must be at least 1")
    config = config or PlannerConfig()
    rows = []
    for size in sizes:
        for scenario in map(Scenario, scenarios):
            scenes = [bench_instance(seed + 1000 * size + r, size, scenario) for r in range(repetitions)]
            for planner in SCENARIO_PLANNERS[scenario]:
                cfg = PlannerConfig(planner, config.predicate, config.reveal_policy,
                                    config.use_arm, config.model, config.cost)
                rel, times, costs, failures = [], [], [], 0
                for s in scenes:
                    try:
                        m = run_scenario(s, scenario, cfg)
                    except PlannerError:
                        failures += 1
                        continue
                    rel.append(m.relocations)
                    times.append(m.planning_time_total)
                    costs.append(m.proxy_cost)
                rows.append(BenchRow(size, scenario, planner, tuple(rel), tuple(times),
                                     tuple(costs), failures))
    return rows


def bench_csv(rows: Iterable[BenchRow], include_timing: bool = True) -> str:
    """CSV text for ``rows``; without timing the output is byte-reproducible."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER.split(","))
    for row in rows:
        writer.writerow(row.csv_fields(include_timing))
    return buf.getvalue()
