"""``declutter`` command line: generate, plan, simulate, benchmark and render.

Exit status: 0 on success, 1 on bad input (flags, files, scene content),
2 when a planner fails. A JSON config file with default settings can be
given with ``--config`` or the ``DECLUTTER_CONFIG`` environment variable.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, fields, replace
from pathlib import Path

from .collision import Predicate
from .errors import DeclutterError, PlannerError
from .occlusion import OcclusionModel, RevealPolicy
from .planners import (
    ArmProxy,
    Strategy,
    baseline_density,
    baseline_distance,
    dynamic_plan,
    static_plan,
    uncertain_plan,
)
from .render import render_svg
from .scene import dumps_scene, generate_instance, load_scene
from .sim import CostModel, PlannerConfig, Scenario, bench, bench_csv, run_scenario

CONFIG_ENV = "DECLUTTER_CONFIG"
PLANNERS = ("static", "dynamic", "uncertain", "distance", "density")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass(frozen=True)
class CliConfig:
    predicate: str = "straight"
    reveal_policy: str | None = None
    strategy: str = "farthest"
    seed: int = 0
    grid_resolution: float = 0.005
    pick_place_cost: float = 45.0
    transport_cost: float = 2.0
    use_arm: bool = True

    def validate(self) -> "CliConfig":
        try:
            Predicate(self.predicate)
            Strategy(self.strategy)
            if self.reveal_policy is not None:
                RevealPolicy(self.reveal_policy)
            self.model()
            self.cost()
        except ValueError as exc:
            raise UsageError(f"config: {exc}") from None
        return self

    def model(self) -> OcclusionModel:
        return OcclusionModel(grid_resolution=self.grid_resolution)

    def cost(self) -> CostModel:
        return CostModel(self.pick_place_cost, self.transport_cost)

    def planner_config(self, planner=None) -> PlannerConfig:
        return PlannerConfig(
            planner=planner,
            predicate=Predicate(self.predicate),
            reveal_policy=RevealPolicy(self.reveal_policy) if self.reveal_policy else None,
            use_arm=self.use_arm,
            model=self.model(),
            cost=self.cost(),
        )


def load_config(path) -> CliConfig:
    if not path:
        return CliConfig()
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    known = {f.name for f in fields(CliConfig)}
    if not isinstance(data, dict) or set(data) - known:
        extra = sorted(set(data) - known) if isinstance(data, dict) else []
        raise UsageError(f"config {path}: unknown keys {extra}")
    return CliConfig(**data).validate()


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="declutter", description="Plan which objects to move to reach a target.")
    p.add_argument("--config", help=f"JSON config file (default: ${CONFIG_ENV})")
    p.add_argument("--predicate", choices=[e.value for e in Predicate])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", help="generate a random scene")
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--objects", type=int, required=True)
    g.add_argument("--hidden", type=float, default=0.0, help="fraction of hidden objects")
    g.add_argument("--hide-target", action="store_true")
    g.add_argument("--out", required=True)

    pl = sub.add_parser("plan", help="print the relocation sequence")
    pl.add_argument("--scene", required=True)
    pl.add_argument("--planner", choices=PLANNERS, default="static")
    pl.add_argument("--strategy", choices=[e.value for e in Strategy])
    pl.add_argument("--no-arm", action="store_true")

    sm = sub.add_parser("simulate", help="run a scenario and print metrics as JSON")
    sm.add_argument("--scene", required=True)
    sm.add_argument("--scenario", type=int, choices=[1, 2, 3], required=True)
    sm.add_argument("--planner")
    sm.add_argument("--reveal", choices=[e.value for e in RevealPolicy])
    sm.add_argument("--no-timing", action="store_true", help="zero timings for reproducible output")

    b = sub.add_parser("bench", help="benchmark table as CSV")
    b.add_argument("--sizes", type=int, nargs="+", required=True)
    b.add_argument("--reps", type=int, required=True)
    b.add_argument("--scenarios", type=int, nargs="+", choices=[1, 2, 3], default=[1])
    b.add_argument("--seed", type=int)
    b.add_argument("--no-timing", action="store_true", help="zero timings for reproducible output")
    b.add_argument("--out", required=True)

    r = sub.add_parser("render", help="draw the scene as SVG")
    r.add_argument("--scene", required=True)
    r.add_argument("--plan", action="store_true", help="overlay the static plan path")
    r.add_argument("--out", required=True)
    return p


def _cmd_gen(args, cfg, out):
    scene = generate_instance(
        args.seed, args.objects, args.hidden, hide_target=args.hide_target,
        predicate=Predicate(cfg.predicate), require_plannable=True,
    )
    Path(args.out).write_text(dumps_scene(scene), encoding="utf-8")
    return 0


def _cmd_plan(args, cfg, out):
    scene = load_scene(args.scene)
    pred = Predicate(cfg.predicate)
    arm = None if args.no_arm or not cfg.use_arm else ArmProxy.from_robot(scene.robot)
    model = cfg.model()
    if args.planner == "static":
        seq = static_plan(scene, pred).sequence
    elif args.planner == "distance":
        seq = baseline_distance(scene).sequence
    elif args.planner == "density":
        seq = baseline_density(scene).sequence
    elif args.planner == "dynamic":
        seq = tuple(dynamic_plan(scene, arm, RevealPolicy(cfg.reveal_policy or "accessibility"),
                                 pred, model).relocated)
    else:
        strategy = Strategy(args.strategy or cfg.strategy)
        seq = tuple(uncertain_plan(scene, strategy, arm, RevealPolicy(cfg.reveal_policy or "combined"),
                                   pred, model).relocated)
    out.write(f"k={len(seq)}\n")
    out.write(" ".join(map(str, seq)) + "\n")
    return 0


def _cmd_simulate(args, cfg, out):
    scene = load_scene(args.scene)
    if args.reveal:
        cfg = replace(cfg, reveal_policy=args.reveal)
    metrics = run_scenario(scene, Scenario(args.scenario), cfg.planner_config(args.planner))
    data = metrics.to_dict()
    if args.no_timing:
        data["planning_time_total"] = 0.0
        data["planning_time_per_iteration"] = [0.0] * len(data["planning_time_per_iteration"])
    out.write(json.dumps(data, indent=2) + "\n")
    return 0


def _cmd_bench(args, cfg, out):
    if args.reps < 1 or any(s < 2 for s in args.sizes):
        raise UsageError("--reps must be >= 1 and every size >= 2")
    seed = cfg.seed if args.seed is None else args.seed
    rows = bench(args.sizes, args.reps, seed, args.scenarios, cfg.planner_config())
    Path(args.out).write_text(bench_csv(rows, include_timing=not args.no_timing), encoding="utf-8")
    return 0


def _cmd_render(args, cfg, out):
    scene = load_scene(args.scene)
    path = None
    if args.plan:
        plan = static_plan(scene, Predicate(cfg.predicate))
        path = plan.sequence + (scene.target.id,)
    Path(args.out).write_text(render_svg(scene, path), encoding="utf-8")
    return 0


COMMANDS = {
    "gen": _cmd_gen,
    "plan": _cmd_plan,
    "simulate": _cmd_simulate,
    "bench": _cmd_bench,
    "render": _cmd_render,
}


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        cfg = load_config(args.config or os.environ.get(CONFIG_ENV))
        if args.predicate:
            cfg = replace(cfg, predicate=args.predicate)
        return COMMANDS[args.command](args, cfg, out)
    except PlannerError as exc:
        err.write(f"declutter: planner failed: {type(exc).__name__}: {exc}\n")
        return 2
    except (UsageError, DeclutterError, ValueError, OSError) as exc:
        msg = str(exc).splitlines()[0] if str(exc) else type(exc).__name__
        err.write(f"declutter: error: {msg}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
