"""Minimum-relocation planning for target retrieval from tabletop clutter."""
from .collision import Corridor, Predicate, build_histogram, corridor_free, dist_point_segment, edge_free
from .errors import (
    DeclutterError,
    Disconnected,
    InstanceGenerationError,
    NoAccessibleObject,
    PlannerError,
    SceneValidationError,
    TargetNeverFound,
    TargetUnknown,
)
from .kernels import BACKEND
from .occlusion import (
    OcclusionModel,
    RevealPolicy,
    accessible_set,
    occluded_area,
    point_occluded_by,
    reveal_update,
    visible_fraction,
)
from .plangraph import PathResult, PlanGraph, gen_graph, min_hop_path
from .planners import (
    ArmProxy,
    RelocationPlan,
    Strategy,
    arm_colliding_objects,
    baseline_density,
    baseline_distance,
    dynamic_plan,
    static_plan,
    uncertain_plan,
)
from .render import render_svg
from .scene import (
    CameraConfig,
    RobotConfig,
    Role,
    SceneObject,
    SceneState,
    Visibility,
    Workspace,
    generate_instance,
    load_scene,
    save_scene,
)
from .sim import (
    CostModel,
    PlannerConfig,
    RunMetrics,
    Scenario,
    bench,
    bench_csv,
    brute_force_min_relocations,
    run_scenario,
)

__version__ = "0.1.0"
