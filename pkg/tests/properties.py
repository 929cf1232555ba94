"""Randomised geometry property checks, shared by unit and acceptance tests.

Each ``check_*`` function runs ``n`` seeded random cases and returns the
list of failing case indices (empty when the property holds).
"""
from __future__ import annotations

import random
from dataclasses import replace

from declutter.collision import (
    Corridor,
    Predicate,
    build_histogram,
    corridor_free,
    edge_free,
    vfh_detour,
)
from declutter.scene import SceneObject, Workspace

from oracles import polyline_clear

WS = Workspace(0.7, 0.5)
ACCESS = (0.35, 0.0)
SCALES = (0.5, 2.0, 10.0)


def random_case(rng: random.Random, max_objects=8):
    """Random corridor among random discs; sometimes starting at the access point."""
    others = [
        SceneObject(k, rng.uniform(0.0, WS.width), rng.uniform(0.0, WS.depth),
                    rng.uniform(0.025, 0.03), 0.1)
        for k in range(rng.randint(0, max_objects))
    ]
    a = ACCESS if rng.random() < 0.25 else (rng.uniform(0.05, 0.65), rng.uniform(0.05, 0.45))
    b = (rng.uniform(0.05, 0.65), rng.uniform(0.05, 0.45))
    r_g = rng.uniform(0.04, 0.08)
    return a, b, others, r_g


def _scale_obj(o, s):
    return replace(o, x=o.x * s, y=o.y * s, radius=o.radius * s)


def _scale_pt(p, s):
    return (p[0] * s, p[1] * s)


def check_monotonicity(n, seed=0):
    rng = random.Random(seed)
    bad = []
    for k in range(n):
        a, b, others, r_g = random_case(rng)
        extra = SceneObject(99, rng.uniform(0, WS.width), rng.uniform(0, WS.depth), 0.03, 0.1)
        more = others + [extra]
        c = Corridor(a, b, r_g)
        if corridor_free(c, more, WS, ACCESS) and not corridor_free(c, others, WS, ACCESS):
            bad.append(k)
            continue
        h0 = build_histogram(a, others, r_g, 5.0, WS)
        h1 = build_histogram(a, more, r_g, 5.0, WS)
        if any(x and not y for x, y in zip(h0.blocked, h1.blocked)):
            bad.append(k)
            continue
        for pred in Predicate:
            if edge_free(a, b, more, r_g, WS, pred, ACCESS) and not edge_free(a, b, others, r_g, WS, pred, ACCESS):
                bad.append(k)
                break
    return bad


def check_symmetry(n, seed=1):
    rng = random.Random(seed)
    bad = []
    for k in range(n):
        a, b, others, r_g = random_case(rng)
        if corridor_free(Corridor(a, b, r_g), others, WS, ACCESS) != corridor_free(
            Corridor(b, a, r_g), others, WS, ACCESS
        ):
            bad.append(k)
            continue
        for pred in Predicate:
            if edge_free(a, b, others, r_g, WS, pred, ACCESS) != edge_free(b, a, others, r_g, WS, pred, ACCESS):
                bad.append(k)
                break
    return bad


def check_scale_invariance(n, seed=2):
    rng = random.Random(seed)
    bad = []
    for k in range(n):
        a, b, others, r_g = random_case(rng)
        base = (
            corridor_free(Corridor(a, b, r_g), others, WS, ACCESS),
            edge_free(a, b, others, r_g, WS, Predicate.VFH, ACCESS),
            build_histogram(a, others, r_g, 5.0, WS).blocked,
        )
        for s in SCALES:
            ws = Workspace(WS.width * s, WS.depth * s)
            acc = _scale_pt(ACCESS, s)
            sa, sb = _scale_pt(a, s), _scale_pt(b, s)
            so = [_scale_obj(o, s) for o in others]
            got = (
                corridor_free(Corridor(sa, sb, r_g * s), so, ws, acc),
                edge_free(sa, sb, so, r_g * s, ws, Predicate.VFH, acc),
                build_histogram(sa, so, r_g * s, 5.0, ws).blocked,
            )
            if got != base:
                bad.append(k)
                break
    return bad


def check_dense_oracle(n, seed=3):
    """Exact straight-corridor test agrees with 1 mm sampling; VFH detours are really free."""
    rng = random.Random(seed)
    bad = []
    for k in range(n):
        a, b, others, r_g = random_case(rng)
        open_bottom = a == ACCESS
        exact = corridor_free(Corridor(a, b, r_g), others, WS, ACCESS)
        if exact != polyline_clear([a, b], others, r_g, WS, open_bottom):
            bad.append(k)
            continue
        apex = vfh_detour(a, b, others, r_g, WS, ACCESS)
        if apex is not None and not polyline_clear([a, apex, b], others, r_g, WS, open_bottom):
            bad.append(k)
    return bad
