"""Compare the compiled kernels with the NumPy fallback.

    python3 benchmarks/bench_kernels.py [--repeat N]

Prints one line per kernel and problem size with the best time of each
backend and the speed-up. Both backends are also checked to agree.
"""
import argparse
import timeit

import numpy as np

from declutter import _fallback
from declutter.scene import generate_instance

try:
    from declutter import _kernels
except ImportError:  # extension not built
    _kernels = None


def _scene_arrays(n, seed=0):
    s = generate_instance(seed, n, min_gap=0.0)
    objs = s.objects
    return s, [o.x for o in objs], [o.y for o in objs], [o.radius for o in objs]


def cases():
    for n in (10, 20, 40):
        s, xs, ys, rs = _scene_arrays(n)
        r_g = max(rs) + s.robot.r_r + s.robot.r_s
        yield f"pair_free n={n}", "pair_free", (xs, ys, rs, r_g)
        yield f"star_free n={n}", "star_free", (*s.robot.access_point, xs, ys, rs, r_g)
    s, xs, ys, rs = _scene_arrays(10)
    cam = s.camera
    o = max(s.objects, key=lambda o: o.height)
    for res in (0.005, 0.0025):
        args = (cam.x, cam.y, cam.z, o.x, o.y, o.radius, o.height, s.workspace.width, s.workspace.depth, res)
        yield f"shadow_count res={res}", "shadow_count", args


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if _kernels is None:
        print("compiled extension not available; nothing to compare")
        return
    print(f"{'kernel':<26}{'cython (us)':>14}{'numpy (us)':>14}{'speed-up':>10}")
    for label, name, fargs in cases():
        fast = getattr(_kernels, name)
        slow = getattr(_fallback, name)
        assert np.array_equal(np.asarray(fast(*fargs)), np.asarray(slow(*fargs))), label
        number = 200
        t_fast = min(timeit.repeat(lambda: fast(*fargs), number=number, repeat=args.repeat)) / number
        t_slow = min(timeit.repeat(lambda: slow(*fargs), number=number, repeat=args.repeat)) / number
        print(f"{label:<26}{t_fast * 1e6:>14.1f}{t_slow * 1e6:>14.1f}{t_slow / t_fast:>9.1f}x")


if __name__ == "__main__":
    main()
