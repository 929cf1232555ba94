"""NumPy implementations of the hot kernels.

Used when the compiled ``_kernels`` extension is unavailable. Both modules
evaluate the same floating-point expressions in the same order so their
results agree bit-for-bit on non-degenerate input.
"""
import math

import numpy as np


def _seg_dist(px, py, ax, ay, bx, by):
    dx = bx - ax
    dy = by - ay
    l2 = dx * dx + dy * dy
    with np.errstate(invalid="ignore", divide="ignore"):
        t = ((px - ax) * dx + (py - ay) * dy) / l2
    t = np.where(l2 == 0.0, 0.0, t)
    t = np.clip(t, 0.0, 1.0)
    ex = px - (ax + t * dx)
    ey = py - (ay + t * dy)
    return np.sqrt(ex * ex + ey * ey)


def pair_free(xs, ys, rs, r_g):
    """free[i, j]: the corridor between centres i and j clears every k != i, j."""
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    rs = np.asarray(rs, dtype=np.float64)
    n = xs.size
    if n == 0:
        return np.zeros((0, 0), dtype=bool)
    # axes: (i, j, k)
    d = _seg_dist(
        xs[None, None, :], ys[None, None, :],
        xs[:, None, None], ys[:, None, None],
        xs[None, :, None], ys[None, :, None],
    )
    ok = d >= r_g + rs[None, None, :]
    idx = np.arange(n)
    ok |= (idx[None, None, :] == idx[:, None, None]) | (idx[None, None, :] == idx[None, :, None])
    free = ok.all(axis=2)
    np.fill_diagonal(free, False)
    return free


def star_free(ax, ay, xs, ys, rs, r_g):
    """free[o]: the corridor from (ax, ay) to centre o clears every k != o."""
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    rs = np.asarray(rs, dtype=np.float64)
    n = xs.size
    if n == 0:
        return np.zeros(0, dtype=bool)
    d = _seg_dist(xs[None, :], ys[None, :], ax, ay, xs[:, None], ys[:, None])
    ok = d >= r_g + rs[None, :]
    np.fill_diagonal(ok, True)
    return ok.all(axis=1)


def _shadow_window(cx, cy, cz, ox, oy, r, h, width, depth, res):
    k = h / (cz - h)
    sx = ox + (ox - cx) * k
    sy = oy + (oy - cy) * k
    sr = r * cz / (cz - h)
    nx = int(math.floor(width / res + 1e-9))
    ny = int(math.floor(depth / res + 1e-9))
    i0 = max(0, int(math.floor(min(ox - r, sx - sr) / res - 0.5)))
    i1 = min(nx - 1, int(math.ceil(max(ox + r, sx + sr) / res - 0.5)))
    j0 = max(0, int(math.floor(min(oy - r, sy - sr) / res - 0.5)))
    j1 = min(ny - 1, int(math.ceil(max(oy + r, sy + sr) / res - 0.5)))
    return i0, i1, j0, j1


def shadow_count(cx, cy, cz, ox, oy, r, h, width, depth, res):
    """Grid cells (centres at (i + 1/2) * res) shadowed by one cylinder.

    Cells under the footprint itself are not counted.
    """
    if h <= 0.0:
        return 0
    i0, i1, j0, j1 = _shadow_window(cx, cy, cz, ox, oy, r, h, width, depth, res)
    if i1 < i0 or j1 < j0:
        return 0
    px = (np.arange(i0, i1 + 1, dtype=np.float64) + 0.5) * res
    py = (np.arange(j0, j1 + 1, dtype=np.float64) + 0.5) * res
    px, py = np.meshgrid(px, py, indexing="ij")
    gx = px - ox
    gy = py - oy
    outside = gx * gx + gy * gy > r * r
    ux = px - cx
    uy = py - cy
    fx = cx - ox
    fy = cy - oy
    a = ux * ux + uy * uy
    b = 2.0 * (fx * ux + fy * uy)
    c = fx * fx + fy * fy - r * r
    disc = b * b - 4.0 * a * c
    with np.errstate(invalid="ignore", divide="ignore"):
        s = np.sqrt(np.where(disc >= 0.0, disc, 0.0))
        t1 = (-b - s) / (2.0 * a)
        t2 = (-b + s) / (2.0 * a)
    tz = (cz - h) / cz
    lo = np.maximum(np.maximum(t1, 0.0), tz)
    hi = np.minimum(t2, 1.0)
    hit = (disc >= 0.0) & (a > 0.0) & (lo <= hi) & outside
    return int(np.count_nonzero(hit))
