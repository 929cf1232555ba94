# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled versions of the kernels in ``_fallback``.

Expression order mirrors the NumPy code so both paths round identically.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, floor, ceil

cnp.import_array()


cdef inline double _seg_dist(double px, double py, double ax, double ay,
                             double bx, double by) nogil:
    cdef double dx = bx - ax
    cdef double dy = by - ay
    cdef double l2 = dx * dx + dy * dy
    cdef double t = 0.0
    if l2 != 0.0:
        t = ((px - ax) * dx + (py - ay) * dy) / l2
        if t < 0.0:
            t = 0.0
        elif t > 1.0:
            t = 1.0
    cdef double ex = px - (ax + t * dx)
    cdef double ey = py - (ay + t * dy)
    return sqrt(ex * ex + ey * ey)


def pair_free(xs, ys, rs, double r_g):
    cdef double[::1] x = np.ascontiguousarray(xs, dtype=np.float64)
    cdef double[::1] y = np.ascontiguousarray(ys, dtype=np.float64)
    cdef double[::1] r = np.ascontiguousarray(rs, dtype=np.float64)
    cdef Py_ssize_t n = x.shape[0]
    out = np.zeros((n, n), dtype=bool)
    cdef cnp.npy_bool[:, ::1] free = out
    cdef Py_ssize_t i, j, k
    cdef bint ok
    with nogil:
        for i in range(n):
            for j in range(i + 1, n):
                ok = True
                for k in range(n):
                    if k == i or k == j:
                        continue
                    if not (_seg_dist(x[k], y[k], x[i], y[i], x[j], y[j]) >= r_g + r[k]):
                        ok = False
                        break
                free[i, j] = ok
                free[j, i] = ok
    return out


def star_free(double ax, double ay, xs, ys, rs, double r_g):
    cdef double[::1] x = np.ascontiguousarray(xs, dtype=np.float64)
    cdef double[::1] y = np.ascontiguousarray(ys, dtype=np.float64)
    cdef double[::1] r = np.ascontiguousarray(rs, dtype=np.float64)
    cdef Py_ssize_t n = x.shape[0]
    out = np.zeros(n, dtype=bool)
    cdef cnp.npy_bool[::1] free = out
    cdef Py_ssize_t o, k
    cdef bint ok
    with nogil:
        for o in range(n):
            ok = True
            for k in range(n):
                if k == o:
                    continue
                if not (_seg_dist(x[k], y[k], ax, ay, x[o], y[o]) >= r_g + r[k]):
                    ok = False
                    break
            free[o] = ok
    return out


def shadow_count(double cx, double cy, double cz, double ox, double oy,
                 double r, double h, double width, double depth, double res):
    if h <= 0.0:
        return 0
    cdef double kk = h / (cz - h)
    cdef double sx = ox + (ox - cx) * kk
    cdef double sy = oy + (oy - cy) * kk
    cdef double sr = r * cz / (cz - h)
    cdef long nx = <long>floor(width / res + 1e-9)
    cdef long ny = <long>floor(depth / res + 1e-9)
    cdef long i0 = max(0, <long>floor(min(ox - r, sx - sr) / res - 0.5))
    cdef long i1 = min(nx - 1, <long>ceil(max(ox + r, sx + sr) / res - 0.5))
    cdef long j0 = max(0, <long>floor(min(oy - r, sy - sr) / res - 0.5))
    cdef long j1 = min(ny - 1, <long>ceil(max(oy + r, sy + sr) / res - 0.5))
    cdef double fx = cx - ox
    cdef double fy = cy - oy
    cdef double c = fx * fx + fy * fy - r * r
    cdef double tz = (cz - h) / cz
    cdef double px, py, gx, gy, ux, uy, a, b, disc, s, t1, t2, lo, hi
    cdef long i, j
    cdef long count = 0
    with nogil:
        for i in range(i0, i1 + 1):
            px = (<double>i + 0.5) * res
            for j in range(j0, j1 + 1):
                py = (<double>j + 0.5) * res
                gx = px - ox
                gy = py - oy
                if not (gx * gx + gy * gy > r * r):
                    continue
                ux = px - cx
                uy = py - cy
                a = ux * ux + uy * uy
                if not (a > 0.0):
                    continue
                b = 2.0 * (fx * ux + fy * uy)
                disc = b * b - 4.0 * a * c
                if not (disc >= 0.0):
                    continue
                s = sqrt(disc)
                t1 = (-b - s) / (2.0 * a)
                t2 = (-b + s) / (2.0 * a)
                lo = t1
                if lo < 0.0:
                    lo = 0.0
                if lo < tz:
                    lo = tz
                hi = t2
                if hi > 1.0:
                    hi = 1.0
                if lo <= hi:
                    count += 1
    return count
