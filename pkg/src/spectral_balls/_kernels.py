"""Compiled path-stepping kernel for the exit-time simulator.

A region tree of intersections, translations, scalings and reflections is
flattened into leaves, each evaluated at ``(x - shift) / scale``; the region
level is the max over leaves and the distance bound the min.
"""
from __future__ import annotations

import numba
import numpy as np

from .geometry.bodies import Ellipsoid, PBall, SymPolytope
from .geometry.regions import Intersect, MinkowskiAverage, Scale, Translate

PBALL, PBALL_INF, ELLIPSOID, POLYTOPE = 0, 1, 2, 3


class FlatRegion:
    def __init__(self, kinds, shifts, scales, offsets, params):
        self.kinds = np.asarray(kinds, dtype=np.int64)
        self.shifts = np.asarray(shifts, dtype=np.float64)
        self.scales = np.asarray(scales, dtype=np.float64)
        self.offsets = np.asarray(offsets, dtype=np.int64)
        self.params = np.asarray(params, dtype=np.float64)


def _leaf_params(body):
    if isinstance(body, PBall):
        kind = PBALL_INF if np.isinf(body.p) else PBALL
        return kind, [body.p if kind == PBALL else 0.0, body.lipschitz, *body.axes]
    if isinstance(body, Ellipsoid):
        return ELLIPSOID, [body.lipschitz, *body.Q.ravel()]
    if isinstance(body, SymPolytope):
        A = body.normals
        return POLYTOPE, [float(len(A)), *A.ravel(), *np.linalg.norm(A, axis=1)]
    raise TypeError(f"cannot flatten {type(body).__name__}")


def flatten(region) -> FlatRegion:
    leaves = []

    def walk(node, shift, scale):
        # node is evaluated at (x - shift) / scale
        if isinstance(node, Intersect):
            for c in node.children:
                walk(c, shift, scale)
        elif isinstance(node, Translate):
            walk(node.child, shift + scale * node.v, scale)
        elif isinstance(node, Scale):
            walk(node.child, shift, scale * node.c)
        elif isinstance(node, MinkowskiAverage):
            walk(node.polytope, shift, scale)
        elif hasattr(node, "reflected_region"):
            walk(node.reflected_region, -shift, -scale)
        else:
            leaves.append((node, shift, scale))

    walk(region, np.zeros(region.dim), 1.0)
    kinds, shifts, scales, offsets, params = [], [], [], [0], []
    for body, shift, scale in leaves:
        k, p = _leaf_params(body)
        kinds.append(k)
        shifts.append(shift)
        scales.append(scale)
        params.extend(p)
        offsets.append(len(params))
    return FlatRegion(kinds, shifts, scales, offsets, params)


@numba.njit(cache=True)
def _eval_points(xs, kinds, shifts, scales, offsets, params, lev, dist):
    """Level and boundary-distance bound of each row of ``xs``."""
    n, dim = xs.shape
    y = np.empty(dim)
    for pt in range(n):
        level = -np.inf
        dmin = np.inf
        for leaf in range(kinds.shape[0]):
            s = scales[leaf]
            for i in range(dim):
                y[i] = (xs[pt, i] - shifts[leaf, i]) / s
            o = offsets[leaf]
            kind = kinds[leaf]
            if kind == 0:
                p = params[o]
                acc = 0.0
                if p == 2.0:
                    for i in range(dim):
                        v = y[i] / params[o + 2 + i]
                        acc += v * v
                    g = np.sqrt(acc)
                else:
                    for i in range(dim):
                        acc += abs(y[i] / params[o + 2 + i]) ** p
                    g = acc ** (1.0 / p)
                d = (1.0 - g) / params[o + 1]
            elif kind == 1:
                g = 0.0
                for i in range(dim):
                    v = abs(y[i] / params[o + 2 + i])
                    if v > g:
                        g = v
                d = (1.0 - g) / params[o + 1]
            elif kind == 2:
                acc = 0.0
                for i in range(dim):
                    for j in range(dim):
                        acc += y[i] * params[o + 1 + i * dim + j] * y[j]
                g = np.sqrt(max(acc, 0.0))
                d = (1.0 - g) / params[o]
            else:
                m = int(params[o])
                g = 0.0
                d = np.inf
                base = o + 1
                nrm = base + m * dim
                for r in range(m):
                    acc = 0.0
                    for i in range(dim):
                        acc += params[base + r * dim + i] * y[i]
                    acc = abs(acc)
                    if acc > g:
                        g = acc
                    dr = (1.0 - acc) / params[nrm + r]
                    if dr < d:
                        d = dr
            d *= abs(s)
            if g > level:
                level = g
            if d < dmin:
                dmin = d
        lev[pt] = level
        dist[pt] = dmin


@numba.njit(cache=True)
def advance_block(pos, dist, inc, kinds, shifts, scales, offsets, params, dt, bridge, p_kill):
    """Step every path through the block of increments ``inc`` (k, m, dim).

    Returns the first step (0-based within the block) where each path is
    outside the region, or ``k`` if it stays inside. ``pos`` and ``dist``
    are overwritten with the state after the last step; ``p_kill[j, i]``
    receives the bridge-crossing probability of step ``j`` for path ``i``.
    """
    k, m, dim = inc.shape
    hard = np.full(m, k, dtype=np.int64)
    lev = np.empty(m)
    d_new = np.empty(m)
    for j in range(k):
        for i in range(m):
            for c in range(dim):
                pos[i, c] += inc[j, i, c]
        _eval_points(pos, kinds, shifts, scales, offsets, params, lev, d_new)
        for i in range(m):
            if hard[i] < k:
                continue
            if lev[i] > 1.0:
                hard[i] = j
                continue
            if bridge and dist[i] > 0.0 and d_new[i] > 0.0:
                e = 2.0 * dist[i] * d_new[i] / dt
                if e < 745.0:
                    p_kill[j, i] = np.exp(-e)
            dist[i] = d_new[i]
    return hard


def level_and_distance(flat: FlatRegion, x):
    x = np.ascontiguousarray(np.atleast_2d(np.asarray(x, dtype=np.float64)))
    lev = np.empty(len(x))
    dist = np.empty(len(x))
    _eval_points(x, flat.kinds, flat.shifts, flat.scales, flat.offsets, flat.params, lev, dist)
    return lev, dist
