"""Composition trees over bodies: translation, scaling, intersection and
sampled-support Minkowski averages.

Each node evaluates a *level function* ``f`` with ``{f <= 1}`` equal to the
realised set. For trees without translations ``f`` is the gauge of the
region; with translations it is still a valid membership oracle but is not
positively homogeneous, so :func:`region_gauge` refuses it.
"""
from __future__ import annotations

from typing import Union

import numpy as np

from ..errors import DomainError, GaugeUndefined
from ..verdict import Status, Verdict
from .bodies import Body, SymPolytope

INTERIOR_TOL = 1e-12
BOUNDARY_TOL = 1e-9


class Translate:
    def __init__(self, child, v):
        self.child = child
        self.v = np.asarray(v, dtype=float)
        self.dim = child.dim
        if self.v.shape != (self.dim,):
            raise DomainError(f"translation of shape {self.v.shape} for a {self.dim}-d region")
        self.has_translate = True

    def level(self, x):
        return self.child.level(np.asarray(x, dtype=float) - self.v)

    def level_and_distance(self, x):
        return self.child.level_and_distance(np.asarray(x, dtype=float) - self.v)

    def bbox(self):
        lo, hi = self.child.bbox()
        return lo + self.v, hi + self.v

    def __repr__(self):
        return f"Translate({self.v.tolist()}, {self.child!r})"


class Scale:
    def __init__(self, c, child):
        c = float(c)
        if not (c > 0 and np.isfinite(c)):
            raise DomainError(f"scale factor must be positive, got {c}")
        self.c = c
        self.child = child
        self.dim = child.dim
        self.has_translate = child.has_translate

    def level(self, x):
        return self.child.level(np.asarray(x, dtype=float) / self.c)

    def level_and_distance(self, x):
        f, d = self.child.level_and_distance(np.asarray(x, dtype=float) / self.c)
        return f, self.c * d

    def bbox(self):
        lo, hi = self.child.bbox()
        return self.c * lo, self.c * hi

    def __repr__(self):
        return f"Scale({self.c}, {self.child!r})"


class Intersect:
    def __init__(self, *children):
        if len(children) == 1 and isinstance(children[0], (list, tuple)):
            children = tuple(children[0])
        if not children:
            raise DomainError("intersection of no regions")
        dims = {c.dim for c in children}
        if len(dims) != 1:
            raise DomainError(f"mixed dimensions in intersection: {sorted(dims)}")
        self.children = tuple(children)
        self.dim = dims.pop()
        self.has_translate = any(c.has_translate for c in children)

    def level(self, x):
        out = self.children[0].level(x)
        for c in self.children[1:]:
            out = np.maximum(out, c.level(x))
        return out

    def level_and_distance(self, x):
        f, d = self.children[0].level_and_distance(x)
        for c in self.children[1:]:
            f2, d2 = c.level_and_distance(x)
            f, d = np.maximum(f, f2), np.minimum(d, d2)
        return f, d

    def bbox(self):
        boxes = [c.bbox() for c in self.children]
        lo = np.max([b[0] for b in boxes], axis=0)
        hi = np.min([b[1] for b in boxes], axis=0)
        return lo, hi

    def __repr__(self):
        return f"Intersect({', '.join(repr(c) for c in self.children)})"


def sphere_directions(dim, count, seed=None):
    """Quasi-uniform unit vectors: equispaced angles in 2-d, a Fibonacci
    lattice in 3-d. A seed applies a random rotation (2-d: random phase)."""
    if dim == 1:
        u = np.where(np.arange(count) % 2 == 0, 1.0, -1.0)[:, None]
        return u
    if dim == 2:
        phase = 0.0 if seed is None else np.random.default_rng(seed).uniform()
        theta = 2.0 * np.pi * (np.arange(count) + phase) / count
        return np.column_stack([np.cos(theta), np.sin(theta)])
    if dim == 3:
        i = np.arange(count) + 0.5
        z = 1.0 - 2.0 * i / count
        r = np.sqrt(1.0 - z * z)
        phi = np.pi * (3.0 - np.sqrt(5.0)) * i
        u = np.column_stack([r * np.cos(phi), r * np.sin(phi), z])
        if seed is not None:
            from scipy.spatial.transform import Rotation
            u = Rotation.random(random_state=seed).apply(u)
        return u
    raise DomainError(f"dimension {dim} is not supported")


class MinkowskiAverage:
    """Outer polytope approximation of ``(1 - lam) * left + lam * right``.

    The realised body is ``{x : <x, u_k> <= (1-lam) h_left(u_k) + lam h_right(u_k)}``
    over ``direction_count`` quasi-uniform directions ``u_k``.
    """

    def __init__(self, left, right, lam=0.5, direction_count=720):
        if not isinstance(left, Body) or not isinstance(right, Body):
            raise DomainError("Minkowski averages are only defined between origin-centred bodies")
        if left.dim != right.dim:
            raise DomainError("bodies of different dimension")
        lam = float(lam)
        if not 0.0 <= lam <= 1.0:
            raise DomainError(f"interpolation weight must lie in [0, 1], got {lam}")
        direction_count = int(direction_count)
        if direction_count < 16:
            raise DomainError("direction_count must be at least 16")
        self.left, self.right, self.lam = left, right, lam
        self.direction_count = direction_count
        self.dim = left.dim
        self.has_translate = False

        u = sphere_directions(self.dim, direction_count)
        if self.dim == 2 and direction_count % 2 == 0:
            u = u[: direction_count // 2]  # antipodes give the same symmetric slab
        elif self.dim == 1:
            u = u[:1]
        self.directions = u
        self.offsets = (1.0 - lam) * left.support(u) + lam * right.support(u)
        self.polytope = SymPolytope(u / self.offsets[:, None])

    def gauge(self, x):
        return self.polytope.gauge(x)

    def support(self, u):
        return self.polytope.support(u)

    def level(self, x):
        return self.polytope.level(x)

    def level_and_distance(self, x):
        return self.polytope.level_and_distance(x)

    def bbox(self):
        return self.polytope.bbox()

    def __repr__(self):
        return (f"MinkowskiAverage({self.left!r}, {self.right!r}, lam={self.lam}, "
                f"direction_count={self.direction_count})")


Region = Union[Body, Translate, Scale, Intersect, MinkowskiAverage]


def minkowski_average(A: Body, B: Body, lam: float = 0.5, direction_count: int = 720) -> MinkowskiAverage:
    return MinkowskiAverage(A, B, lam, direction_count)


def region_gauge(region: Region, x):
    """Gauge of an origin-star-shaped region; Intersect takes the max of the
    child gauges and ``Scale(c)`` divides by ``c``."""
    if region.has_translate:
        raise GaugeUndefined("region contains a translation and has no gauge about the origin")
    return region.level(x)


def membership(region: Region, x):
    return region.level(x) <= 1.0


def interior(region: Region, x):
    """Strict interior test used for grid masks: level below ``1 - 1e-12``."""
    return region.level(x) < 1.0 - INTERIOR_TOL


def bounding_box(region: Region):
    return region.bbox()


def boundary_sample(region: Region, k: int, seed: int = 0) -> np.ndarray:
    """``k`` boundary points ``u / gauge(u)`` over quasi-uniform directions."""
    if k < 1:
        raise DomainError("k must be at least 1")
    if region.has_translate:
        raise GaugeUndefined("cannot boundary-sample a region without a gauge")
    u = sphere_directions(region.dim, k, seed)
    g = region_gauge(region, u)
    return u / np.asarray(g)[:, None]


def inclusion_check(A, B: Region, sample_count: int = 4096, seed: int = 0) -> Verdict:
    """Try to refute ``A ⊂ B`` by sampling.

    ``A`` is either a gauge-defined region (its boundary is sampled, plus the
    half-scaled copies and the origin) or an explicit ``(m, n)`` point cloud.
    A verdict of ``NoViolationFound`` only certifies the sampled points.
    """
    if isinstance(A, np.ndarray):
        pts = np.atleast_2d(A)
        source = "point_cloud"
    else:
        bd = boundary_sample(A, sample_count, seed)
        pts = np.vstack([bd, 0.5 * bd, np.zeros((1, A.dim))])
        source = "boundary_sample"
    lv = np.asarray(B.level(pts))
    worst = int(np.argmax(lv))
    margin = 1.0 - float(lv[worst])
    prov = {"method": "inclusion_check", "source": source, "resolution": int(sample_count), "seed": int(seed)}
    if lv[worst] > 1.0 + BOUNDARY_TOL:
        return Verdict(Status.VIOLATED, margin, BOUNDARY_TOL, kind="inclusion",
                       witness=tuple(float(v) for v in pts[worst]), provenance=prov)
    return Verdict(Status.NO_VIOLATION_FOUND, margin, BOUNDARY_TOL, kind="inclusion", provenance=prov)


def replay_witness(B: Region, witness) -> bool:
    """True when ``witness`` still lies outside ``B`` beyond the boundary tolerance."""
    return bool(B.level(np.asarray(witness, dtype=float)) > 1.0 + BOUNDARY_TOL)
