"""Origin-centred, centrally symmetric convex bodies.

Every body exposes its gauge (Minkowski functional) and support function,
both vectorised over the last axis of the argument.
"""
from __future__ import annotations

import numpy as np
from scipy.spatial import HalfspaceIntersection

from ..errors import BodyError


def _as_points(x, dim):
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != dim:
        raise BodyError(f"expected points of dimension {dim}, got shape {x.shape}")
    return x


class Body:
    """Common interface of the primitive bodies.

    Subclasses implement ``gauge``, ``support``, ``half_widths`` and
    ``lipschitz`` (the largest gauge value on the Euclidean unit sphere, i.e.
    the reciprocal inradius).
    """

    dim: int

    def gauge(self, x):
        raise NotImplementedError

    def support(self, u):
        raise NotImplementedError

    @property
    def half_widths(self) -> np.ndarray:
        raise NotImplementedError

    @property
    def lipschitz(self) -> float:
        raise NotImplementedError

    # Region protocol -----------------------------------------------------
    has_translate = False

    def level(self, x):
        return self.gauge(x)

    def level_and_distance(self, x):
        g = self.gauge(x)
        return g, (1.0 - g) / self.lipschitz

    def bbox(self):
        hw = self.half_widths
        return -hw, hw.copy()

    def contains_origin_interior(self) -> bool:
        return True


class PBall(Body):
    """``{x : (sum |x_i / a_i|^p)^(1/p) <= 1}`` for ``p`` in ``[1, inf]``."""

    def __init__(self, p, axes):
        p = float(p)
        axes = np.asarray(axes, dtype=float)
        if not p >= 1.0:
            raise BodyError(f"exponent must lie in [1, inf], got {p}")
        if axes.ndim != 1 or axes.size == 0 or not np.all(np.isfinite(axes)) or np.any(axes <= 0):
            raise BodyError(f"semi-axes must be positive and finite, got {axes}")
        self.p = p
        self.axes = axes
        self.dim = axes.size

    @property
    def dual_exponent(self) -> float:
        if self.p == 1.0:
            return np.inf
        if np.isinf(self.p):
            return 1.0
        return self.p / (self.p - 1.0)

    def gauge(self, x):
        x = _as_points(x, self.dim)
        return np.linalg.norm(x / self.axes, ord=self.p, axis=-1) if x.ndim > 1 else \
            float(np.linalg.norm(x / self.axes, ord=self.p))

    def support(self, u):
        u = _as_points(u, self.dim)
        q = self.dual_exponent
        if u.ndim > 1:
            return np.linalg.norm(u * self.axes, ord=q, axis=-1)
        return float(np.linalg.norm(u * self.axes, ord=q))

    @property
    def half_widths(self):
        return self.axes.copy()

    @property
    def lipschitz(self):
        # max of ||u / a||_p over |u| = 1; Hoelder gives a closed form for p < 2
        b = 1.0 / self.axes
        if self.p >= 2.0:
            return float(b.max())
        s = 2.0 * self.p / (2.0 - self.p)
        return float(np.linalg.norm(b, ord=s))

    def __repr__(self):
        return f"PBall(p={self.p}, axes={self.axes.tolist()})"


class Ellipsoid(Body):
    """``{x : x^T Q x <= 1}`` with ``Q`` symmetric positive definite."""

    def __init__(self, Q):
        Q = np.atleast_2d(np.asarray(Q, dtype=float))
        if Q.ndim != 2 or Q.shape[0] != Q.shape[1]:
            raise BodyError("Q must be a square matrix")
        if not np.allclose(Q, Q.T, rtol=1e-12, atol=1e-14):
            raise BodyError("Q must be symmetric")
        w = np.linalg.eigvalsh(Q)
        if not np.all(np.isfinite(w)) or w.min() <= 0:
            raise BodyError("Q must be positive definite")
        self.Q = 0.5 * (Q + Q.T)
        self.Q_inv = np.linalg.inv(self.Q)
        self.dim = Q.shape[0]
        self._eig = w

    def gauge(self, x):
        x = _as_points(x, self.dim)
        q = np.einsum("...i,ij,...j->...", x, self.Q, x)
        return np.sqrt(np.maximum(q, 0.0)) if x.ndim > 1 else float(np.sqrt(max(q, 0.0)))

    def support(self, u):
        u = _as_points(u, self.dim)
        q = np.einsum("...i,ij,...j->...", u, self.Q_inv, u)
        return np.sqrt(np.maximum(q, 0.0)) if u.ndim > 1 else float(np.sqrt(max(q, 0.0)))

    @property
    def half_widths(self):
        return np.sqrt(np.diag(self.Q_inv))

    @property
    def lipschitz(self):
        return float(np.sqrt(self._eig.max()))

    def __repr__(self):
        return f"Ellipsoid(Q={self.Q.tolist()})"


class SymPolytope(Body):
    """``{x : |<a_i, x>| <= 1 for all i}``; the normals must span the space."""

    def __init__(self, normals):
        A = np.atleast_2d(np.asarray(normals, dtype=float))
        if A.ndim != 2 or A.shape[0] == 0:
            raise BodyError("normals must be a non-empty list of vectors")
        if not np.all(np.isfinite(A)):
            raise BodyError("normals must be finite")
        if np.linalg.matrix_rank(A) < A.shape[1]:
            raise BodyError("normals do not span the ambient space; body is unbounded")
        self.normals = A
        self.dim = A.shape[1]
        self._norms = np.linalg.norm(A, axis=1)
        if np.any(self._norms == 0):
            raise BodyError("zero normal vector")
        self.vertices = self._compute_vertices()

    def _compute_vertices(self):
        A = self.normals
        if self.dim == 1:
            r = 1.0 / np.abs(A[:, 0]).max()
            return np.array([[-r], [r]])
        halfspaces = np.vstack([np.hstack([A, -np.ones((len(A), 1))]),
                                np.hstack([-A, -np.ones((len(A), 1))])])
        hs = HalfspaceIntersection(halfspaces, np.zeros(self.dim))
        return hs.intersections

    def gauge(self, x):
        x = _as_points(x, self.dim)
        return np.abs(x @ self.normals.T).max(axis=-1)

    def support(self, u):
        u = _as_points(u, self.dim)
        return (u @ self.vertices.T).max(axis=-1)

    def level_and_distance(self, x):
        x = _as_points(x, self.dim)
        s = np.abs(x @ self.normals.T)
        return s.max(axis=-1), ((1.0 - s) / self._norms).min(axis=-1)

    @property
    def half_widths(self):
        return np.abs(self.vertices).max(axis=0)

    @property
    def lipschitz(self):
        return float(self._norms.max())

    def __repr__(self):
        return f"SymPolytope(normals={self.normals.tolist()})"


def unit_disk(radius=1.0, dim=2):
    return PBall(2, [radius] * dim)


def cube(half_width=1.0, dim=2):
    return PBall(np.inf, [half_width] * dim)


def cross_polytope(radius=1.0, dim=2):
    """The l1 ball ``{|x_1| + ... + |x_n| <= radius}``."""
    return PBall(1, [radius] * dim)


def box_polytope(half_widths):
    hw = np.asarray(half_widths, dtype=float)
    return SymPolytope(np.diag(1.0 / hw))
