"""Finite-difference oracle for the principal Dirichlet eigenvalue of
``-1/2 Δ`` on a region.

The region is sampled on the origin-aligned grid ``h * Z^n``. Grid points
strictly inside the region form the unknowns. Each missing neighbour is an
exterior point where the eigenfunction is pinned to zero; by default the
zero is placed at the true boundary crossing through a linear ghost value
(a symmetric ghost-point closure), which keeps the operator symmetric
positive definite and second-order accurate. ``boundary="staircase"``
places the zero at the exterior grid point instead.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ._workers import worker_count
from .errors import EmptyMask, IllConditionedFit, NoConvergence
from .geometry.regions import INTERIOR_TOL

THETA_MIN = 1e-6
_BISECTIONS = 53


@dataclass
class GridMask:
    h: float
    bbox: tuple
    index: np.ndarray  # (N, dim) integer grid coordinates, lexicographic
    dim: int

    @property
    def points(self) -> np.ndarray:
        return self.index * self.h

    def __len__(self):
        return len(self.index)


@dataclass
class EigEstimate:
    value: float
    method: str
    error_indicator: float
    resolution: dict = field(default_factory=dict)
    vector: Optional[np.ndarray] = None

    def to_dict(self):
        return {"value": self.value, "method": self.method,
                "error_indicator": self.error_indicator, "resolution": dict(self.resolution)}


def _inside(region, x):
    return np.asarray(region.level(x)) < 1.0 - INTERIOR_TOL


def build_mask(region, h: float) -> GridMask:
    h = float(h)
    if not h > 0:
        raise ValueError("grid spacing must be positive")
    lo, hi = region.bbox()
    lo, hi = np.asarray(lo, dtype=float), np.asarray(hi, dtype=float)
    if np.any(hi <= lo) or h >= 0.5 * float(np.min(hi - lo)):
        raise EmptyMask(f"spacing {h} too large for bounding box {lo.tolist()}..{hi.tolist()}")
    k_lo = np.floor(lo / h).astype(int) - 1
    k_hi = np.ceil(hi / h).astype(int) + 1
    axes = [np.arange(a, b + 1) for a, b in zip(k_lo, k_hi)]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, len(axes))
    keep = _inside(region, grid * h)
    if not keep.any():
        raise EmptyMask(f"no grid point strictly inside the region at h={h}")
    return GridMask(h=h, bbox=(lo, hi), index=grid[keep], dim=len(axes))


class StencilOperator:
    """Matrix-free ``-1/2`` times the (2n+1)-point Laplacian on a mask."""

    def __init__(self, region, mask: GridMask, boundary: str = "ghost"):
        if boundary not in ("ghost", "staircase"):
            raise ValueError(f"unknown boundary closure {boundary!r}")
        self.mask = mask
        idx = mask.index
        n, dim = idx.shape
        lo = idx.min(axis=0) - 1
        shape = tuple(idx.max(axis=0) - lo + 2)
        lookup = -np.ones(shape, dtype=np.int64)
        lookup[tuple((idx - lo).T)] = np.arange(n)

        nbr = np.empty((n, 2 * dim), dtype=np.int64)
        diag = np.zeros(n)
        for axis in range(dim):
            for j, step in enumerate((1, -1)):
                off = np.zeros(dim, dtype=int)
                off[axis] = step
                col = lookup[tuple((idx + off - lo).T)]
                nbr[:, 2 * axis + j] = col
                out = col < 0
                if boundary == "staircase":
                    diag += 1.0
                else:
                    diag[~out] += 1.0
                    if out.any():
                        theta = self._crossing(region, idx[out] * mask.h, off * mask.h)
                        diag[out] += 1.0 / theta
        self.coef = 0.5 / (mask.h * mask.h)
        self.diag = diag * self.coef
        # missing neighbours point at a trailing zero slot
        self.nbr = np.where(nbr < 0, n, nbr)
        self.n = n
        self.workers = worker_count()

    @staticmethod
    def _crossing(region, x, step):
        """Fraction ``theta`` of the step from ``x`` at which the region is left."""
        lo = np.zeros(len(x))
        hi = np.ones(len(x))
        for _ in range(_BISECTIONS):
            mid = 0.5 * (lo + hi)
            ins = _inside(region, x + mid[:, None] * step)
            lo = np.where(ins, mid, lo)
            hi = np.where(ins, hi, mid)
        return np.maximum(0.5 * (lo + hi), THETA_MIN)

    def _apply(self, xp, out, sl):
        out[sl] = self.diag[sl] * xp[:-1][sl] - self.coef * xp[self.nbr[sl]].sum(axis=1)

    def matvec(self, x):
        xp = np.append(x, 0.0)
        out = np.empty(self.n)
        if self.workers > 1 and self.n > 50_000:
            bounds = np.linspace(0, self.n, self.workers + 1).astype(int)
            with ThreadPoolExecutor(self.workers) as pool:
                list(pool.map(lambda ab: self._apply(xp, out, slice(*ab)), zip(bounds[:-1], bounds[1:])))
        else:
            self._apply(xp, out, slice(None))
        return out

    __matmul__ = matvec


def _dot(a, b):
    # np.sum uses pairwise summation: fixed reduction order
    return float(np.sum(a * b))


def conjugate_gradient(op, b, x0=None, rtol=1e-10, maxiter=None):
    """Jacobi-preconditioned CG for the SPD stencil operator."""
    n = len(b)
    maxiter = 20 * n + 100 if maxiter is None else maxiter
    x = np.zeros(n) if x0 is None else x0.copy()
    r = b - op.matvec(x)
    minv = 1.0 / op.diag
    z = minv * r
    p = z.copy()
    rz = _dot(r, z)
    bnorm = math.sqrt(_dot(b, b))
    if bnorm == 0.0:
        return np.zeros(n), 0
    for it in range(1, maxiter + 1):
        if math.sqrt(_dot(r, r)) <= rtol * bnorm:
            return x, it - 1
        Ap = op.matvec(p)
        alpha = rz / _dot(p, Ap)
        x += alpha * p
        r -= alpha * Ap
        z = minv * r
        rz_new = _dot(r, z)
        p = z + (rz_new / rz) * p
        rz = rz_new
    if math.sqrt(_dot(r, r)) <= rtol * bnorm:
        return x, maxiter
    raise NoConvergence(f"CG did not reach rtol={rtol} in {maxiter} iterations")


def principal_eigenvalue_fd(region, h: float, tol: float = 1e-8, boundary: str = "ghost",
                            max_iter: int = 500, cg_rtol: float = 1e-10) -> EigEstimate:
    """Smallest eigenvalue of the discrete ``-1/2 Δ`` by inverse power iteration.

    Returns the Rayleigh quotient of the final iterate; the eigenvector is
    normalised, made positive, and attached to the estimate.
    """
    mask = build_mask(region, h)
    op = StencilOperator(region, mask, boundary)
    v = np.full(op.n, 1.0 / math.sqrt(op.n))
    lam = _dot(v, op.matvec(v))
    cg_total = 0
    converged = False
    for it in range(1, max_iter + 1):
        w, k = conjugate_gradient(op, v, x0=v / lam, rtol=cg_rtol)
        cg_total += k
        v = w / math.sqrt(_dot(w, w))
        lam_new = _dot(v, op.matvec(v))
        change = abs(lam_new - lam)
        lam = lam_new
        if change < tol * lam:
            if _dot(v, np.ones_like(v)) < 0:
                v = -v
            if v.min() >= -1e-8 * v.max():
                converged = True
                break
    if not converged:
        raise NoConvergence(f"inverse iteration did not converge in {max_iter} steps")
    v = np.maximum(v, 0.0)
    return EigEstimate(
        value=float(lam), method="FD", error_indicator=0.0,
        resolution={"h": h, "points": op.n, "outer_iterations": it, "cg_iterations": cg_total,
                    "boundary": boundary, "tol": tol},
        vector=v,
    )


def default_h0(region, fraction: float = 1.0 / 16.0) -> float:
    lo, hi = region.bbox()
    return float(fraction * np.min(np.asarray(hi) - np.asarray(lo)))


def richardson(values, spacings):
    """Extrapolate ``λ(h) = λ* + C h^p`` through the finest three values.

    ``values`` are ordered coarse to fine with spacings halving. Returns
    ``(λ*, p, residual)`` where ``residual`` measures how well the fitted
    model reproduces any coarser levels.
    """
    l0, l1, l2 = values[-3:]
    d1, d2 = l0 - l1, l1 - l2
    if d1 == 0.0 and d2 == 0.0:
        return l2, math.inf, 0.0
    if d1 == 0.0 or d2 / d1 <= 0.0 or abs(d2) >= abs(d1):
        raise IllConditionedFit(f"successive differences {d1:.3e}, {d2:.3e} do not contract")
    r = d1 / d2
    p = math.log(r) / math.log(spacings[-2] / spacings[-1])
    c_term = d2 / (r - 1.0)  # C h_min^p
    lam_star = l2 - c_term
    residual = 0.0
    for k, (lv, hv) in enumerate(zip(values[:-3], spacings[:-3])):
        predicted = lam_star + c_term * (hv / spacings[-1]) ** p
        residual = max(residual, abs(predicted - lv))
    return lam_star, p, residual


def extrapolated_eigenvalue(region, h0: Optional[float] = None, levels: int = 3, tol: float = 1e-8,
                            boundary: str = "ghost") -> EigEstimate:
    if levels < 3:
        raise ValueError("extrapolation needs at least three levels")
    h0 = default_h0(region) if h0 is None else float(h0)
    spacings = [h0 / 2 ** i for i in range(levels)]
    ests = [principal_eigenvalue_fd(region, h, tol=tol, boundary=boundary) for h in spacings]
    values = [e.value for e in ests]
    lam_star, p, residual = richardson(values, spacings)
    return EigEstimate(
        value=float(lam_star), method="FD", error_indicator=float(abs(values[-1] - lam_star) + residual),
        resolution={"h0": h0, "levels": levels, "spacings": spacings, "values": values,
                    "order": p, "boundary": boundary, "tol": tol},
        vector=ests[-1].vector,
    )
