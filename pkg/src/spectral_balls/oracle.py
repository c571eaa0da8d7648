"""Cached eigenvalue oracles used by the verifier."""
from __future__ import annotations

import threading
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .errors import EmptyIntersection, EmptyMask, IllConditionedFit
from .geometry.serialization import region_key
from .spectral import EigEstimate, default_h0, extrapolated_eigenvalue, principal_eigenvalue_fd
from .stochastic import Z_99, kac_rate, simulate_survival


@dataclass(frozen=True)
class FDSettings:
    """Resolution of the finite-difference oracle.

    ``h0`` is an absolute coarsest spacing; when ``None`` it is
    ``h0_fraction`` times the shortest side of the region's bounding box.
    """

    h0: Optional[float] = None
    h0_fraction: float = 1.0 / 16.0
    levels: int = 3
    tol: float = 1e-8
    boundary: str = "ghost"

    def h0_for(self, region) -> float:
        return float(self.h0) if self.h0 is not None else default_h0(region, self.h0_fraction)

    def refined(self) -> "FDSettings":
        if self.h0 is not None:
            return replace(self, h0=self.h0 / 2.0)
        return replace(self, h0_fraction=self.h0_fraction / 2.0)

    def to_dict(self):
        return {"h0": self.h0, "h0_fraction": self.h0_fraction, "levels": self.levels,
                "tol": self.tol, "boundary": self.boundary}


@dataclass(frozen=True)
class MCSettings:
    dt: float = 1e-4
    n_paths: int = 20_000
    seed: int = 0
    bridge: bool = True

    def to_dict(self):
        return {"dt": self.dt, "n_paths": self.n_paths, "seed": self.seed, "bridge": self.bridge}


class EigenOracle:
    """Extrapolated FD estimates, cached by region and resolution.

    When Richardson extrapolation is ill-conditioned the finest value is
    returned with twice the largest level-to-level change as its error.
    """

    def __init__(self, settings: FDSettings = FDSettings()):
        self.settings = settings
        self._cache: dict = {}
        self._lock = threading.Lock()

    def refined(self) -> "EigenOracle":
        return EigenOracle(self.settings.refined())

    def estimate(self, region, h0: Optional[float] = None) -> EigEstimate:
        s = self.settings
        h0 = s.h0_for(region) if h0 is None else float(h0)
        key = (region_key(region), repr(h0))
        with self._lock:
            hit = self._cache.get(key)
        if hit is not None:
            return hit
        try:
            est = extrapolated_eigenvalue(region, h0, s.levels, s.tol, s.boundary)
        except IllConditionedFit:
            spacings = [h0 / 2 ** i for i in range(s.levels)]
            values = [principal_eigenvalue_fd(region, h, s.tol, s.boundary).value for h in spacings]
            err = 2.0 * float(np.max(np.abs(np.diff(values))))
            est = EigEstimate(values[-1], "FD", err,
                              {"h0": h0, "levels": s.levels, "spacings": spacings, "values": values,
                               "fallback": "finest level; extrapolation ill-conditioned",
                               "boundary": s.boundary, "tol": s.tol})
        est.vector = None
        with self._lock:
            self._cache[key] = est
        return est

    def single_level(self, region, h: float) -> EigEstimate:
        return principal_eigenvalue_fd(region, h, self.settings.tol, self.settings.boundary)


def fd_or_empty(oracle: EigenOracle, region, h0=None) -> EigEstimate:
    try:
        return oracle.estimate(region, h0)
    except EmptyMask as exc:
        raise EmptyIntersection(str(exc)) from exc


def mc_estimate(region, mc: MCSettings, x0=None, return_curve=False):
    """Kac-rate estimate from the origin with a 99% error bar."""
    x0 = np.zeros(region.dim) if x0 is None else x0
    curve = simulate_survival(region, x0, dt=mc.dt, n_paths=mc.n_paths, seed=mc.seed, bridge=mc.bridge)
    est = kac_rate(curve)
    est.error_indicator *= Z_99
    est.resolution["z"] = Z_99
    return (est, curve) if return_curve else est
