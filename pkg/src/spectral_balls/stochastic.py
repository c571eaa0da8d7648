"""Brownian exit-time oracle: survival curves, Kac decay rates, and
statistical tests of the log-concavity and symmetry identities.

Paths are split into a fixed number of batches. Batch ``b`` draws from its
own Philox stream keyed by ``(seed, b)``, so results depend only on the
inputs and the seed, never on how many workers run the batches.
"""
from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ._workers import worker_count
from .errors import (DegenerateRegion, InsufficientTail, OriginOutside, StartOutsideRegion)
from ._kernels import advance_block, flatten, level_and_distance
from .geometry.regions import Intersect, Translate
from .spectral import EigEstimate
from .verdict import Status, Verdict

N_BATCHES = 20
Z_99 = 2.58
FIT_WINDOW = (0.01, 0.3)
MIN_ALIVE_IN_WINDOW = 50
BLOCK = 64
_MAX_GRID = 2000


@dataclass
class SurvivalCurve:
    t: np.ndarray
    S: np.ndarray
    stderr: np.ndarray
    path_count: int
    seed: Optional[int] = None
    dt: Optional[float] = None
    batch_alive: Optional[np.ndarray] = None  # (batches, len(t)) alive counts
    batch_sizes: Optional[np.ndarray] = None
    meta: dict = field(default_factory=dict)

    def at(self, t: float):
        """Survival and standard error at the grid time closest to ``t``."""
        j = int(np.argmin(np.abs(self.t - t)))
        return float(self.S[j]), float(self.stderr[j])

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "S", "stderr"])
            for row in zip(self.t, self.S, self.stderr):
                w.writerow([repr(float(v)) for v in row])

    @classmethod
    def from_csv(cls, path, path_count=None):
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = [h.strip() for h in next(reader)]
            if header[:3] != ["t", "S", "stderr"]:
                raise ValueError(f"expected header t,S,stderr in {path}, got {header}")
            rows = np.array([[float(v) for v in r[:3]] for r in reader if r])
        if rows.size == 0:
            raise ValueError(f"no data rows in {path}")
        return cls(t=rows[:, 0], S=rows[:, 1], stderr=rows[:, 2], path_count=path_count or 0)


class _Batch:
    """Paths of one batch; the state persists so the horizon can be extended."""

    def __init__(self, flat, x0, dt, n, seed, index, bridge):
        self.flat, self.dt, self.bridge = flat, dt, bridge
        self.rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, index])))
        self.pos = np.tile(x0, (n, 1))
        self.live = np.arange(n)
        self.exit_step = np.full(n, -1, dtype=np.int64)
        self.step = 0
        _, self.dist = level_and_distance(flat, self.pos)

    def run(self, n_steps):
        sqdt = math.sqrt(self.dt)
        f = self.flat
        target = self.step + n_steps
        while self.step < target and len(self.live):
            k = min(BLOCK, target - self.step)
            m, dim = self.pos.shape
            inc = self.rng.standard_normal((k, m, dim)) * sqdt
            p_kill = np.zeros((k, m))
            first = advance_block(self.pos, self.dist, inc, f.kinds, f.shifts, f.scales, f.offsets,
                                  f.params, self.dt, self.bridge, p_kill)
            if self.bridge:
                cand = np.nonzero(p_kill > 0.0)
                if len(cand[0]):
                    u = self.rng.random(len(cand[0]))
                    killed = u < p_kill[cand]
                    steps_k, paths_k = cand[0][killed], cand[1][killed]
                    np.minimum.at(first, paths_k, steps_k)
            hit = first < k
            self.exit_step[self.live[hit]] = self.step + first[hit] + 1
            keep = ~hit
            self.live = self.live[keep]
            self.pos = self.pos[keep]
            self.dist = self.dist[keep]
            self.step += k
        self.step = max(self.step, target)


def _run_batches(batches, n_steps, workers):
    if workers > 1 and len(batches) > 1:
        with ThreadPoolExecutor(workers) as pool:
            list(pool.map(lambda b: b.run(n_steps), batches))
    else:
        for b in batches:
            b.run(n_steps)


def simulate_survival(region, x0, dt: float = 1e-4, t_max: Optional[float] = None,
                      n_paths: int = 10_000, seed: int = 0, bridge: bool = True,
                      n_batches: int = N_BATCHES, workers: Optional[int] = None) -> SurvivalCurve:
    """Empirical ``P^x0(T > t)`` from Euler-discretised Brownian paths.

    Brownian increments are exact; the exit is detected at grid times and,
    with ``bridge=True``, between them by killing with the half-space
    Brownian-bridge crossing probability ``exp(-2 d0 d1 / dt)`` where
    ``d`` is a lower bound on the distance to the boundary.

    ``t_max=None`` doubles the horizon until the survival falls below 0.01.
    """
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    if not region.level(x0) < 1.0:
        raise StartOutsideRegion(f"start point {x0.tolist()} is not inside the region")
    if not dt > 0:
        raise ValueError("dt must be positive")
    if n_paths < 1:
        raise ValueError("n_paths must be positive")
    workers = worker_count() if workers is None else workers
    sizes = np.array([len(a) for a in np.array_split(np.arange(n_paths), n_batches)])
    flat = flatten(region)
    batches = [_Batch(flat, x0, dt, int(n), seed, b, bridge) for b, n in enumerate(sizes)]

    if t_max is not None:
        _run_batches(batches, int(round(t_max / dt)), workers)
    else:
        lo, hi = region.bbox()
        horizon = max(int(round(0.25 * float(np.min(hi - lo)) ** 2 / dt)), 1)
        done = 0
        while True:
            _run_batches(batches, horizon - done, workers)
            done = horizon
            alive = sum(len(b.live) for b in batches)
            if alive < FIT_WINDOW[0] * n_paths or horizon * dt > 1e4:
                break
            horizon *= 2

    n_steps = batches[0].step
    first_step = sum(int(np.sum(b.exit_step == 1)) for b in batches)
    if first_step > 0.99 * n_paths:
        raise DegenerateRegion(f"{first_step}/{n_paths} paths exit on the first step; reduce dt")

    stride = max(1, -(-n_steps // _MAX_GRID))
    steps = np.arange(0, n_steps + 1, stride)
    if steps[-1] != n_steps:
        steps = np.append(steps, n_steps)
    alive = np.empty((n_batches, len(steps)), dtype=np.int64)
    for i, b in enumerate(batches):
        ex = np.where(b.exit_step < 0, np.iinfo(np.int64).max, b.exit_step)
        ex = np.sort(ex)
        alive[i] = len(ex) - np.searchsorted(ex, steps, side="right")
    S = alive.sum(axis=0) / n_paths
    stderr = _batch_means_stderr(alive, sizes)
    return SurvivalCurve(t=steps * dt, S=S, stderr=stderr, path_count=int(n_paths), seed=seed, dt=dt,
                         batch_alive=alive, batch_sizes=sizes,
                         meta={"bridge": bridge, "n_batches": n_batches, "steps": int(n_steps)})


def _batch_means_stderr(alive, sizes):
    ok = sizes > 0
    if ok.sum() < 2:
        return np.zeros(alive.shape[1])
    frac = alive[ok] / sizes[ok, None]
    return frac.std(axis=0, ddof=1) / math.sqrt(ok.sum())


def _fit_window(curve: SurvivalCurve):
    S = curve.S
    sel = (S >= FIT_WINDOW[0]) & (S <= FIT_WINDOW[1])
    if curve.path_count:
        sel &= S * curve.path_count >= MIN_ALIVE_IN_WINDOW
    idx = np.nonzero(sel)[0]
    if len(idx) < 5 or len(np.unique(S[idx])) < 5:
        raise InsufficientTail(f"only {len(idx)} usable points in the fit window {FIT_WINDOW}")
    return idx


def _wls_slope(t, S, se):
    y = np.log(S)
    if np.all(se > 0):
        w = (S / se) ** 2
    else:
        w = np.ones_like(S)
    W = w.sum()
    tm = (w * t).sum() / W
    ym = (w * y).sum() / W
    stt = (w * (t - tm) ** 2).sum()
    slope = (w * (t - tm) * (y - ym)).sum() / stt
    resid = y - ym - slope * (t - tm)
    dof = max(len(t) - 2, 1)
    s2 = (w * resid ** 2).sum() / dof
    return slope, math.sqrt(s2 / stt) if stt > 0 else math.inf


def kac_rate(curve: SurvivalCurve) -> EigEstimate:
    """Decay rate ``-d log S / dt`` over the tail window ``S in [0.01, 0.3]``.

    The uncertainty is a delete-one-batch jackknife of the slope when batch
    counts are available (otherwise the regression standard error), plus the
    change caused by shifting the window by one grid point.
    """
    idx = _fit_window(curve)
    t, S, se = curve.t, curve.S, curve.stderr
    slope, slope_se = _wls_slope(t[idx], S[idx], se[idx])

    if curve.batch_alive is not None and np.sum(curve.batch_sizes > 0) >= 2:
        jack = []
        total = curve.batch_alive.sum(axis=0)
        for b in np.nonzero(curve.batch_sizes > 0)[0]:
            n_rest = curve.path_count - curve.batch_sizes[b]
            S_rest = (total - curve.batch_alive[b])[idx] / n_rest
            if np.any(S_rest <= 0):
                jack.append(np.nan)
                continue
            jack.append(_wls_slope(t[idx], S_rest, se[idx])[0])
        jack = np.array(jack)
        if np.all(np.isfinite(jack)):
            nb = len(jack)
            slope_se = math.sqrt((nb - 1) / nb * np.sum((jack - jack.mean()) ** 2))

    shifted = idx + 1 if idx[-1] + 1 < len(S) and S[idx[-1] + 1] > 0 else idx - 1
    if shifted[0] >= 0:
        sens = abs(_wls_slope(t[shifted], S[shifted], se[shifted])[0] - slope)
    else:
        sens = 0.0
    return EigEstimate(value=float(-slope), method="MC_KAC", error_indicator=float(slope_se + sens),
                       resolution={"window": [float(t[idx[0]]), float(t[idx[-1]])], "points": int(len(idx)),
                                   "dt": curve.dt, "paths": curve.path_count, "slope_se": float(slope_se),
                                   "window_sensitivity": float(sens)})


def survival_at(region, x, t, dt, n_paths, seed, bridge=True):
    curve = simulate_survival(region, x, dt=dt, t_max=t, n_paths=n_paths, seed=seed, bridge=bridge)
    return curve.at(t)


def check_logconcavity(A, B, C, x, y, lam: float, t: float, n_paths: int = 20_000, seed: int = 0,
                       dt: float = 1e-3, inclusion=None) -> Verdict:
    """Statistical test of ``P^z(T_C > t) >= P^x(T_A > t)^(1-lam) P^y(T_B > t)^lam``
    with ``z = (1 - lam) x + lam y``.

    The three probabilities use common random numbers (same seed), which only
    makes the independent-error combination below conservative.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    z = (1.0 - lam) * x + lam * y
    pa, sa = survival_at(A, x, t, dt, n_paths, seed)
    pb, sb = survival_at(B, y, t, dt, n_paths, seed)
    pc, sc = survival_at(C, z, t, dt, n_paths, seed)
    rhs = pa ** (1.0 - lam) * pb ** lam
    rel = 0.0
    if pa > 0:
        rel += ((1.0 - lam) * sa / pa) ** 2
    if pb > 0:
        rel += (lam * sb / pb) ** 2
    sigma = math.sqrt(sc ** 2 + rhs ** 2 * rel)
    prov = {"method": "MC", "paths": n_paths, "dt": dt, "seed": seed, "t": t, "lam": lam,
            "P_A": pa, "P_B": pb, "P_C": pc, "rhs": rhs, "sigma": sigma, "z": Z_99,
            "inclusion": None if inclusion is None else inclusion.status.value}
    return Verdict.strict(pc - rhs, Z_99 * sigma, provenance=prov)


def check_symmetry_identity(B1, B2, y, t: float = 0.5, n_paths: int = 20_000, seed: int = 0,
                            dt: float = 1e-3, coupling: str = "independent") -> Verdict:
    """Compare survival from the origin in ``B1 ∩ (B2 + y)`` and ``B1 ∩ (B2 - y)``.

    ``coupling="independent"`` uses separate streams ``seed`` and ``seed + 1``;
    ``"antithetic"`` reuses one stream with reflected increments, which makes
    the two estimates agree path by path.
    """
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if not (B2.gauge(-y) < 1.0 and B2.gauge(y) < 1.0):
        raise OriginOutside(f"origin is not inside B1 ∩ (B2 ± {y.tolist()})")
    plus = Intersect(B1, Translate(B2, y))
    minus = Intersect(B1, Translate(B2, -y))
    origin = np.zeros(B1.dim)
    if not np.any(y):
        s, e = survival_at(plus, origin, t, dt, n_paths, seed)
        return Verdict.equality(0.0, Z_99 * math.sqrt(2) * e,
                                provenance={"method": "MC", "S_plus": s, "S_minus": s, "same_region": True,
                                            "paths": n_paths, "dt": dt, "seed": seed, "t": t})
    if coupling == "antithetic":
        sp, ep = survival_at(plus, origin, t, dt, n_paths, seed)
        # reflection x -> -x maps B1 ∩ (B2 + y) onto B1 ∩ (B2 - y)
        sm, em = survival_at(_Reflected(minus), origin, t, dt, n_paths, seed)
    elif coupling == "independent":
        sp, ep = survival_at(plus, origin, t, dt, n_paths, seed)
        sm, em = survival_at(minus, origin, t, dt, n_paths, seed + 1)
    else:
        raise ValueError(f"unknown coupling {coupling!r}")
    sigma = math.sqrt(ep ** 2 + em ** 2)
    return Verdict.equality(sp - sm, Z_99 * sigma,
                            provenance={"method": "MC", "S_plus": sp, "S_minus": sm, "stderr_plus": ep,
                                        "stderr_minus": em, "coupling": coupling, "paths": n_paths,
                                        "dt": dt, "seed": seed, "t": t})


class _Reflected:
    """Region viewed through ``x -> -x``; paths in it are reflected paths."""

    def __init__(self, region):
        self.region = region
        self.reflected_region = region
        self.dim = region.dim
        self.has_translate = region.has_translate

    def level(self, x):
        return self.region.level(-np.asarray(x))

    def level_and_distance(self, x):
        return self.region.level_and_distance(-np.asarray(x))

    def bbox(self):
        lo, hi = self.region.bbox()
        return -hi, -lo
