"""Angular structure of ``B1 \\ B2`` for planar bodies.

For origin-centred bodies the set difference is a union of cones over the
origin: in direction ``u`` body ``B1`` reaches beyond ``B2`` exactly when
``gauge_B2(u) > gauge_B1(u)``. Arcs of such directions are the cone
components; their angular width is the aperture.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import DegenerateComponent, DimensionError
from .bodies import Body

TWO_PI = 2.0 * math.pi
# log-gauge gap below which two boundaries are considered coincident
EQUAL_TOL = 1e-9


@dataclass(frozen=True)
class Arc:
    lo: float
    hi: float
    full: bool = False

    @property
    def aperture(self) -> float:
        return self.hi - self.lo

    @property
    def axis_angle(self) -> float:
        return 0.5 * (self.lo + self.hi)

    @property
    def axis(self) -> np.ndarray:
        a = self.axis_angle
        return np.array([math.cos(a), math.sin(a)])

    def contains(self, theta: float) -> bool:
        if self.full:
            return True
        t = (theta - self.lo) % TWO_PI
        return t <= self.aperture

    def to_dict(self):
        return {"lo": self.lo, "hi": self.hi, "aperture": self.aperture,
                "axis": self.axis.tolist(), "full": self.full}


@dataclass(frozen=True)
class ApertureReport:
    b1_minus_b2: tuple
    b2_minus_b1: tuple
    angular_resolution: float

    @property
    def b1_subset_b2(self) -> bool:
        return not self.b1_minus_b2

    @property
    def b2_subset_b1(self) -> bool:
        return not self.b2_minus_b1

    @property
    def max_aperture_b1(self) -> float:
        return max((a.aperture for a in self.b1_minus_b2), default=0.0)

    @property
    def max_aperture_b2(self) -> float:
        return max((a.aperture for a in self.b2_minus_b1), default=0.0)

    def to_dict(self):
        return {
            "b1_minus_b2": [a.to_dict() for a in self.b1_minus_b2],
            "b2_minus_b1": [a.to_dict() for a in self.b2_minus_b1],
            "b1_subset_b2": self.b1_subset_b2,
            "b2_subset_b1": self.b2_subset_b1,
            "angular_resolution": self.angular_resolution,
        }


def _unit(theta):
    theta = np.asarray(theta, dtype=float)
    return np.stack([np.cos(theta), np.sin(theta)], axis=-1)


def _log_gap(b1, b2, theta):
    """``log g2(u) - log g1(u)``: positive where B1 sticks out of B2.

    Antisymmetric under swapping the bodies to the last bit.
    """
    u = _unit(theta)
    return np.log(b2.gauge(u)) - np.log(b1.gauge(u))


def _refine(b1, b2, sign, t_in, t_out, resolution):
    """Bisect between an angle inside the arc set and one outside it."""
    while abs(t_out - t_in) > resolution:
        mid = 0.5 * (t_in + t_out)
        if sign * _log_gap(b1, b2, mid) > EQUAL_TOL:
            t_in = mid
        else:
            t_out = mid
    return 0.5 * (t_in + t_out)


def _arcs(b1, b2, sign, theta, gap, resolution):
    inside = sign * gap > EQUAL_TOL
    n = len(theta)
    if inside.all():
        return (Arc(0.0, TWO_PI, full=True),)
    if not inside.any():
        return ()
    step = TWO_PI / n
    # rotate so that index 0 is outside; then runs do not wrap
    start = int(np.argmin(inside))
    arcs = []
    j = 0
    while j < n:
        k = (start + j) % n
        if inside[k]:
            run_start = j
            while j < n and inside[(start + j) % n]:
                j += 1
            first = start + run_start
            last = start + j - 1
            t_first, t_last = first * step, last * step
            lo = _refine(b1, b2, sign, t_first, t_first - step, resolution)
            hi = _refine(b1, b2, sign, t_last, t_last + step, resolution)
            shift = math.floor(lo / TWO_PI) * TWO_PI
            arcs.append(Arc(lo - shift, hi - shift))
        else:
            j += 1
    return tuple(sorted(arcs, key=lambda a: a.lo))


def component_apertures(b1: Body, b2: Body, angular_resolution: float = 1e-6,
                        grid: int = 4096) -> ApertureReport:
    if b1.dim != 2 or b2.dim != 2:
        raise DimensionError("apertures are implemented for planar bodies only")
    theta = TWO_PI * np.arange(grid) / grid
    gap = _log_gap(b1, b2, theta)
    return ApertureReport(
        b1_minus_b2=_arcs(b1, b2, +1.0, theta, gap, angular_resolution),
        b2_minus_b1=_arcs(b1, b2, -1.0, theta, gap, angular_resolution),
        angular_resolution=angular_resolution,
    )


@dataclass(frozen=True)
class ComponentDiagnostics:
    """Boundary points attached to one cone component of ``B1 \\ B2``.

    ``x_prime`` is where the axis ray meets ``∂B2``; ``x1_sharp`` and
    ``x2_sharp`` are the arc endpoints on ``∂B1 ∩ ∂B2``. All gauges are taken
    with respect to ``B1``.
    """

    arc: Arc
    x_prime: np.ndarray
    x1_sharp: np.ndarray
    x2_sharp: np.ndarray
    gauge_x_prime: float
    gauge_x1_sharp: float
    gauge_x2_sharp: float
    gauge_midpoint: float
    axis_point_gauge: float  # gauge of sqrt2 (B1 ∩ B2) at the outer axis point of B1

    @property
    def endpoint_gauges_equal(self) -> bool:
        return abs(self.gauge_x1_sharp - self.gauge_x2_sharp) <= 1e-6

    @property
    def first_inequality(self) -> bool:
        # sqrt2 |x'| >= sqrt2 |(x1 + x2) / 2|
        return self.gauge_x_prime >= self.gauge_midpoint - 1e-9

    @property
    def second_inequality(self) -> bool:
        # sqrt2 |(x1 + x2) / 2| >= |x1|
        return math.sqrt(2.0) * self.gauge_midpoint >= self.gauge_x1_sharp - 1e-9

    @property
    def axis_point_included(self) -> bool:
        """Whether the outermost axis point of B1 lies in sqrt2 (B1 ∩ B2)."""
        return self.axis_point_gauge <= 1.0 + 1e-9

    def to_dict(self):
        return {
            "arc": self.arc.to_dict(),
            "x_prime": self.x_prime.tolist(),
            "x1_sharp": self.x1_sharp.tolist(),
            "x2_sharp": self.x2_sharp.tolist(),
            "gauge_x_prime": self.gauge_x_prime,
            "gauge_x1_sharp": self.gauge_x1_sharp,
            "gauge_x2_sharp": self.gauge_x2_sharp,
            "gauge_midpoint": self.gauge_midpoint,
            "endpoint_gauges_equal": self.endpoint_gauges_equal,
            "first_inequality": self.first_inequality,
            "second_inequality": self.second_inequality,
            "axis_point_gauge": self.axis_point_gauge,
            "axis_point_included": self.axis_point_included,
        }


def component_diagnostics(b1: Body, b2: Body, arc: Arc) -> ComponentDiagnostics:
    if b1.dim != 2 or b2.dim != 2:
        raise DimensionError("component diagnostics are implemented for planar bodies only")
    if arc.full or arc.aperture <= 1e-9:
        raise DegenerateComponent("arc has no distinct endpoints")
    if _log_gap(b1, b2, arc.axis_angle) <= EQUAL_TOL:
        raise DegenerateComponent("B1 does not reach beyond B2 along the arc axis")
    axis = arc.axis
    x_prime = axis / b2.gauge(axis)
    u1, u2 = _unit(arc.lo), _unit(arc.hi)
    x1 = u1 / b1.gauge(u1)
    x2 = u2 / b1.gauge(u2)
    return ComponentDiagnostics(
        arc=arc,
        x_prime=x_prime,
        x1_sharp=x1,
        x2_sharp=x2,
        gauge_x_prime=float(b1.gauge(x_prime)),
        gauge_x1_sharp=float(b1.gauge(x1)),
        gauge_x2_sharp=float(b1.gauge(x2)),
        gauge_midpoint=float(b1.gauge(0.5 * (x1 + x2))),
        axis_point_gauge=float(max(1.0, b2.gauge(axis / b1.gauge(axis))) / math.sqrt(2.0)),
    )
