import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import pball_indicator, radial_gauge
from spectral_balls.errors import BodyError, DegenerateComponent, DimensionError, DomainError, GaugeUndefined
from spectral_balls.geometry import (Ellipsoid, Intersect, PBall, Scale, SymPolytope, Translate,
                                     boundary_sample, component_apertures, component_diagnostics,
                                     inclusion_check, membership, minkowski_average, region_gauge,
                                     replay_witness, sphere_directions, unit_disk, cube, gauge, support)

DISK = unit_disk()
SQUARE = cube()

exponents = st.sampled_from([1.0, 1.3, 2.0, 3.5, 6.0, math.inf])
axes2 = st.lists(st.floats(0.3, 3.0), min_size=2, max_size=2)
vec2 = st.lists(st.floats(-5, 5), min_size=2, max_size=2).map(np.array)


@st.composite
def bodies(draw):
    kind = draw(st.sampled_from(["pball", "ellipsoid", "polytope"]))
    if kind == "pball":
        return PBall(draw(exponents), draw(axes2))
    if kind == "ellipsoid":
        phi = draw(st.floats(0, math.pi))
        a = np.array(draw(axes2))
        R = np.array([[math.cos(phi), -math.sin(phi)], [math.sin(phi), math.cos(phi)]])
        return Ellipsoid(R @ np.diag(a ** -2.0) @ R.T)
    k = draw(st.integers(2, 5))
    phi = np.sort(np.array(draw(st.lists(st.floats(0, math.pi), min_size=k, max_size=k, unique=True))))
    if np.min(np.diff(np.r_[phi, phi[0] + math.pi])) < 0.05:
        phi = np.linspace(0, math.pi, k, endpoint=False)
    r = np.array(draw(st.lists(st.floats(0.4, 2.5), min_size=k, max_size=k)))
    return SymPolytope(np.column_stack([np.cos(phi), np.sin(phi)]) / r[:, None])


# -- gauges and supports: worked values ---------------------------------------

def test_gauge_examples():
    assert gauge(PBall(2, [1, 1]), [0, 0]) == 0.0
    assert gauge(PBall(2, [2, 1]), [2, 0]) == pytest.approx(1.0, abs=1e-15)
    assert gauge(PBall(np.inf, [1, 1]), [0.9, 0.9]) == pytest.approx(0.9, abs=1e-15)


def test_support_examples():
    assert support(DISK, [0, 1]) == pytest.approx(1.0)
    assert support(SQUARE, [1 / math.sqrt(2), 1 / math.sqrt(2)]) == pytest.approx(math.sqrt(2))
    assert support(PBall(2, [2, 1]), [1, 0]) == pytest.approx(2.0)


def test_region_gauge_examples():
    assert region_gauge(Intersect(DISK, SQUARE), [0.9, 0.9]) == pytest.approx(0.9 * math.sqrt(2))
    assert region_gauge(Scale(math.sqrt(2), DISK), [1, 0]) == pytest.approx(1 / math.sqrt(2))
    x = np.array([0.3, -0.7])
    assert region_gauge(Intersect(DISK, DISK), x) == pytest.approx(DISK.gauge(x))
    with pytest.raises(GaugeUndefined):
        region_gauge(Translate(DISK, [0.1, 0]), x)


def test_membership_examples():
    assert membership(Translate(DISK, [3, 0]), np.array([3.5, 0]))
    assert not membership(Intersect(DISK, Translate(DISK, [1.5, 0])), np.array([0, 0.9]))
    assert membership(Scale(2, DISK), np.array([1.9, 0]))


def test_constructor_errors():
    with pytest.raises(BodyError):
        PBall(0.5, [1, 1])
    with pytest.raises(BodyError):
        PBall(2, [1, -1])
    with pytest.raises(BodyError):
        Ellipsoid([[1, 2], [2, 1]])
    with pytest.raises(BodyError):
        SymPolytope([[1, 0], [2, 0]])  # unbounded strip
    assert isinstance(BodyError("x"), ValueError)


# -- gauge invariants -----------------------------------------------------------

@given(bodies(), vec2, st.floats(0, 10))
def test_gauge_positively_homogeneous(body, x, t):
    assert body.gauge(t * x) == pytest.approx(t * body.gauge(x), rel=1e-9, abs=1e-12)


@given(bodies(), vec2)
def test_gauge_even(body, x):
    assert body.gauge(-x) == pytest.approx(body.gauge(x), rel=1e-12, abs=1e-15)


@given(bodies(), vec2, vec2)
def test_gauge_triangle_inequality(body, x, y):
    assert body.gauge(x + y) <= body.gauge(x) + body.gauge(y) + 1e-9


@given(bodies(), vec2)
def test_gauge_lipschitz_constant(body, x):
    # |g(x) - g(y)| <= L |x - y| with y on a small perturbation
    y = x + np.array([1e-3, -2e-3])
    assert abs(body.gauge(x) - body.gauge(y)) <= body.lipschitz * np.linalg.norm(x - y) * (1 + 1e-9)


@given(exponents, axes2, vec2)
def test_pball_gauge_matches_definition(p, axes, x):
    ref = radial_gauge(lambda z: pball_indicator(p, axes, z), x)
    assert PBall(p, axes).gauge(x) == pytest.approx(ref, rel=1e-9, abs=1e-12)


@given(exponents, axes2)
def test_support_is_dual_gauge(p, axes):
    # h_B(u) = max over boundary of <x, u>, equal to the dual norm of (a_i u_i)
    body = PBall(p, axes)
    u = sphere_directions(2, 7, seed=3)
    q = body.dual_exponent
    ref = np.linalg.norm(u * np.asarray(axes), ord=q, axis=1)
    np.testing.assert_allclose(body.support(u), ref, rtol=1e-12)
    bd = boundary_sample(body, 20000, seed=1)
    np.testing.assert_allclose(body.support(u), (bd @ u.T).max(axis=0), rtol=2e-3)


@given(bodies(), bodies(), vec2)
def test_intersection_gauge_is_max(b1, b2, x):
    assert region_gauge(Intersect(b1, b2), x) == pytest.approx(max(b1.gauge(x), b2.gauge(x)), rel=1e-12)


@given(bodies(), st.integers(1, 64), st.integers(0, 100))
def test_boundary_sample_on_boundary(body, k, seed):
    pts = boundary_sample(body, k, seed)
    assert pts.shape == (k, 2)
    np.testing.assert_allclose(body.gauge(pts), 1.0, atol=1e-9)


def test_boundary_sample_examples():
    np.testing.assert_allclose(np.linalg.norm(boundary_sample(DISK, 4), axis=1), 1.0)
    sq = boundary_sample(SQUARE, 8)
    np.testing.assert_allclose(np.abs(sq).max(axis=1), 1.0)
    inter = Intersect(DISK, cube(1.2))
    pts = boundary_sample(inter, 200, seed=5)
    g = np.maximum(DISK.gauge(pts), cube(1.2).gauge(pts))
    assert np.all(DISK.gauge(pts) <= 1 + 1e-9) and np.all(cube(1.2).gauge(pts) <= 1 + 1e-9)
    np.testing.assert_allclose(g, 1.0, atol=1e-9)


def test_sphere_directions_3d_unit():
    u = sphere_directions(3, 100, seed=0)
    np.testing.assert_allclose(np.linalg.norm(u, axis=1), 1.0)


# -- inclusion ------------------------------------------------------------------

def test_inclusion_nested_scaling():
    assert inclusion_check(DISK, Scale(2, DISK)).status.value == "NoViolationFound"
    v = inclusion_check(Scale(2, DISK), DISK)
    assert v.status.value == "Violated"
    assert DISK.gauge(np.array(v.witness)) == pytest.approx(2.0, rel=1e-9)
    assert replay_witness(DISK, v.witness)


def test_inclusion_square_in_circumscribed_disk():
    assert inclusion_check(SQUARE, Scale(math.sqrt(2), DISK)).status.value == "NoViolationFound"


# -- Minkowski averages ------------------------------------------------------------

def test_minkowski_average_of_disk_with_itself():
    avg = minkowski_average(DISK, DISK, 0.5, 720)
    u = sphere_directions(2, 997, seed=11)
    np.testing.assert_allclose(avg.gauge(u), 1.0, atol=1e-3)


def test_minkowski_average_endpoint_is_outer_approximation():
    avg = minkowski_average(SQUARE, DISK, 0.0, 720)
    u = sphere_directions(2, 500, seed=2)
    g = avg.gauge(u)
    assert np.all(g <= SQUARE.gauge(u) + 1e-12)
    np.testing.assert_allclose(g, SQUARE.gauge(u), atol=2 / 720 * 2)


@settings(max_examples=25, deadline=None)
@given(bodies(), bodies(), st.floats(0, 1))
def test_minkowski_average_outer_and_close(b1, b2, lam):
    # points (1-lam) a + lam b with a in B1, b in B2 must lie inside the outer polytope
    n = 720
    avg = minkowski_average(b1, b2, lam, n)
    u = sphere_directions(2, 64, seed=0)
    a = u / b1.gauge(u)[:, None]
    b = u / b2.gauge(u)[:, None]
    combo = (1 - lam) * a[:, None, :] + lam * b[None, :, :]
    assert np.all(avg.gauge(combo.reshape(-1, 2)) <= 1 + 1e-9)
    # support functions agree on the sampled directions
    np.testing.assert_allclose(avg.support(avg.directions[::37]),
                               avg.offsets[::37], rtol=1e-9)


def test_minkowski_average_domain_errors():
    with pytest.raises(DomainError):
        minkowski_average(DISK, SQUARE, 1.5)
    with pytest.raises(DomainError):
        minkowski_average(DISK, SQUARE, 0.5, 4)


# -- apertures -----------------------------------------------------------------

def test_apertures_square_vs_disk():
    rep = component_apertures(SQUARE, unit_disk(1.2))
    a_in = 2 * (math.pi / 4 - math.acos(5 / 6))
    a_out = 2 * math.acos(5 / 6)
    assert len(rep.b1_minus_b2) == 4 and len(rep.b2_minus_b1) == 4
    for arc in rep.b1_minus_b2:
        assert arc.aperture == pytest.approx(a_in, abs=1e-5)
    for arc in rep.b2_minus_b1:
        assert arc.aperture == pytest.approx(a_out, abs=1e-5)


def test_apertures_identical_bodies():
    rep = component_apertures(DISK, DISK)
    assert len(rep.b1_minus_b2) == 0 and len(rep.b2_minus_b1) == 0
    assert rep.b1_subset_b2 and rep.b2_subset_b1


@settings(max_examples=30, deadline=None)
@given(bodies(), bodies())
def test_apertures_complementary(b1, b2):
    rep = component_apertures(b1, b2)
    swapped = component_apertures(b2, b1)
    total = sum(a.aperture for a in rep.b1_minus_b2) + sum(a.aperture for a in rep.b2_minus_b1)
    assert total <= 2 * math.pi + 1e-6
    assert [a.to_dict() for a in swapped.b1_minus_b2] == [a.to_dict() for a in rep.b2_minus_b1]
    for arc in rep.b1_minus_b2:
        assert b1.gauge(arc.axis) < b2.gauge(arc.axis)


def test_apertures_need_planar_bodies():
    with pytest.raises(DimensionError):
        component_apertures(unit_disk(dim=3), cube(dim=3))


def test_component_diagnostics_square_disk():
    rep = component_apertures(SQUARE, unit_disk(1.2))
    arc = min(rep.b1_minus_b2, key=lambda a: abs(a.axis_angle - math.pi / 4))
    d = component_diagnostics(SQUARE, unit_disk(1.2), arc)
    np.testing.assert_allclose(d.x_prime, [0.6 * math.sqrt(2)] * 2, atol=1e-5)
    # first boundary crossing of the square with the 1.2 circle in the first quadrant
    np.testing.assert_allclose(sorted(d.x1_sharp), sorted([1.0, math.sqrt(1.44 - 1)]), atol=1e-5)
    assert d.endpoint_gauges_equal


def test_component_diagnostics_degenerate():
    from spectral_balls.geometry import Arc
    with pytest.raises(DegenerateComponent):
        component_diagnostics(DISK, DISK, Arc(0.0, 0.5))
