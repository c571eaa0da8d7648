"""Centrally symmetric convex bodies, derived regions and cone analysis."""
from .apertures import (Arc, ApertureReport, ComponentDiagnostics, component_apertures,
                        component_diagnostics)
from .bodies import (Body, Ellipsoid, PBall, SymPolytope, box_polytope, cross_polytope, cube,
                     unit_disk)
from .regions import (Intersect, MinkowskiAverage, Region, Scale, Translate, boundary_sample,
                      bounding_box, inclusion_check, interior, membership, minkowski_average,
                      region_gauge, replay_witness, sphere_directions)
from .serialization import dumps, from_dict, loads, region_key, to_dict


def gauge(body, x):
    return body.gauge(x)


def support(body, u):
    return body.support(u)
