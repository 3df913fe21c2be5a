"""Intrinsic metrics (j*, p, s, w and the hyperbolic metric) on plane and space domains."""

from .errors import InvalidArgument, UnsupportedDomain
from .geometry import (
    ConvexPolygon,
    Domain,
    HalfSpace,
    PuncturedPlane,
    Sector,
    UnitBall,
    boundary_distance,
    contains,
    nearest_boundary_points,
    parse_domain,
    tilde_set,
)
from .metrics import MetricId, evaluate, jstar, point_pair, rho, tri_ratio, w_metric

__version__ = "0.1.0"
