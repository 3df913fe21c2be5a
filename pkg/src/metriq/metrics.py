"""Evaluators for the intrinsic metrics and quasi-metrics.

All evaluators take a domain and two points (or two equally long batches of
points) and return a float (or an array).  The diagonal ``x == y`` always
evaluates to exactly 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import geometry as geo
from .errors import InvalidArgument, UnsupportedDomain
from .geometry import ConvexPolygon, Domain, HalfSpace, PuncturedPlane, Sector, UnitBall, norm

SQRT2 = math.sqrt(2.0)

KINDS = ("jstar", "pp", "sratio", "w", "low", "rho", "th_half_rho", "th_quarter_rho")
STRATEGIES = ("closed_form", "oracle")

# CLI names -> kinds
CLI_NAMES = {
    "jstar": "jstar",
    "pp": "pp",
    "s": "sratio",
    "w": "w",
    "low": "low",
    "rho": "rho",
    "th2": "th_half_rho",
    "th4": "th_quarter_rho",
}

COLLINEAR_TOL = 1e-10
SYMMETRIC_TOL = 1e-12


@dataclass(frozen=True)
class MetricId:
    kind: str
    strategy: str | None = None  # None: closed form where available, oracle otherwise

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidArgument(f"unknown metric kind {self.kind!r}")
        if self.strategy is not None and self.strategy not in STRATEGIES:
            raise InvalidArgument(f"unknown strategy {self.strategy!r}")

    @classmethod
    def from_name(cls, name: str, strategy: str | None = None) -> "MetricId":
        if name in CLI_NAMES:
            name = CLI_NAMES[name]
        return cls(name, strategy)


@dataclass(frozen=True)
class EvalRecord:
    domain: Domain
    metric: MetricId
    x: tuple[float, ...]
    y: tuple[float, ...]
    value: float
    method: str

    def to_dict(self) -> dict:
        return {
            "domain": self.domain.literal(),
            "metric": self.metric.kind,
            "x": list(self.x),
            "y": list(self.y),
            "value": self.value,
            "method": self.method,
        }


def _pairs(d: Domain, x, y):
    X, sx = d._checked(x)
    Y, sy = d._checked(y)
    if X.shape != Y.shape:
        raise InvalidArgument("x and y batches must have equal length")
    return X, Y, sx and sy


def _out(v: np.ndarray, single: bool):
    return float(v[0]) if single else v


def _ratio(num: np.ndarray, den: np.ndarray) -> np.ndarray:
    """num / den with 0 on the diagonal (num == 0)."""
    safe = np.where(num > 0.0, den, 1.0)
    return np.where(num > 0.0, num / safe, 0.0)


# --------------------------------------------------------------------------
# j*, p


def jstar(d: Domain, x, y):
    X, Y, single = _pairs(d, x, y)
    dist = norm(X - Y)
    m = np.minimum(d._boundary_distance(X), d._boundary_distance(Y))
    return _out(_ratio(dist, dist + 2.0 * m), single)


def point_pair(d: Domain, x, y):
    X, Y, single = _pairs(d, x, y)
    dist = norm(X - Y)
    den = np.sqrt(dist * dist + 4.0 * d._boundary_distance(X) * d._boundary_distance(Y))
    return _out(_ratio(dist, den), single)


# --------------------------------------------------------------------------
# triangular ratio metric


def _sector_heron(theta: float, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """inf over the boundary of |x-z| + |z-y| for a sector with theta <= pi.

    Per ray: reflect x across the ray's line; the straight segment to y is the
    shortest path if it meets the ray, otherwise the vertex is optimal.
    """
    best = norm(X) + norm(Y)  # path through the vertex
    for u in Sector(theta).rays:
        t_x = X @ u
        t_y = Y @ u
        fx = X - t_x[:, None] * u
        fy = Y - t_y[:, None] * u
        hx = norm(fx)
        hy = norm(fy)
        # crossing point of [x', y] with the line, as a coordinate along u
        w = hx / (hx + hy)
        t_cross = t_x + w * (t_y - t_x)
        direct = np.sqrt((t_x - t_y) ** 2 + (hx + hy) ** 2)
        best = np.where(t_cross >= 0.0, np.minimum(best, direct), best)
    return best


def _ball_closed(X2: np.ndarray, Y2: np.ndarray):
    """Closed forms for planar ball pairs; returns (values, mask of pairs covered).

    Expects the output of :func:`plane_reduce_batch` (x on the positive axis).
    """
    nx = norm(X2)
    ny = norm(Y2)
    dist = norm(X2 - Y2)
    cross = np.abs(X2[:, 0] * Y2[:, 1] - X2[:, 1] * Y2[:, 0])
    scale = np.where((nx > 0) & (ny > 0), nx * ny, 1.0)
    collinear = (nx == 0) | (ny == 0) | (cross / scale < COLLINEAR_TOL)
    vals = np.full(len(X2), np.nan)
    # collinear with the origin
    den = 2.0 - norm(X2 + Y2)
    vals[collinear] = _ratio(dist[collinear], den[collinear])
    # symmetric about a diameter: rotate the bisector onto the positive axis
    sym = ~collinear & (np.abs(nx - ny) <= SYMMETRIC_TOL)
    if np.any(sym):
        r = 0.5 * (nx[sym] + ny[sym])
        cos_mu = np.clip(np.sum(X2[sym] * Y2[sym], axis=-1) / (nx[sym] * ny[sym]), -1.0, 1.0)
        alpha = 0.5 * np.arccos(cos_mu)
        h = r * np.cos(alpha)
        k = r * np.sin(alpha)
        far = r * r > h  # |x - 1/2| > 1/2
        vals[sym] = np.where(far, r, k / np.sqrt((1.0 - h) ** 2 + k * k))
    return vals, collinear | sym


def tri_ratio(d: Domain, x, y, strategy: str | None = None, tol: float = 1e-9, method_out: list | None = None):
    """Triangular ratio metric s_G.

    ``strategy`` None uses exact formulas where they exist and the boundary
    oracle elsewhere; "oracle" forces the oracle; "closed_form" raises
    :class:`UnsupportedDomain` when no exact formula covers the input.
    """
    from . import oracle

    X, Y, single = _pairs(d, x, y)
    dist = norm(X - Y)
    if strategy == "oracle":
        if method_out is not None:
            method_out.append("oracle")
        return _out(oracle.s_oracle_batch(d, X, Y, tol), single)

    if isinstance(d, HalfSpace):
        vals = point_pair(d, X, Y)
        used = "closed_form"
    elif isinstance(d, Sector) and d.theta <= math.pi:
        vals = _ratio(dist, _sector_heron(d.theta, X, Y))
        used = "closed_form"
    elif isinstance(d, PuncturedPlane):
        s = d.puncture_array
        den = (norm(X[:, None, :] - s[None]) + norm(Y[:, None, :] - s[None])).min(axis=1)
        vals = np.minimum(_ratio(dist, den), 1.0)  # rounding when [x, y] passes a puncture
        used = "closed_form"
    elif isinstance(d, UnitBall):
        X2, Y2 = geo.plane_reduce_batch(X, Y)
        vals, covered = _ball_closed(X2, Y2)
        vals[dist == 0.0] = 0.0
        covered |= dist == 0.0
        used = "closed_form"
        if not np.all(covered):
            if strategy == "closed_form":
                raise UnsupportedDomain("no closed form for s on this ball pair; use the oracle")
            rest = ~covered
            vals[rest] = oracle.s_oracle_batch(UnitBall(2), X2[rest], Y2[rest], tol)
            used = "oracle" if not np.any(covered) else "mixed"
    else:
        if strategy == "closed_form":
            raise UnsupportedDomain(f"no closed form for s on {d.literal()}")
        vals = oracle.s_oracle_batch(d, X, Y, tol)
        used = "oracle"
    if method_out is not None:
        method_out.append(used)
    return _out(np.asarray(vals, dtype=float), single)


# --------------------------------------------------------------------------
# w


def w_metric(d: Domain, x, y):
    """|x-y| over the smaller distance from each point to the other's tilde set."""
    if not d.convex:
        raise UnsupportedDomain(
            f"w is only defined on convex domains; the denominator can vanish on {d.literal()}"
        )
    X, Y, single = _pairs(d, x, y)
    dist = norm(X - Y)
    if isinstance(d, UnitBall):
        nx = norm(X)
        ny = norm(Y)
        tx, _ = d.tilde_candidates(X)
        ty, _ = d.tilde_candidates(Y)
        to_tx = np.where(nx > 0.0, norm(Y - tx[:, 0]), 2.0 - ny)
        to_ty = np.where(ny > 0.0, norm(X - ty[:, 0]), 2.0 - nx)
        den = np.minimum(to_tx, to_ty)
    else:
        tx, vx = d.tilde_candidates(X)
        ty, vy = d.tilde_candidates(Y)
        to_tx = np.where(vx, norm(Y[:, None, :] - tx), np.inf).min(axis=1)
        to_ty = np.where(vy, norm(X[:, None, :] - ty), np.inf).min(axis=1)
        den = np.minimum(to_tx, to_ty)
    return _out(_ratio(dist, den), single)


def low_fn(x, y):
    """Inversion-based lower bound for s in the punctured unit disk."""
    d = UnitBall(2)
    X, Y, single = _pairs(d, x, y)
    if np.any(norm(X) == 0.0) or np.any(norm(Y) == 0.0):
        raise InvalidArgument("low is undefined at the origin")
    dist = norm(X - Y)
    den = np.minimum(norm(X - geo.invert(Y)), norm(geo.invert(X) - Y))
    return _out(_ratio(dist, den), single)


# --------------------------------------------------------------------------
# hyperbolic metric


def _arcosh1p(delta: np.ndarray) -> np.ndarray:
    """arcosh(1 + delta), accurate for small delta."""
    return np.log1p(delta + np.sqrt(delta * (delta + 2.0)))


def rho(d: Domain, x, y):
    X, Y, single = _pairs(d, x, y)
    return _out(_rho(d, X, Y), single)


def _rho(d: Domain, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    dist2 = np.sum((X - Y) ** 2, axis=-1)
    if isinstance(d, HalfSpace):
        return _arcosh1p(dist2 / (2.0 * X[:, -1] * Y[:, -1]))
    if isinstance(d, UnitBall):
        nx = norm(X)
        ny = norm(Y)
        q = (1.0 - nx) * (1.0 + nx) * (1.0 - ny) * (1.0 + ny)
        return 2.0 * np.arcsinh(np.sqrt(dist2 / q))
    if isinstance(d, Sector):
        return _rho(HalfSpace(2), geo.sector_power_map(d.theta, X), geo.sector_power_map(d.theta, Y))
    raise UnsupportedDomain(f"hyperbolic metric not available on {d.literal()}")


def th_half(d: Domain, x, y):
    X, Y, single = _pairs(d, x, y)
    return _out(np.tanh(_rho(d, X, Y) / 2.0), single)


def th_quarter(d: Domain, x, y):
    X, Y, single = _pairs(d, x, y)
    return _out(np.tanh(_rho(d, X, Y) / 4.0), single)


def th_half_disk(x, y) -> float:
    """|(x - y) / (1 - x conj(y))| in the unit disk."""
    zx = complex(*np.asarray(x, dtype=float))
    zy = complex(*np.asarray(y, dtype=float))
    if abs(zx) >= 1 or abs(zy) >= 1:
        raise InvalidArgument("points must lie in the unit disk")
    return abs((zx - zy) / (1.0 - zx * zy.conjugate()))


def invert_in_sector(x) -> np.ndarray:
    return geo.invert(x)


# --------------------------------------------------------------------------
# dispatch


def evaluator(kind: str, strategy: str | None = None, tol: float = 1e-9) -> Callable:
    """Return ``f(d, x, y)`` for a metric kind."""
    if kind == "jstar":
        return jstar
    if kind == "pp":
        return point_pair
    if kind == "sratio":
        return lambda d, x, y: tri_ratio(d, x, y, strategy=strategy, tol=tol)
    if kind == "w":
        return w_metric
    if kind == "low":
        def _low(d, x, y):
            if not (isinstance(d, UnitBall) and d.dim == 2):
                raise UnsupportedDomain("low is defined on the unit disk only")
            return low_fn(x, y)
        return _low
    if kind == "rho":
        return rho
    if kind == "th_half_rho":
        return th_half
    if kind == "th_quarter_rho":
        return th_quarter
    raise InvalidArgument(f"unknown metric kind {kind!r}")


def evaluate(d: Domain, metric: MetricId, x, y, tol: float = 1e-9) -> EvalRecord:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if metric.kind == "sratio":
        used: list[str] = []
        value = tri_ratio(d, x, y, strategy=metric.strategy, tol=tol, method_out=used)
        method = used[0]
    else:
        if metric.strategy == "oracle":
            raise UnsupportedDomain(f"no oracle strategy for {metric.kind}")
        value = evaluator(metric.kind)(d, x, y)
        method = "closed_form"
    return EvalRecord(d, metric, tuple(map(float, x)), tuple(map(float, y)), float(value), method)


__all__ = [
    "ConvexPolygon",
    "EvalRecord",
    "MetricId",
    "evaluate",
    "evaluator",
    "invert_in_sector",
    "jstar",
    "low_fn",
    "point_pair",
    "rho",
    "th_half",
    "th_half_disk",
    "th_quarter",
    "tri_ratio",
    "w_metric",
]
