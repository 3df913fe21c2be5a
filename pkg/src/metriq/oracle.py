"""Brute-force boundary minimization and other independent reference values.

``s_oracle`` minimizes the Heron objective f(z) = |x - z| + |z - y| over a
parameterization of the boundary: a uniform grid on every piece, then a
golden-section polish around every grid-local minimum.  It shares nothing
with the closed forms in :mod:`metriq.metrics` beyond the domain geometry.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Callable

import numba as nb
import numpy as np

from . import geometry as geo
from .errors import InvalidArgument, UnsupportedDomain
from .geometry import ConvexPolygon, Domain, HalfSpace, PuncturedPlane, Sector, UnitBall, norm

GRID = 4096

# TBB in the base image is too old for numba; the workqueue layer is always present
nb.config.THREADING_LAYER = "workqueue"
INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def thread_count() -> int:
    raw = os.environ.get("METRIQ_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return os.cpu_count() or 1


# --------------------------------------------------------------------------
# boundary parameterizations


@dataclass(frozen=True)
class SegmentPiece:
    """Segments a_k -> b_k, one per pair (rays and lines are truncated)."""

    a: np.ndarray  # (N, 2)
    b: np.ndarray  # (N, 2)

    def at(self, t: float, k: int = 0) -> np.ndarray:
        return self.a[k] + t * (self.b[k] - self.a[k])


@dataclass(frozen=True)
class ArcPiece:
    """Circle arc c + r e^{i(t0 + t (t1 - t0))}, t in [0, 1]."""

    center: tuple[float, float] = (0.0, 0.0)
    radius: float = 1.0
    t0: float = 0.0
    t1: float = 2.0 * math.pi
    closed: bool = True

    def at(self, t: float, k: int = 0) -> np.ndarray:
        ang = self.t0 + t * (self.t1 - self.t0)
        return np.array([self.center[0] + self.radius * math.cos(ang), self.center[1] + self.radius * math.sin(ang)])


@dataclass(frozen=True)
class PointPiece:
    p: tuple[float, float]

    def at(self, t: float = 0.0, k: int = 0) -> np.ndarray:
        return np.asarray(self.p, dtype=float)


@dataclass(frozen=True)
class BoundaryParam:
    domain: Domain
    pieces: tuple


def cut_radius(X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Truncation radius for unbounded boundary pieces."""
    return 16.0 * (norm(X) + norm(Y) + 1.0)


def boundary_param(d: Domain, X: np.ndarray, Y: np.ndarray) -> BoundaryParam:
    """Boundary pieces for planar pairs (X, Y)."""
    n = len(X)
    if isinstance(d, UnitBall):
        return BoundaryParam(d, (ArcPiece(),))
    if isinstance(d, HalfSpace):
        R = cut_radius(X, Y)
        zero = np.zeros(n)
        return BoundaryParam(d, (SegmentPiece(np.stack([-R, zero], -1), np.stack([R, zero], -1)),))
    if isinstance(d, Sector):
        R = cut_radius(X, Y)[:, None]
        origin = np.zeros((n, 2))
        return BoundaryParam(d, tuple(SegmentPiece(origin, R * u[None]) for u in d.rays))
    if isinstance(d, ConvexPolygon):
        v = d.vertex_array
        w = np.roll(v, -1, axis=0)
        return BoundaryParam(
            d,
            tuple(SegmentPiece(np.repeat(a[None], n, 0), np.repeat(b[None], n, 0)) for a, b in zip(v, w)),
        )
    if isinstance(d, PuncturedPlane):
        return BoundaryParam(d, tuple(PointPiece(tuple(p)) for p in d.punctures))
    raise UnsupportedDomain(f"no boundary parameterization for {d!r}")


# --------------------------------------------------------------------------
# Heron infimum: grid scan + golden-section polish, one pair per loop body


@nb.njit(cache=True, inline="always")
def _seg_f(x0, x1, y0, y1, a0, a1, b0, b1, t):
    z0 = a0 + t * (b0 - a0)
    z1 = a1 + t * (b1 - a1)
    return math.sqrt((x0 - z0) ** 2 + (x1 - z1) ** 2) + math.sqrt((z0 - y0) ** 2 + (z1 - y1) ** 2)


@nb.njit(cache=True, inline="always")
def _arc_f(x0, x1, y0, y1, cx, cy, r, t0, t1, t):
    ang = t0 + t * (t1 - t0)
    z0 = cx + r * math.cos(ang)
    z1 = cy + r * math.sin(ang)
    return math.sqrt((x0 - z0) ** 2 + (x1 - z1) ** 2) + math.sqrt((z0 - y0) ** 2 + (z1 - y1) ** 2)


@nb.njit(cache=True)
def _golden_steps(bracket_len, target):
    if bracket_len <= target:
        return 0
    k = int(math.ceil(math.log(bracket_len / target) / -math.log(INV_PHI)))
    return min(k, 200)


@nb.njit(parallel=True, cache=True)
def _segments_min(X, Y, A, B, grid, target):
    n = X.shape[0]
    best = np.empty(n)
    step = 1.0 / (grid - 1)
    for i in nb.prange(n):
        x0, x1, y0, y1 = X[i, 0], X[i, 1], Y[i, 0], Y[i, 1]
        a0, a1, b0, b1 = A[i, 0], A[i, 1], B[i, 0], B[i, 1]
        L = math.hypot(b0 - a0, b1 - a1)
        f = np.empty(grid)
        for g in range(grid):
            f[g] = _seg_f(x0, x1, y0, y1, a0, a1, b0, b1, g * step)
        m = np.inf
        for g in range(grid):
            left = f[g - 1] if g > 0 else np.inf
            right = f[g + 1] if g < grid - 1 else np.inf
            if f[g] <= left and f[g] <= right:
                m = min(m, f[g])
                lo = max((g - 1) * step, 0.0)
                hi = min((g + 1) * step, 1.0)
                c = hi - INV_PHI * (hi - lo)
                e = lo + INV_PHI * (hi - lo)
                fc = _seg_f(x0, x1, y0, y1, a0, a1, b0, b1, c)
                fe = _seg_f(x0, x1, y0, y1, a0, a1, b0, b1, e)
                for _ in range(_golden_steps(L * (hi - lo), target)):
                    if fc < fe:
                        hi = e
                        e, fe = c, fc
                        c = hi - INV_PHI * (hi - lo)
                        fc = _seg_f(x0, x1, y0, y1, a0, a1, b0, b1, c)
                    else:
                        lo = c
                        c, fc = e, fe
                        e = lo + INV_PHI * (hi - lo)
                        fe = _seg_f(x0, x1, y0, y1, a0, a1, b0, b1, e)
                m = min(m, fc, fe)
        best[i] = m
    return best


@nb.njit(parallel=True, cache=True)
def _arc_min(X, Y, Z, cx, cy, r, t0, t1, closed, grid, target):
    n = X.shape[0]
    best = np.empty(n)
    step = 1.0 / grid if closed else 1.0 / (grid - 1)
    L = r * abs(t1 - t0)
    for i in nb.prange(n):
        x0, x1, y0, y1 = X[i, 0], X[i, 1], Y[i, 0], Y[i, 1]
        f = np.empty(grid)
        for g in range(grid):
            z0, z1 = Z[g, 0], Z[g, 1]
            f[g] = math.sqrt((x0 - z0) ** 2 + (x1 - z1) ** 2) + math.sqrt((z0 - y0) ** 2 + (z1 - y1) ** 2)
        m = np.inf
        for g in range(grid):
            if closed:
                left = f[(g - 1) % grid]
                right = f[(g + 1) % grid]
            else:
                left = f[g - 1] if g > 0 else np.inf
                right = f[g + 1] if g < grid - 1 else np.inf
            if f[g] <= left and f[g] <= right:
                m = min(m, f[g])
                lo = (g - 1) * step
                hi = (g + 1) * step
                if not closed:
                    lo = max(lo, 0.0)
                    hi = min(hi, 1.0)
                c = hi - INV_PHI * (hi - lo)
                e = lo + INV_PHI * (hi - lo)
                fc = _arc_f(x0, x1, y0, y1, cx, cy, r, t0, t1, c)
                fe = _arc_f(x0, x1, y0, y1, cx, cy, r, t0, t1, e)
                for _ in range(_golden_steps(L * (hi - lo), target)):
                    if fc < fe:
                        hi = e
                        e, fe = c, fc
                        c = hi - INV_PHI * (hi - lo)
                        fc = _arc_f(x0, x1, y0, y1, cx, cy, r, t0, t1, c)
                    else:
                        lo = c
                        c, fc = e, fe
                        e = lo + INV_PHI * (hi - lo)
                        fe = _arc_f(x0, x1, y0, y1, cx, cy, r, t0, t1, e)
                m = min(m, fc, fe)
        best[i] = m
    return best


def _piece_minimum(piece, X, Y, tol: float, grid: int) -> np.ndarray:
    target = tol * 1e-3
    if isinstance(piece, PointPiece):
        p = np.asarray(piece.p)
        return norm(X - p) + norm(Y - p)
    if isinstance(piece, SegmentPiece):
        A = np.ascontiguousarray(piece.a, dtype=float)
        B = np.ascontiguousarray(piece.b, dtype=float)
        return _segments_min(X, Y, A, B, grid, target)
    step = 1.0 / grid if piece.closed else 1.0 / (grid - 1)
    Z = np.stack([piece.at(g * step) for g in range(grid)])
    return _arc_min(X, Y, Z, float(piece.center[0]), float(piece.center[1]), float(piece.radius),
                    float(piece.t0), float(piece.t1), bool(piece.closed), grid, target)


def _to_plane(d: Domain, X: np.ndarray, Y: np.ndarray):
    if d.dim == 2:
        return d, X, Y
    if isinstance(d, UnitBall):
        X2, Y2 = geo.plane_reduce_batch(X, Y)
        return UnitBall(2), X2, Y2
    if isinstance(d, HalfSpace):
        # the vertical plane through x and y
        horiz = norm(X[:, :-1] - Y[:, :-1])
        zero = np.zeros(len(X))
        return HalfSpace(2), np.stack([zero, X[:, -1]], -1), np.stack([horiz, Y[:, -1]], -1)
    raise UnsupportedDomain(f"oracle not available for {d!r}")


def heron_infimum(d: Domain, X, Y, tol: float = 1e-9, grid: int = GRID) -> np.ndarray:
    """inf over the boundary of |x - z| + |z - y| for each pair."""
    if tol <= 0:
        raise InvalidArgument("tol must be positive")
    if grid < 3:
        raise InvalidArgument("grid needs at least 3 samples")
    X = np.ascontiguousarray(np.atleast_2d(np.asarray(X, dtype=float)))
    Y = np.ascontiguousarray(np.atleast_2d(np.asarray(Y, dtype=float)))
    d2, X2, Y2 = _to_plane(d, X, Y)
    X2 = np.ascontiguousarray(X2)
    Y2 = np.ascontiguousarray(Y2)
    nb.set_num_threads(max(1, min(thread_count(), nb.config.NUMBA_NUM_THREADS)))
    best = np.full(len(X2), np.inf)
    for piece in boundary_param(d2, X2, Y2).pieces:
        best = np.minimum(best, _piece_minimum(piece, X2, Y2, tol, grid))
    return best


def s_oracle_batch(d: Domain, X: np.ndarray, Y: np.ndarray, tol: float = 1e-9, grid: int = GRID) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    dist = norm(X - Y)
    if len(dist) == 0:
        return dist
    den = heron_infimum(d, X, Y, tol, grid)
    safe = np.where(dist > 0, den, 1.0)
    # the infimum is never below |x - y|; clip rounding overshoot above 1
    return np.where(dist > 0, np.minimum(dist / safe, 1.0), 0.0)


def s_oracle(d: Domain, x, y, tol: float = 1e-9, grid: int = GRID):
    """Triangular ratio metric by direct boundary minimization."""
    if tol <= 0:
        raise InvalidArgument("tol must be positive")
    X, sx = d._checked(x)
    Y, sy = d._checked(y)
    vals = s_oracle_batch(d, X, Y, tol, grid)
    return float(vals[0]) if sx and sy else vals


# --------------------------------------------------------------------------
# triangle ratios and explicit witness families


def triangle_ratio(dfun: Callable, x, y, z) -> float:
    """d(x,y) / (d(x,z) + d(z,y)); above 1 means the triangle inequality fails."""
    num = float(dfun(x, y))
    den = float(dfun(x, z)) + float(dfun(z, y))
    if num == 0.0:
        return 0.0
    if den == 0.0:
        return math.inf
    return num / den


RECTANGLE = ConvexPolygon(((-1.0, 0.0), (1.0, 0.0), (1.0, 1.0), (-1.0, 1.0)))


def rect_points(k: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    x = np.array([0.5 + k, 0.5])
    y = np.array([-0.5, 0.5])
    z = np.array([-0.5 - k, 0.5])
    return x, y, z


def rect_quotient(k: float) -> float:
    """w(x,y) / (w(x,z) + w(z,y)) on the rectangle (-1,1) x (0,1)."""
    from .metrics import w_metric

    if not (0.0 < k < 1.0 / 3.0):
        raise InvalidArgument("k must lie in (0, 1/3)")
    x, y, z = rect_points(k)
    return triangle_ratio(lambda a, b: w_metric(RECTANGLE, a, b), x, y, z)


def rect_quotient_closed(k: float) -> float:
    return 2.0 * (1.0 - k * k) / (math.sqrt(1.0 + (1.0 + k) ** 2) * (1.0 + 3.0 * k - 2.0 * k * k))


def complement_witness(mu: float) -> tuple[float, float]:
    """(s, p) in the unit disk for the pair used to show s < p off convex complements."""
    from .metrics import point_pair, tri_ratio

    if not (0.0 < mu <= math.pi):
        raise InvalidArgument("mu must lie in (0, pi]")
    ball = UnitBall(2)
    if mu == math.pi:
        x = 0.5 * np.array([math.cos(mu / 2), math.sin(mu / 2)])
        y = 0.5 * np.array([math.cos(mu / 2), -math.sin(mu / 2)])
    else:
        c = math.cos(mu / 2)
        x = c * np.array([math.cos(mu / 2), math.sin(mu / 2)])
        y = c * np.array([math.cos(mu / 2), -math.sin(mu / 2)])
    s = tri_ratio(ball, x, y, strategy="closed_form")
    p = point_pair(ball, x, y)
    return s, p
