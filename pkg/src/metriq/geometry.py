"""Domains and the purely geometric queries the metrics are built on.

Every query accepts either a single point (shape ``(n,)``) or a batch of
points (shape ``(N, n)``); a single point gives a scalar answer.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .errors import InvalidArgument, UnsupportedDomain

TWO_PI = 2.0 * math.pi

# Absolute tie tolerance for nearest boundary points is TIE_REL * (1 + d_G(x)).
TIE_REL = 1e-9


def as_points(x, dim: int | None = None) -> tuple[np.ndarray, bool]:
    """Return ``(points as (N, n) float array, was_single_point)``."""
    a = np.asarray(x, dtype=float)
    if a.ndim not in (1, 2) or a.shape[-1] < 2:
        raise InvalidArgument(f"expected point(s) with >= 2 coordinates, got shape {a.shape}")
    if dim is not None and a.shape[-1] != dim:
        raise InvalidArgument(f"dimension mismatch: expected {dim}, got {a.shape[-1]}")
    if not np.all(np.isfinite(a)):
        raise InvalidArgument("coordinates must be finite")
    return np.atleast_2d(a), a.ndim == 1


def _unwrap(values: np.ndarray, single: bool):
    return float(values[0]) if single else values


def norm(x) -> np.ndarray:
    return np.sqrt(np.sum(np.square(x), axis=-1))


def _segment_params(p: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    ab = b - a
    return np.einsum("nkd,kd->nk", p[:, None, :] - a[None], ab) / np.sum(ab * ab, axis=-1)


def _project_to_segments(p: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Closest points on segments [a_k, b_k] to each p; shape (N, K, 2)."""
    t = np.clip(_segment_params(p, a, b), 0.0, 1.0)
    return a[None] + t[..., None] * (b - a)[None]


# --------------------------------------------------------------------------
# nearest-set containers


@dataclass(frozen=True)
class NearestSet:
    base: np.ndarray
    distance: float
    points: tuple[np.ndarray, ...]
    exhaustive: bool = True


@dataclass(frozen=True)
class TildeSet:
    """Reflections of ``base`` through its nearest boundary points.

    When the nearest set is a continuum (the ball center) ``points`` is empty
    and the set is the sphere of radius ``sphere_radius`` around ``base``.
    """

    base: np.ndarray
    points: tuple[np.ndarray, ...]
    sphere_radius: float | None = None

    def __iter__(self) -> Iterator[np.ndarray]:
        return iter(self.points)

    def __len__(self) -> int:
        return len(self.points)

    def distance_from(self, y) -> float:
        """inf over the set of |y - x~|."""
        y = np.asarray(y, dtype=float)
        if self.sphere_radius is not None:
            return abs(self.sphere_radius - float(norm(y - self.base)))
        return min(float(norm(y - p)) for p in self.points)


# --------------------------------------------------------------------------
# domains


class Domain:
    """Base class of the supported open domains."""

    dim: int = 2
    convex: bool = True

    # -- interface used by the rest of the package --
    def contains(self, x):
        pts, single = as_points(x, self.dim)
        return bool(self._contains(pts)[0]) if single else self._contains(pts)

    def boundary_distance(self, x):
        pts, single = self._checked(x)
        return _unwrap(self._boundary_distance(pts), single)

    def nearest_boundary_points(self, x) -> NearestSet:
        pts, single = self._checked(x)
        if not single:
            raise InvalidArgument("nearest_boundary_points takes a single point")
        return self._nearest(pts[0])

    def boundary_gap(self, x):
        """Distance from arbitrary point(s), inside or not, to the boundary set."""
        pts, single = as_points(x, self.dim)
        return _unwrap(self._gap(pts), single)

    def reference_point(self) -> np.ndarray:
        raise NotImplementedError

    def literal(self) -> str:
        raise NotImplementedError

    # -- helpers --
    def _checked(self, x) -> tuple[np.ndarray, bool]:
        pts, single = as_points(x, self.dim)
        inside = self._contains(pts)
        if not np.all(inside):
            bad = pts[np.argmin(inside)]
            raise InvalidArgument(f"point {bad.tolist()} is not in {self.literal()}")
        return pts, single

    def _candidates(self, pts: np.ndarray) -> np.ndarray:
        """Per-piece closest boundary points, shape (N, K, n)."""
        raise NotImplementedError

    def _clipped(self, pts: np.ndarray) -> np.ndarray:
        """Candidates whose projection landed on a piece endpoint, shape (N, K)."""
        return np.zeros(self._candidates(pts).shape[:2], dtype=bool)

    def _ties(self, pts: np.ndarray, dist: np.ndarray) -> np.ndarray:
        # A clipped candidate sits on a vertex that some other piece reaches
        # with a genuine foot; within the tolerance it would add a spurious
        # reflection, so it only counts when it is the minimizer itself.
        d = dist.min(axis=1, keepdims=True)
        near = dist <= d + TIE_REL * (1.0 + d)
        exact = dist <= d + 1e-14 * (1.0 + d)
        return near & (exact | ~self._clipped(pts))

    def _boundary_distance(self, pts: np.ndarray) -> np.ndarray:
        c = self._candidates(pts)
        return norm(c - pts[:, None, :]).min(axis=1)

    _gap = _boundary_distance

    def _nearest(self, p: np.ndarray) -> NearestSet:
        c = self._candidates(p[None])[0]
        dist = norm(c - p)
        d = float(dist.min())
        keep = self._ties(p[None], dist[None])[0]
        pts: list[np.ndarray] = []
        for m in c[keep]:
            if all(norm(m - q) > 1e-12 for q in pts):
                pts.append(m)
        return NearestSet(p.copy(), d, tuple(pts))

    def tilde_candidates(self, pts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Batched tilde points: ``(points (N, K, n), valid mask (N, K))``.

        Invalid slots mark candidate boundary points that are not global
        minimizers.
        """
        if not self.convex:
            raise UnsupportedDomain(f"tilde sets (and w) need a convex domain, got {self.literal()}")
        c = self._candidates(pts)
        valid = self._ties(pts, norm(c - pts[:, None, :]))
        return 2.0 * c - pts[:, None, :], valid

    def __str__(self) -> str:
        return self.literal()


@dataclass(frozen=True)
class HalfSpace(Domain):
    """Upper half-space {x : x_n > 0}."""

    dim: int = 2

    def __post_init__(self):
        if self.dim < 2:
            raise InvalidArgument("half-space needs n >= 2")

    def _contains(self, pts):
        return pts[:, -1] > 0.0

    def _candidates(self, pts):
        c = pts.copy()
        c[:, -1] = 0.0
        return c[:, None, :]

    def _boundary_distance(self, pts):
        return pts[:, -1].copy()

    def _gap(self, pts):
        return np.abs(pts[:, -1])

    def reference_point(self):
        e = np.zeros(self.dim)
        e[-1] = 1.0
        return e

    def literal(self):
        return f"halfspace:n={self.dim}"


@dataclass(frozen=True)
class UnitBall(Domain):
    """Open unit ball B^n."""

    dim: int = 2

    def __post_init__(self):
        if self.dim < 2:
            raise InvalidArgument("unit ball needs n >= 2")

    def _contains(self, pts):
        return norm(pts) < 1.0

    def _boundary_distance(self, pts):
        return 1.0 - norm(pts)

    def _gap(self, pts):
        return np.abs(1.0 - norm(pts))

    def _nearest(self, p):
        r = float(norm(p))
        if r == 0.0:
            return NearestSet(p.copy(), 1.0, (), exhaustive=False)
        return NearestSet(p.copy(), 1.0 - r, (p / r,))

    def tilde_candidates(self, pts):
        r = norm(pts)
        safe = np.where(r > 0.0, r, 1.0)
        tilde = pts * ((2.0 - r) / safe)[:, None]
        return tilde[:, None, :], (r > 0.0)[:, None]

    def reference_point(self):
        return np.zeros(self.dim)

    def literal(self):
        return f"ball:n={self.dim}"


@dataclass(frozen=True)
class Sector(Domain):
    """Open planar sector {z : 0 < arg z < theta}."""

    theta: float = math.pi / 2
    dim: int = field(default=2, init=False)

    def __post_init__(self):
        if not (0.0 < self.theta < TWO_PI):
            raise InvalidArgument(f"sector angle must lie in (0, 2pi), got {self.theta}")

    @property
    def convex(self) -> bool:  # type: ignore[override]
        return self.theta <= math.pi

    @property
    def rays(self) -> np.ndarray:
        """Unit directions of the two boundary rays."""
        return np.array([[1.0, 0.0], [math.cos(self.theta), math.sin(self.theta)]])

    def _contains(self, pts):
        arg = polar_angle(pts)
        return (arg > 0.0) & (arg < self.theta) & (norm(pts) > 0.0)

    def _candidates(self, pts):
        u = self.rays
        t = np.maximum(pts @ u.T, 0.0)
        return t[..., None] * u[None]

    def _clipped(self, pts):
        return pts @ self.rays.T <= 0.0

    def reference_point(self):
        return np.array([math.cos(self.theta / 2), math.sin(self.theta / 2)])

    def literal(self):
        return f"sector:theta={self.theta!r}"


@dataclass(frozen=True)
class ConvexPolygon(Domain):
    """Bounded strictly convex polygon; vertices counterclockwise."""

    vertices: tuple[tuple[float, float], ...] = ()
    dim: int = field(default=2, init=False)

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or len(v) < 3:
            raise InvalidArgument("polygon needs at least 3 planar vertices")
        if not np.all(np.isfinite(v)):
            raise InvalidArgument("polygon vertices must be finite")
        e = np.roll(v, -1, axis=0) - v
        turn = e[:, 0] * np.roll(e, -1, axis=0)[:, 1] - e[:, 1] * np.roll(e, -1, axis=0)[:, 0]
        scale = np.max(norm(e)) ** 2
        if np.any(turn <= 1e-12 * scale):
            raise InvalidArgument("polygon must be strictly convex and counterclockwise")
        object.__setattr__(self, "vertices", tuple(tuple(map(float, p)) for p in v))

    @property
    def vertex_array(self) -> np.ndarray:
        return np.asarray(self.vertices, dtype=float)

    def _edges(self):
        a = self.vertex_array
        return a, np.roll(a, -1, axis=0)

    def _contains(self, pts):
        a, b = self._edges()
        e = b - a
        cross = e[None, :, 0] * (pts[:, None, 1] - a[None, :, 1]) - e[None, :, 1] * (
            pts[:, None, 0] - a[None, :, 0]
        )
        return np.all(cross > 0.0, axis=1)

    def _candidates(self, pts):
        a, b = self._edges()
        return _project_to_segments(pts, a, b)

    def _clipped(self, pts):
        t = _segment_params(pts, *self._edges())
        return (t <= 0.0) | (t >= 1.0)

    def reference_point(self):
        return self.vertex_array.mean(axis=0)

    def literal(self):
        return "polygon:" + ";".join(f"({x!r},{y!r})" for x, y in self.vertices)


@dataclass(frozen=True)
class PuncturedPlane(Domain):
    """The plane with finitely many points removed."""

    punctures: tuple[tuple[float, float], ...] = ()
    dim: int = field(default=2, init=False)
    convex = False

    def __post_init__(self):
        s = np.asarray(self.punctures, dtype=float)
        if s.ndim != 2 or s.shape[1] != 2 or len(s) < 1:
            raise InvalidArgument("punctured plane needs at least one planar puncture")
        if not np.all(np.isfinite(s)):
            raise InvalidArgument("punctures must be finite")
        for i in range(len(s)):
            for j in range(i):
                if np.array_equal(s[i], s[j]):
                    raise InvalidArgument("punctures must be pairwise distinct")
        object.__setattr__(self, "punctures", tuple(tuple(map(float, p)) for p in s))

    @property
    def puncture_array(self) -> np.ndarray:
        return np.asarray(self.punctures, dtype=float)

    def _contains(self, pts):
        return np.all(norm(pts[:, None, :] - self.puncture_array[None]) > 0.0, axis=1)

    def _candidates(self, pts):
        return np.broadcast_to(self.puncture_array, (len(pts),) + self.puncture_array.shape)

    @property
    def scale(self) -> float:
        s = self.puncture_array
        spread = np.max(norm(s[:, None, :] - s[None])) if len(s) > 1 else 0.0
        return max(1.0, float(spread))

    def reference_point(self):
        s = self.puncture_array
        ref = s.mean(axis=0) + self.scale * np.array([0.5, 0.25])
        while np.any(norm(s - ref) == 0.0):
            ref = ref + 0.1 * self.scale
        return ref

    def literal(self):
        return "punctured:" + ";".join(f"({x!r},{y!r})" for x, y in self.punctures)


# --------------------------------------------------------------------------
# operations


def contains(d: Domain, x):
    return d.contains(x)


def boundary_distance(d: Domain, x):
    return d.boundary_distance(x)


def nearest_boundary_points(d: Domain, x) -> NearestSet:
    return d.nearest_boundary_points(x)


def tilde_set(d: Domain, x) -> TildeSet:
    """Points at distance 2 d_G(x) from x whose midpoint with x lies on the boundary."""
    if not d.convex:
        raise UnsupportedDomain(f"tilde sets need a convex domain, got {d.literal()}")
    ns = d.nearest_boundary_points(x)
    if not ns.exhaustive:
        return TildeSet(ns.base, (), sphere_radius=2.0 * ns.distance)
    return TildeSet(ns.base, tuple(2.0 * m - ns.base for m in ns.points))


def polar_angle(pts: np.ndarray) -> np.ndarray:
    """Argument in [0, 2pi)."""
    arg = np.arctan2(pts[..., 1], pts[..., 0])
    return np.where(arg < 0.0, arg + TWO_PI, arg)


def reflect_across_line(x, a, b) -> np.ndarray:
    x, a, b = (np.asarray(v, dtype=float) for v in (x, a, b))
    u = b - a
    uu = float(u @ u)
    if uu == 0.0:
        raise InvalidArgument("line needs two distinct points")
    foot = a + (((x - a) @ u) / uu) * u
    return 2.0 * foot - x


def sector_power_map(theta: float, x) -> np.ndarray:
    """z -> z^(pi/theta) on the branch with arg in (0, theta); lands in H^2."""
    pts, single = as_points(x, 2)
    if not np.all(Sector(theta)._contains(pts)):
        raise InvalidArgument("sector power map needs points inside the sector")
    k = math.pi / theta
    r = norm(pts) ** k
    phi = polar_angle(pts) * k
    out = np.stack([r * np.cos(phi), r * np.sin(phi)], axis=-1)
    return out[0] if single else out


def sector_power_map_inverse(theta: float, w) -> np.ndarray:
    """Inverse of :func:`sector_power_map`; maps H^2 back into the sector."""
    pts, single = as_points(w, 2)
    if not np.all(pts[:, 1] > 0.0):
        raise InvalidArgument("inverse power map needs points in the upper half-plane")
    k = theta / math.pi
    r = norm(pts) ** k
    phi = polar_angle(pts) * k
    out = np.stack([r * np.cos(phi), r * np.sin(phi)], axis=-1)
    return out[0] if single else out


def plane_reduce_batch(X: np.ndarray, Y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Planar coordinates of (x, y) in the 2-plane through x, y and the origin.

    x is sent to the nonnegative first axis and y to the closed upper half-plane.
    """
    nx = norm(X)
    ny = norm(Y)
    e1 = np.zeros_like(X)
    e1[:, 0] = 1.0
    use_x = nx > 0.0
    use_y = ~use_x & (ny > 0.0)
    e1[use_x] = X[use_x] / nx[use_x, None]
    e1[use_y] = Y[use_y] / ny[use_y, None]
    x1 = np.sum(X * e1, axis=-1)
    y1 = np.sum(Y * e1, axis=-1)
    y2 = norm(Y - y1[:, None] * e1)
    zeros = np.zeros_like(x1)
    return np.stack([x1, zeros], axis=-1), np.stack([y1, y2], axis=-1)


def plane_reduce(x, y) -> tuple[np.ndarray, np.ndarray]:
    X, sx = as_points(x)
    Y, sy = as_points(y, X.shape[-1])
    a, b = plane_reduce_batch(X, Y)
    if sx and sy:
        return a[0], b[0]
    return a, b


def invert(x) -> np.ndarray:
    """x / |x|^2 (inversion in the unit sphere)."""
    pts, single = as_points(x)
    r2 = np.sum(pts * pts, axis=-1)
    if np.any(r2 == 0.0):
        raise InvalidArgument("inversion is undefined at the origin")
    out = pts / r2[:, None]
    return out[0] if single else out


# --------------------------------------------------------------------------
# literal syntax

_NUM = r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?"
_PAIR = re.compile(rf"\(\s*({_NUM})\s*,\s*({_NUM})\s*\)")


def _parse_pairs(body: str) -> list[tuple[float, float]]:
    parts = [p.strip() for p in body.split(";")]
    out = []
    for p in parts:
        m = _PAIR.fullmatch(p)
        if not m:
            raise InvalidArgument(f"bad point literal {p!r}")
        out.append((float(m.group(1)), float(m.group(2))))
    return out


def parse_domain(text: str) -> Domain:
    """Parse ``halfspace:n=2``, ``ball:n=3``, ``sector:theta=2.0``,
    ``polygon:(x,y);...`` or ``punctured:(x,y);...``."""
    kind, sep, body = text.strip().partition(":")
    if not sep:
        raise InvalidArgument(f"bad domain literal {text!r}")
    try:
        if kind in ("halfspace", "ball"):
            m = re.fullmatch(r"n=(\d+)", body.strip())
            if not m:
                raise InvalidArgument(f"bad domain literal {text!r}")
            n = int(m.group(1))
            return HalfSpace(n) if kind == "halfspace" else UnitBall(n)
        if kind == "sector":
            m = re.fullmatch(rf"theta=({_NUM})", body.strip())
            if not m:
                raise InvalidArgument(f"bad domain literal {text!r}")
            return Sector(float(m.group(1)))
        if kind == "polygon":
            return ConvexPolygon(tuple(_parse_pairs(body)))
        if kind == "punctured":
            return PuncturedPlane(tuple(_parse_pairs(body)))
    except ValueError as exc:
        raise InvalidArgument(str(exc)) from exc
    raise InvalidArgument(f"unknown domain kind {kind!r}")


def format_domain(d: Domain) -> str:
    return d.literal()
