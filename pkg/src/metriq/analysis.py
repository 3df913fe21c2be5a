"""Numerical experiments on top of the metric layer.

Quasi-metric constant searches, inequality sweeps, the extremal quotients of
the unit disk and the data behind the s/w figure.  Every random quantity is
drawn from ``numpy.random.default_rng(seed)``; identical seeds give identical
reports.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import metrics as M
from .errors import InvalidArgument, UnsupportedDomain
from .geometry import ConvexPolygon, Domain, HalfSpace, PuncturedPlane, Sector, UnitBall, norm
from .oracle import RECTANGLE, rect_points, s_oracle_batch, triangle_ratio

SQRT2 = math.sqrt(2.0)
SAMPLING_RADIUS = 8.0
TOP_K = 32
STEP0 = 0.1
STEP_MIN = 1e-9
GAIN = 1e-15  # relative gain below which a move counts as no improvement
METRIC_TOL = 1e-9
# restricted pair searches stay within this radius: closer to the circle
# 2 - |x| - |y| cancels and the quotients only measure rounding noise
RESTRICT_RMAX = 0.999
MAX_ITER = 500

# closed expressions for the perpendicular equal-modulus pair in the disk
SPECIAL_H0 = (1.0 - math.sqrt(9.0 - 6.0 * SQRT2)) / (2.0 - SQRT2)
SPECIAL_C = math.sqrt((SPECIAL_H0**2 - 2.0 * SPECIAL_H0 + 2.0) / (2.0 * SPECIAL_H0**2 - 2.0 * SQRT2 * SPECIAL_H0 + 2.0))
SPECIAL_BRANCH = math.sqrt(2.5 - SQRT2)

DISK = UnitBall(2)


def _vec(p) -> list[float]:
    return [float(c) for c in np.asarray(p, dtype=float)]


# --------------------------------------------------------------------------
# reports


@dataclass(frozen=True)
class TripleWitness:
    x: np.ndarray
    y: np.ndarray
    z: np.ndarray
    ratio: float
    metric: M.MetricId
    domain: Domain

    def recompute(self, tol: float = 1e-9) -> float:
        f = M.evaluator(self.metric.kind, self.metric.strategy, tol)
        return triangle_ratio(lambda a, b: f(self.domain, a, b), self.x, self.y, self.z)

    def to_dict(self) -> dict:
        return {
            "domain": self.domain.literal(),
            "metric": self.metric.kind,
            "estimate": self.ratio,
            "witness": {"x": _vec(self.x), "y": _vec(self.y), "z": _vec(self.z)},
        }


@dataclass(frozen=True)
class SweepReport:
    inequality: str
    domain: Domain
    n_samples: int
    worst_margin: float
    witness: tuple[np.ndarray, ...]
    seed: int
    passed: bool
    tol: float
    metric: str = ""
    estimate: float | None = None
    terms: dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        names = ("x", "y", "z")
        return {
            "domain": self.domain.literal(),
            "metric": self.metric or self.inequality,
            "seed": self.seed,
            "n_samples": self.n_samples,
            "estimate": self.estimate,
            "witness": {k: _vec(p) for k, p in zip(names, self.witness)},
            "margin": self.worst_margin,
            "pass": self.passed,
            "details": {"inequality": self.inequality, "tol": self.tol, "terms": dict(self.terms)},
        }


@dataclass(frozen=True)
class ExtremumReport:
    quotient: str
    domain: Domain
    estimate: float
    witness: tuple[np.ndarray, ...]
    trace_length: int
    seed: int | None = None
    n_samples: int | None = None
    exploratory: bool = False
    extra: dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        names = ("x", "y", "z")
        return {
            "domain": self.domain.literal(),
            "metric": self.quotient,
            "seed": self.seed,
            "n_samples": self.n_samples,
            "estimate": self.estimate,
            "witness": {k: _vec(p) for k, p in zip(names, self.witness)},
            "margin": None,
            "pass": True,
            "details": {"exploratory": self.exploratory, "trace_length": self.trace_length, **self.extra},
        }


# --------------------------------------------------------------------------
# sampling


def _sampling_region(d: Domain) -> tuple[np.ndarray, float, bool]:
    """(center, half width, is a round region) of the sampling window."""
    if isinstance(d, UnitBall):
        return np.zeros(d.dim), 1.0, False
    if isinstance(d, ConvexPolygon):
        v = d.vertex_array
        lo, hi = v.min(axis=0), v.max(axis=0)
        return (lo + hi) / 2, float(np.max(hi - lo)) / 2, False
    scale = d.scale if isinstance(d, PuncturedPlane) else 1.0
    return d.reference_point(), SAMPLING_RADIUS * scale, True


def sample_points(d: Domain, n: int, rng: np.random.Generator) -> np.ndarray:
    """n points uniform in the domain (inside a radius-8 window when unbounded)."""
    center, half, round_ = _sampling_region(d)
    out = np.empty((0, d.dim))
    while len(out) < n:
        need = n - len(out)
        cand = center + rng.uniform(-half, half, size=(max(2 * need, 256), d.dim))
        ok = d._contains(cand)
        if round_:
            ok &= norm(cand - center) < half
        out = np.concatenate([out, cand[ok]])
    return out[:n]


def project_inside(d: Domain, pts: np.ndarray) -> np.ndarray:
    """Pull points that left the domain back along the segment to the reference point."""
    pts = np.asarray(pts, dtype=float)
    flat = pts.reshape(-1, d.dim)
    bad = ~d._contains(flat)
    if not np.any(bad):
        return pts
    ref = d.reference_point()
    p = flat[bad]
    lo = np.zeros(len(p))  # inside
    hi = np.ones(len(p))  # outside
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        inside = d._contains(ref + mid[:, None] * (p - ref))
        lo = np.where(inside, mid, lo)
        hi = np.where(inside, hi, mid)
    out = flat.copy()
    out[bad] = ref + lo[:, None] * (p - ref)
    return out.reshape(pts.shape)


# --------------------------------------------------------------------------
# pattern search


def _raised(f: np.ndarray) -> np.ndarray:
    """Threshold a trial value must beat to count as an improvement."""
    with np.errstate(invalid="ignore"):
        return np.where(np.isfinite(f), f + GAIN * np.maximum(1.0, np.abs(f)), f)


def _explore(objective, project, cur, fcur, h, rows):
    """One coordinate sweep (+h, then -h where +h failed) on the given rows."""
    cur, fcur = cur.copy(), fcur.copy()
    evals = 0
    for j in range(cur.shape[1]):
        todo = rows.copy()
        for sign in (1.0, -1.0):
            idx = np.nonzero(todo)[0]
            if len(idx) == 0:
                break
            T = cur[idx].copy()
            T[:, j] += sign * h[idx]
            if project is not None:
                T = project(T)
            vt = objective(T)
            evals += 1
            better = vt > _raised(fcur[idx])
            cur[idx[better]] = T[better]
            fcur[idx[better]] = vt[better]
            todo[idx[better]] = False
    return cur, fcur, evals


def pattern_search(
    objective: Callable[[np.ndarray], np.ndarray],
    P: np.ndarray,
    project: Callable[[np.ndarray], np.ndarray] | None = None,
    step0: float = STEP0,
    step_min: float = STEP_MIN,
    max_iter: int = MAX_ITER,
) -> tuple[np.ndarray, np.ndarray, int]:
    """Maximize ``objective`` from every row of ``P`` (Hooke-Jeeves).

    Each row keeps its own step, halved from ``step0`` down to ``step_min``
    whenever a coordinate sweep around the current base finds nothing better.
    Successful sweeps are followed by pattern moves along the last
    displacement.  Bases only move to strictly better points, so the tracked
    values never decrease.  Returns (points, values, batched evaluations).
    """
    base = np.array(P, dtype=float)
    fb = objective(base)
    prev = base.copy()
    h = np.full(len(base), float(step0))
    evals = 1
    for _ in range(max_iter):
        active = h >= step_min
        if not np.any(active):
            break
        momentum = active & np.any(base != prev, axis=1)
        start, fs = base.copy(), fb.copy()
        if np.any(momentum):
            idx = np.nonzero(momentum)[0]
            T = 2.0 * base[idx] - prev[idx]
            if project is not None:
                T = project(T)
            start[idx] = T
            fs[idx] = objective(T)
            evals += 1
        new, fn, k = _explore(objective, project, start, fs, h, active)
        evals += k
        better = active & (fn > _raised(fb))
        prev[better] = base[better]
        base[better] = new[better]
        fb[better] = fn[better]
        failed = active & ~better
        prev[failed & momentum] = base[failed & momentum]
        h[failed & ~momentum] /= 2.0
    return base, fb, evals


def _top(values: np.ndarray, k: int) -> np.ndarray:
    """Indices of the k largest values; ties go to the lower index."""
    order = np.argsort(-values, kind="stable")
    return order[: min(k, len(order))]


# --------------------------------------------------------------------------
# triangle-ratio searches


def _batched_metric(d: Domain, metric: M.MetricId, tol: float):
    f = M.evaluator(metric.kind, metric.strategy, tol)
    return lambda X, Y: np.asarray(f(d, X, Y), dtype=float)


def _triangle_ratios(f, X, Y, Z) -> np.ndarray:
    num = f(X, Y)
    den = f(X, Z) + f(Z, Y)
    with np.errstate(divide="ignore", invalid="ignore"):
        r = num / den
    return np.where(np.isfinite(r) & (num > 0), r, -np.inf)


def _triple_search(
    d: Domain,
    metric: M.MetricId,
    n_samples: int,
    seed: int,
    seeds: Sequence[Sequence] = (),
    refine: bool = True,
    top_k: int = TOP_K,
    tol: float = METRIC_TOL,
) -> tuple[TripleWitness, int]:
    if n_samples < 1:
        raise InvalidArgument("n_samples must be at least 1")
    n = d.dim
    rng = np.random.default_rng(seed)
    pts = sample_points(d, 3 * n_samples, rng).reshape(n_samples, 3 * n)
    if seeds:
        extra = np.array([np.concatenate([np.asarray(p, float) for p in t]) for t in seeds])
        pts = np.concatenate([pts, extra])
    f = _batched_metric(d, metric, tol)

    def objective(P):
        return _triangle_ratios(f, P[:, :n], P[:, n : 2 * n], P[:, 2 * n :])

    ratios = objective(pts)
    idx = _top(ratios, top_k)
    cand, vals = pts[idx], ratios[idx]
    if refine:
        project = lambda P: project_inside(d, P.reshape(-1, 3, n)).reshape(P.shape)
        cand, vals, _ = pattern_search(objective, cand, project)
    b = int(_top(vals, 1)[0])
    best = cand[b]
    x, y, z = best[:n], best[n : 2 * n], best[2 * n :]
    w = TripleWitness(x, y, z, 0.0, metric, d)
    w = TripleWitness(x, y, z, w.recompute(tol), metric, d)
    return w, len(pts)


def quasi_constant(
    d: Domain,
    m: M.MetricId | str,
    n_samples: int,
    seed: int,
    seeds: Sequence[Sequence] = (),
    refine: bool = True,
    tol: float = METRIC_TOL,
) -> TripleWitness:
    """Largest triangle ratio found: a lower bound on the quasi-metric constant."""
    metric = M.MetricId.from_name(m) if isinstance(m, str) else m
    seeds = list(seeds) + known_witnesses(d, metric)
    w, _ = _triple_search(d, metric, n_samples, seed, seeds, refine, tol=tol)
    return w


def known_witnesses(d: Domain, metric: M.MetricId) -> list:
    """Hand-built triples that sit near a known extremal configuration.

    The rectangle family puts y on a three-way tie of nearest sides, which
    random sampling never hits.
    """
    if metric.kind == "w" and d == RECTANGLE:
        return [rect_points(k) for k in (0.05, 0.01, 1e-3)]
    return []


def sector_probe_triple(theta: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Points at 2/5 and 3/5 of the opening on the unit circle, and their midpoint."""
    x = np.array([math.cos(0.4 * theta), math.sin(0.4 * theta)])
    y = np.array([math.cos(0.6 * theta), math.sin(0.6 * theta)])
    return x, y, (x + y) / 2


def metric_check(
    d: Domain,
    m: M.MetricId | str,
    n_samples: int,
    seed: int,
    seeds: Sequence[Sequence] = (),
    refine: bool = True,
    tol: float = 1e-9,
) -> SweepReport:
    """Search for triangle-inequality failures; passes iff the largest ratio is <= 1 + tol."""
    metric = M.MetricId.from_name(m) if isinstance(m, str) else m
    w, count = _triple_search(d, metric, n_samples, seed, seeds, refine)
    margin = 1.0 - w.ratio
    return SweepReport(
        inequality=f"{metric.kind}-metric",
        domain=d,
        n_samples=n_samples,
        worst_margin=margin,
        witness=(w.x, w.y, w.z),
        seed=seed,
        passed=margin >= -tol,
        tol=tol,
        metric=metric.kind,
        estimate=w.ratio,
        terms={"triangle": margin},
    )


def metric_check_sector(theta: float, n_samples: int, seed: int, refine: bool = True) -> SweepReport:
    """Triangle-inequality check of the point pair function in a sector."""
    d = Sector(theta)
    return metric_check(d, "pp", n_samples, seed, seeds=[sector_probe_triple(theta)], refine=refine)


# --------------------------------------------------------------------------
# inequality sweeps


def _needs_convex(d: Domain) -> bool:
    return d.convex


def _hyperbolic(d: Domain) -> bool:
    return isinstance(d, (HalfSpace, UnitBall))


def _disk(d: Domain) -> bool:
    return isinstance(d, UnitBall)


def _halfspace(d: Domain) -> bool:
    return isinstance(d, HalfSpace)


# id -> (domain check, description, metrics needed, margin terms)
SELECTORS: dict[str, tuple] = {
    "L23a": (lambda d: True, "j* <= p <= sqrt2 j*", ("jstar", "pp"),
             (("p - j*", lambda v: v["pp"] - v["jstar"]), ("sqrt2 j* - p", lambda v: SQRT2 * v["jstar"] - v["pp"]))),
    "L23b": (lambda d: True, "j* <= s <= 2 j*", ("jstar", "sratio"),
             (("s - j*", lambda v: v["sratio"] - v["jstar"]), ("2 j* - s", lambda v: 2.0 * v["jstar"] - v["sratio"]))),
    "L23c": (_needs_convex, "s <= sqrt2 j* (convex)", ("jstar", "sratio"),
             (("sqrt2 j* - s", lambda v: SQRT2 * v["jstar"] - v["sratio"]),)),
    "L24": (_hyperbolic, "th(rho/4) <= j* <= s <= p <= th(rho/2) <= 2 th(rho/4)",
            ("jstar", "sratio", "pp", "th_half_rho", "th_quarter_rho"),
            (("j* - th4", lambda v: v["jstar"] - v["th_quarter_rho"]),
             ("s - j*", lambda v: v["sratio"] - v["jstar"]),
             ("p - s", lambda v: v["pp"] - v["sratio"]),
             ("th2 - p", lambda v: v["th_half_rho"] - v["pp"]),
             ("2 th4 - th2", lambda v: 2.0 * v["th_quarter_rho"] - v["th_half_rho"]))),
    "C48": (_needs_convex, "j* <= w <= s <= p (convex)", ("jstar", "w", "sratio", "pp"),
            (("w - j*", lambda v: v["w"] - v["jstar"]),
             ("s - w", lambda v: v["sratio"] - v["w"]),
             ("p - s", lambda v: v["pp"] - v["sratio"]))),
    "C49": (_hyperbolic, "th(rho/4) <= j* <= w <= s <= p <= th(rho/2) <= 2 th(rho/4)",
            ("jstar", "w", "sratio", "pp", "th_half_rho", "th_quarter_rho"),
            (("j* - th4", lambda v: v["jstar"] - v["th_quarter_rho"]),
             ("w - j*", lambda v: v["w"] - v["jstar"]),
             ("s - w", lambda v: v["sratio"] - v["w"]),
             ("p - s", lambda v: v["pp"] - v["sratio"]),
             ("th2 - p", lambda v: v["th_half_rho"] - v["pp"]),
             ("2 th4 - th2", lambda v: 2.0 * v["th_quarter_rho"] - v["th_half_rho"]))),
    "EQH": (_halfspace, "w = s = p = th(rho/2) (half-space)", ("w", "sratio", "pp", "th_half_rho"),
            (("-|w - s|", lambda v: -np.abs(v["w"] - v["sratio"])),
             ("-|s - p|", lambda v: -np.abs(v["sratio"] - v["pp"])),
             ("-|p - th2|", lambda v: -np.abs(v["pp"] - v["th_half_rho"])))),
    "T46": (_needs_convex, "w <= s <= sqrt2 w (convex)", ("w", "sratio"),
            (("s - w", lambda v: v["sratio"] - v["w"]), ("sqrt2 w - s", lambda v: SQRT2 * v["w"] - v["sratio"]))),
    "T510": (_disk, "w <= p <= sqrt2 w (ball)", ("w", "pp"),
             (("p - w", lambda v: v["pp"] - v["w"]), ("sqrt2 w - p", lambda v: SQRT2 * v["w"] - v["pp"]))),
    "T511": (_disk, "j* <= w <= sqrt2 j* (ball)", ("jstar", "w"),
             (("w - j*", lambda v: v["w"] - v["jstar"]), ("sqrt2 j* - w", lambda v: SQRT2 * v["jstar"] - v["w"]))),
    "T57": (_disk, "w <= s (ball), equality for pairs collinear with the origin", ("w", "sratio"),
            (("s - w", lambda v: v["sratio"] - v["w"]),)),
}


def _metric_values(d: Domain, kinds, X, Y, s_strategy, s_tol) -> dict[str, np.ndarray]:
    vals = {}
    for k in kinds:
        if k == "sratio":
            vals[k] = np.asarray(M.tri_ratio(d, X, Y, strategy=s_strategy, tol=s_tol), dtype=float)
        else:
            vals[k] = np.asarray(M.evaluator(k)(d, X, Y), dtype=float)
    return vals


def _collinear_pairs(d: UnitBall, n: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    u = rng.normal(size=(n, d.dim))
    u /= norm(u)[:, None]
    a = rng.uniform(-1.0, 1.0, size=n)
    b = rng.uniform(-1.0, 1.0, size=n)
    return a[:, None] * u, b[:, None] * u


def inequality_sweep(
    d: Domain,
    selector: str,
    n_samples: int,
    seed: int,
    tol: float = 1e-9,
    s_strategy: str | None = None,
    s_tol: float = 1e-9,
) -> SweepReport:
    """Check an inequality chain on seeded random pairs; record the worst margin."""
    if selector not in SELECTORS:
        raise InvalidArgument(f"unknown inequality selector {selector!r}; choose from {sorted(SELECTORS)}")
    check, _, kinds, terms = SELECTORS[selector]
    if not check(d):
        raise InvalidArgument(f"selector {selector} does not apply to {d.literal()}")
    if n_samples < 1:
        raise InvalidArgument("n_samples must be at least 1")
    rng = np.random.default_rng(seed)
    pts = sample_points(d, 2 * n_samples, rng)
    X, Y = pts[:n_samples], pts[n_samples:]
    try:
        vals = _metric_values(d, kinds, X, Y, s_strategy, s_tol)
    except UnsupportedDomain as exc:
        raise InvalidArgument(str(exc)) from exc
    margins = [t(vals) for _, t in terms]
    labels = [label for label, _ in terms]
    per_sample = np.min(margins, axis=0)
    if selector == "T57":
        cx, cy = _collinear_pairs(d, n_samples, rng)
        eq = -np.abs(s_oracle_batch(d, cx, cy, s_tol) - np.asarray(M.w_metric(d, cx, cy)))
        margins.append(eq)
        labels.append("-|s - w| (collinear)")
        per_sample = np.concatenate([per_sample, eq])
        X = np.concatenate([X, cx])
        Y = np.concatenate([Y, cy])
    i = int(np.argmin(per_sample))
    worst = float(per_sample[i])
    return SweepReport(
        inequality=selector,
        domain=d,
        n_samples=n_samples,
        worst_margin=worst,
        witness=(X[i], Y[i]),
        seed=seed,
        passed=worst >= -tol,
        tol=tol,
        terms={lab: float(row.min()) for lab, row in zip(labels, margins)},
    )


# --------------------------------------------------------------------------
# unit disk extremal quotients


def special_case_quotient(h):
    """s/w in the disk at x = h, y = i h."""
    h = np.atleast_1d(np.asarray(h, dtype=float))
    X = np.stack([h, np.zeros_like(h)], -1)
    Y = np.stack([np.zeros_like(h), h], -1)
    q = np.asarray(M.tri_ratio(DISK, X, Y, strategy="closed_form")) / np.asarray(M.w_metric(DISK, X, Y))
    return q


def golden_max(f: Callable[[float], float], lo: float, hi: float, xtol: float = 1e-12) -> tuple[float, float, int]:
    """Golden-section maximization of a unimodal f on [lo, hi]; returns (argmax, max, steps)."""
    r = (math.sqrt(5.0) - 1.0) / 2.0
    c, e = hi - r * (hi - lo), lo + r * (hi - lo)
    fc, fe = f(c), f(e)
    steps = 0
    while hi - lo > xtol:
        if fc > fe:
            hi, e, fe = e, c, fc
            c = hi - r * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, e, fe
            e = lo + r * (hi - lo)
            fe = f(e)
        steps += 1
    return (c, fc, steps) if fc > fe else (e, fe, steps)


def special_case_extremum(grid: int = 4096) -> ExtremumReport:
    """Maximize s/w over the perpendicular equal-modulus pairs (h, i h) of the disk."""
    h = (np.arange(grid) + 0.5) / grid
    q = special_case_quotient(h)
    i = int(np.argmax(q))
    lo, hi = max(h[i] - 1.0 / grid, 1e-12), min(h[i] + 1.0 / grid, 1.0 - 1e-12)
    h0, c, steps = golden_max(lambda t: float(special_case_quotient(t)[0]), lo, hi)
    branch = float(special_case_quotient(1.0 / SQRT2)[0])
    return ExtremumReport(
        quotient="s/w",
        domain=DISK,
        estimate=c,
        witness=(np.array([h0, 0.0]), np.array([0.0, h0])),
        trace_length=steps,
        extra={"argmax_h": h0, "branch_value": branch},
    )


def _pair_params(restrict: str | None):
    """(dimension, params -> (X, Y), projection) for a search space over disk pairs."""
    if restrict is None:
        def to_pair(P):
            return P[:, :2], P[:, 2:]

        def project(P):
            return project_inside(DISK, P.reshape(-1, 2, 2)).reshape(P.shape)

        return 4, to_pair, project
    if restrict in ("collinear", "same_ray"):
        lo = -1.0 if restrict == "collinear" else 0.0

        def to_pair(P):
            u = np.stack([np.cos(P[:, 2]), np.sin(P[:, 2])], -1)
            return P[:, :1] * u, P[:, 1:2] * u

        def project(P):
            P = P.copy()
            P[:, :2] = np.clip(P[:, :2], -RESTRICT_RMAX if lo < 0 else lo, RESTRICT_RMAX)
            return P

        return 3, to_pair, project
    raise InvalidArgument(f"unknown restriction {restrict!r}")


def _sample_params(restrict, n, rng):
    if restrict is None:
        return sample_points(DISK, 2 * n, rng).reshape(n, 4)
    lo = -RESTRICT_RMAX if restrict == "collinear" else 0.0
    ab = rng.uniform(lo, RESTRICT_RMAX, size=(n, 2))
    phi = rng.uniform(0.0, 2.0 * math.pi, size=(n, 1))
    return np.concatenate([ab, phi], axis=1)


def conjecture_sw_search(
    n_samples: int,
    seed: int,
    quotient: str = "s/w",
    restrict: str | None = None,
    init: Sequence[Sequence] = (),
    refine: bool = True,
    tol: float = 1e-8,
    top_k: int = TOP_K,
) -> ExtremumReport:
    """Largest s/w (or p/w) found over pairs of the disk; exploratory evidence only.

    ``restrict`` limits the search to pairs collinear with the origin
    ("collinear") or on one ray from it ("same_ray").  ``init`` adds starting
    pairs given as (x, y) in the free space.
    """
    if n_samples < 1:
        raise InvalidArgument("n_samples must be at least 1")
    if quotient not in ("s/w", "p/w"):
        raise InvalidArgument(f"unknown quotient {quotient!r}")
    dim, to_pair, project = _pair_params(restrict)
    rng = np.random.default_rng(seed)
    P = _sample_params(restrict, n_samples, rng)
    if init:
        if restrict is not None:
            raise InvalidArgument("init pairs are only supported for the free search")
        P = np.concatenate([P, np.array([np.concatenate([np.asarray(a, float), np.asarray(b, float)]) for a, b in init])])

    def objective(Q):
        X, Y = to_pair(Q)
        ok = norm(X - Y) > 0.0
        out = np.full(len(Q), -np.inf)
        if not np.any(ok):
            return out
        w = np.asarray(M.w_metric(DISK, X[ok], Y[ok]))
        if quotient == "s/w":
            top = s_oracle_batch(DISK, X[ok], Y[ok], tol)
        else:
            top = np.asarray(M.point_pair(DISK, X[ok], Y[ok]))
        out[ok] = top / w
        return out

    vals = objective(P)
    idx = _top(vals, top_k)
    cand, cvals = P[idx], vals[idx]
    evals = 1
    if refine:
        cand, cvals, evals = pattern_search(objective, cand, project)
    b = int(_top(cvals, 1)[0])
    X, Y = to_pair(cand[b : b + 1])
    return ExtremumReport(
        quotient=quotient,
        domain=DISK,
        estimate=float(cvals[b]),
        witness=(X[0], Y[0]),
        trace_length=evals,
        seed=seed,
        n_samples=n_samples,
        exploratory=True,
        extra={"restrict": restrict or "none"},
    )


def sw_quotient(x, y, tol: float = 1e-8) -> float:
    """s/w in the disk with s from the boundary oracle."""
    X = np.atleast_2d(np.asarray(x, dtype=float))
    Y = np.atleast_2d(np.asarray(y, dtype=float))
    return float(s_oracle_batch(DISK, X, Y, tol)[0] / np.asarray(M.w_metric(DISK, X, Y))[0])


@dataclass(frozen=True)
class FigureGrid:
    x_fixed: float
    resolution: int
    re: np.ndarray
    im: np.ndarray
    quotient: np.ndarray  # nan on empty cells

    def rows(self):
        for a, b, q in zip(self.re.ravel(), self.im.ravel(), self.quotient.ravel()):
            yield float(a), float(b), (None if math.isnan(q) else float(q))

    def to_csv(self) -> str:
        lines = ["re_y,im_y,quotient"]
        for a, b, q in self.rows():
            lines.append(f"{a:.9g},{b:.9g}," + ("" if q is None else f"{q:.9g}"))
        return "\n".join(lines) + "\n"


def figure1_grid(x_fixed: float, resolution: int, tol: float = 1e-8) -> FigureGrid:
    """s/w over a grid of y in the disk for fixed real x.

    Grid coordinates are (2i - resolution) / resolution, so the real axis and
    (for suitable x) the cell y = x are on the grid.
    """
    if not (0.0 < x_fixed < 1.0):
        raise InvalidArgument("x_fixed must lie in (0, 1)")
    if resolution < 16:
        raise InvalidArgument("resolution must be at least 16")
    axis = (2.0 * np.arange(resolution) - resolution) / resolution
    im, re = np.meshgrid(axis, axis, indexing="ij")
    Y = np.stack([re.ravel(), im.ravel()], -1)
    x = np.array([x_fixed, 0.0])
    ok = (norm(Y) < 1.0) & (norm(Y - x) > 0.0)
    q = np.full(len(Y), np.nan)
    X = np.repeat(x[None], int(ok.sum()), axis=0)
    s = s_oracle_batch(DISK, X, Y[ok], tol)
    q[ok] = s / np.asarray(M.w_metric(DISK, X, Y[ok]))
    return FigureGrid(x_fixed, resolution, re, im, q.reshape(re.shape))


def jw_limit_curve(k: float) -> float:
    """w/j* at x = 1 - k, y = (1 - k) e^{2ik} in the disk."""
    if not (0.0 < k < 1.0):
        raise InvalidArgument("k must lie in (0, 1)")
    x = np.array([1.0 - k, 0.0])
    y = (1.0 - k) * np.array([math.cos(2 * k), math.sin(2 * k)])
    return M.w_metric(DISK, x, y) / M.jstar(DISK, x, y)


def jw_limit_closed(k: float) -> float:
    return ((1.0 - k) * math.sin(k) + k) / math.sqrt(k * k + (1.0 - k * k) * math.sin(k) ** 2)


def rectangle() -> ConvexPolygon:
    return RECTANGLE
