import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import ALL, CONVEX
from metriq import metrics as M
from metriq.analysis import sample_points
from metriq.errors import InvalidArgument, UnsupportedDomain
from metriq.geometry import HalfSpace, PuncturedPlane, Sector, UnitBall, invert, tilde_set
from metriq.oracle import s_oracle, s_oracle_batch

SQRT2 = math.sqrt(2.0)
DISK = UnitBall(2)


def disk_pairs(n, seed):
    P = sample_points(DISK, 2 * n, np.random.default_rng(seed))
    return P[:n], P[n:]


# spec examples


def test_jstar_examples():
    assert M.jstar(DISK, [0.5, 0], [-0.5, 0]) == pytest.approx(0.5, abs=1e-15)
    assert M.jstar(HalfSpace(2), [0, 1], [0, 3]) == pytest.approx(0.5, abs=1e-15)
    assert M.jstar(DISK, [0.1, 0.2], [0.1, 0.2]) == 0.0


def test_point_pair_examples():
    assert M.point_pair(DISK, [1 / 3, 0], [-1 / 3, 0]) == pytest.approx(1 / math.sqrt(5), abs=1e-15)
    assert M.point_pair(DISK, [0.3, 0.1], [0.3, 0.1]) == 0.0


def test_tri_ratio_examples():
    assert M.tri_ratio(DISK, [0.3, 0.4], [0.3, -0.4]) == pytest.approx(0.4 / math.sqrt(0.65), abs=1e-12)
    assert M.tri_ratio(HalfSpace(2), [0, 1], [0, 2]) == pytest.approx(1 / 3, abs=1e-15)
    x, y = 0.6, -0.2
    assert M.tri_ratio(DISK, [x, 0], [y, 0]) == pytest.approx((x - y) / (2 - x - y), abs=1e-15)


def test_w_examples():
    assert M.w_metric(DISK, [0.5, 0], [-0.5, 0]) == pytest.approx(0.5, abs=1e-15)
    x = np.array([0.3, -0.4])
    assert M.w_metric(DISK, x, [0, 0]) == pytest.approx(0.5 / 1.5, abs=1e-15)
    assert M.w_metric(DISK, [0, 0], x) == pytest.approx(0.5 / 1.5, abs=1e-15)


def test_low_examples():
    assert M.low_fn([0.5, 0], [0, 0.5]) == pytest.approx(math.sqrt(0.5) / math.sqrt(4.25), abs=1e-15)
    assert M.low_fn([0.5, 0.1], [0.5, 0.1]) == 0.0
    with pytest.raises(InvalidArgument):
        M.low_fn([0, 0], [0.5, 0])


def test_rho_examples():
    assert M.th_half(DISK, [0.5, 0], [-0.5, 0]) == pytest.approx(0.8, abs=1e-15)
    assert M.rho(DISK, [0.5, 0], [-0.5, 0]) == pytest.approx(2 * math.atanh(0.8), abs=1e-14)
    assert M.rho(DISK, [0.2, 0.1], [0.2, 0.1]) == 0.0
    x, y = [0.3, 2.0], [-1.0, 0.5]
    assert M.rho(Sector(math.pi), x, y) == pytest.approx(M.rho(HalfSpace(2), x, y), abs=1e-15)
    with pytest.raises(UnsupportedDomain):
        M.rho(PuncturedPlane(((0.0, 0.0),)), [1, 1], [2, 2])


def test_invert_in_sector_examples():
    k = 0.7
    assert np.allclose(M.invert_in_sector([math.cos(k), math.sin(k)]), [math.cos(k), math.sin(k)])
    z = 2 * np.array([math.cos(math.pi / 4), math.sin(math.pi / 4)])
    assert np.allclose(M.invert_in_sector(z), z / 4)


# dispatch and strategies


def test_metric_id():
    assert M.MetricId.from_name("s") == M.MetricId("sratio")
    assert M.MetricId.from_name("th2", "oracle").strategy == "oracle"
    with pytest.raises(InvalidArgument):
        M.MetricId("nope")
    with pytest.raises(InvalidArgument):
        M.MetricId("pp", "fast")


def test_closed_form_strategy_refuses_general_ball_pairs():
    with pytest.raises(UnsupportedDomain):
        M.tri_ratio(DISK, [0.1, 0.2], [0.3, -0.5], strategy="closed_form")
    used = []
    M.tri_ratio(DISK, [0.1, 0.2], [0.3, -0.5], method_out=used)
    assert used == ["oracle"]
    used = []
    M.tri_ratio(DISK, [0.3, 0.4], [0.3, -0.4], method_out=used)
    assert used == ["closed_form"]


def test_evaluate_record():
    rec = M.evaluate(DISK, M.MetricId("pp"), [1 / 3, 0], [-1 / 3, 0])
    assert rec.method == "closed_form" and rec.value == pytest.approx(1 / math.sqrt(5))
    assert rec.to_dict()["domain"] == "ball:n=2"
    with pytest.raises(UnsupportedDomain):
        M.evaluate(DISK, M.MetricId("pp", "oracle"), [0.1, 0], [0.2, 0])


def test_w_rejects_nonconvex():
    with pytest.raises(UnsupportedDomain):
        M.w_metric(Sector(4.0), [1, 1], [1, 2])
    with pytest.raises(UnsupportedDomain):
        M.w_metric(PuncturedPlane(((0.0, 0.0),)), [1, 1], [1, 2])


def test_points_outside_rejected():
    with pytest.raises(InvalidArgument):
        M.jstar(DISK, [1.0, 0], [0, 0])
    with pytest.raises(InvalidArgument):
        M.point_pair(HalfSpace(2), [0, -1], [0, 1])


# properties


@pytest.mark.parametrize("name", sorted(ALL))
@pytest.mark.parametrize("kind", ["jstar", "pp", "sratio", "w"])
def test_symmetry_range_positivity(name, kind):
    d = ALL[name]
    if kind == "w" and not d.convex:
        return
    P = sample_points(d, 400, np.random.default_rng(7))
    X, Y = P[:200], P[200:]
    f = M.evaluator(kind)
    a = np.asarray(f(d, X, Y))
    b = np.asarray(f(d, Y, X))
    assert np.max(np.abs(a - b)) <= 1e-12
    assert np.all((a > 0) & (a <= 1))
    assert np.all(np.asarray(f(d, X, X)) == 0)


@pytest.mark.parametrize("d", [DISK, HalfSpace(2), Sector(2.0), UnitBall(3)])
def test_rho_symmetric_nonnegative(d):
    P = sample_points(d, 200, np.random.default_rng(8))
    X, Y = P[:100], P[100:]
    a = M.rho(d, X, Y)
    assert np.all(a > 0) and np.max(np.abs(a - M.rho(d, Y, X))) <= 1e-12


@given(st.floats(0, 2 * math.pi), st.floats(0, 0.95), st.floats(0, 2 * math.pi), st.floats(0, 0.95))
def test_disk_th_half_two_formulas(a, r, b, q):
    x = [r * math.cos(a), r * math.sin(a)]
    y = [q * math.cos(b), q * math.sin(b)]
    assert abs(M.th_half(DISK, x, y) - M.th_half_disk(x, y)) <= 1e-12


def test_halfspace_equalities():
    d = HalfSpace(2)
    P = sample_points(d, 2000, np.random.default_rng(9))
    X, Y = P[:1000], P[1000:]
    p = M.point_pair(d, X, Y)
    assert np.max(np.abs(M.w_metric(d, X, Y) - p)) <= 1e-12
    assert np.max(np.abs(M.tri_ratio(d, X, Y) - p)) <= 1e-12
    assert np.max(np.abs(M.th_half(d, X, Y) - p)) <= 1e-12


@pytest.mark.parametrize("name", sorted(CONVEX))
def test_s_at_most_p_on_convex(name):
    d = CONVEX[name]
    P = sample_points(d, 4000, np.random.default_rng(10))
    X, Y = P[:2000], P[2000:]
    assert np.all(np.asarray(M.tri_ratio(d, X, Y)) <= np.asarray(M.point_pair(d, X, Y)) + 1e-9)


@pytest.mark.parametrize("theta", [math.pi / 6, math.pi / 2, 2.0, math.pi])
def test_sector_s_equals_w(theta):
    d = Sector(theta)
    P = sample_points(d, 1000, np.random.default_rng(11))
    X, Y = P[:500], P[500:]
    w = M.w_metric(d, X, Y)
    assert np.max(np.abs(M.tri_ratio(d, X, Y) - w)) <= 1e-9
    assert np.max(np.abs(M.tri_ratio(d, X, Y, strategy="oracle", tol=1e-10) - w)) <= 1e-9


def test_ball_chain():
    X, Y = disk_pairs(3000, 12)
    th4, j, w = M.th_quarter(DISK, X, Y), M.jstar(DISK, X, Y), M.w_metric(DISK, X, Y)
    s, p, th2 = M.tri_ratio(DISK, X, Y, tol=1e-10), M.point_pair(DISK, X, Y), M.th_half(DISK, X, Y)
    for lo, hi in [(th4, j), (j, w), (w, s), (s, p), (p, th2), (th2, 2 * th4)]:
        assert np.min(hi - lo) >= -1e-9


def test_ball_w_s_collinear_equality():
    rng = np.random.default_rng(13)
    u = rng.normal(size=(1000, 2))
    u /= np.linalg.norm(u, axis=1)[:, None]
    X = rng.uniform(-0.99, 0.99, (1000, 1)) * u
    Y = rng.uniform(-0.99, 0.99, (1000, 1)) * u
    assert np.max(np.abs(M.tri_ratio(DISK, X, Y) - M.w_metric(DISK, X, Y))) <= 1e-9


def test_tilde_distance_ordering():
    X, Y = disk_pairs(5000, 14)
    swap = np.linalg.norm(Y, axis=1) > np.linalg.norm(X, axis=1)
    X[swap], Y[swap] = Y[swap].copy(), X[swap].copy()
    rx, ry = np.linalg.norm(X, axis=1), np.linalg.norm(Y, axis=1)
    tx = X * ((2 - rx) / rx)[:, None]
    ty = Y * ((2 - ry) / ry)[:, None]
    assert np.all(np.linalg.norm(Y - tx, axis=1) <= np.linalg.norm(X - ty, axis=1) + 1e-15)


def test_w_continuity_at_origin():
    x = np.array([0.3, 0.5])
    nx = np.linalg.norm(x)
    tx = tilde_set(DISK, x).points[0]
    y = 1e-6 * np.array([0.6, 0.8])
    assert abs(np.linalg.norm(x - y) / np.linalg.norm(y - tx) - nx / (2 - nx)) <= 1e-5


def test_w_exceeds_low():
    X, Y = disk_pairs(2000, 15)
    assert np.all(M.w_metric(DISK, X, Y) - M.low_fn(X, Y) > 0)


def test_ball_generic_dimension_routes_through_plane():
    rng = np.random.default_rng(16)
    B3 = UnitBall(3)
    P = sample_points(B3, 200, rng)
    X, Y = P[:100], P[100:]
    Q = rng.normal(size=(3, 3))
    Q, _ = np.linalg.qr(Q)
    for kind in ("jstar", "pp", "sratio", "w", "rho"):
        f = M.evaluator(kind)
        assert np.max(np.abs(np.asarray(f(B3, X, Y)) - np.asarray(f(B3, X @ Q.T, Y @ Q.T)))) <= 1e-9


@given(st.floats(0.05, 2 * math.pi - 0.05), st.floats(0.2, 4.0))
def test_sector_similarity_invariance(theta, scale):
    d = Sector(theta)
    P = sample_points(d, 40, np.random.default_rng(17))
    X, Y = P[:20], P[20:]
    for kind in ("jstar", "pp", "sratio"):
        f = M.evaluator(kind)
        assert np.max(np.abs(np.asarray(f(d, X, Y)) - np.asarray(f(d, scale * X, scale * Y)))) <= 1e-10


@pytest.mark.parametrize("theta", [math.pi / 3, math.pi / 2, math.pi, 3 * math.pi / 2])
def test_point_pair_inversion_invariance(theta):
    d = Sector(theta)
    P = sample_points(d, 2000, np.random.default_rng(18))
    X, Y = P[:1000], P[1000:]
    assert np.max(np.abs(M.point_pair(d, X, Y) - M.point_pair(d, invert(X), invert(Y)))) <= 1e-12


def test_punctured_s_closed_form_matches_oracle():
    d = PuncturedPlane(((0.0, 0.0), (1.0, 0.0), (0.3, 2.0)))
    P = sample_points(d, 400, np.random.default_rng(19))
    X, Y = P[:200], P[200:]
    assert np.max(np.abs(M.tri_ratio(d, X, Y) - s_oracle_batch(d, X, Y, 1e-10))) <= 1e-9


def test_ball_symmetric_pair_matches_oracle():
    rng = np.random.default_rng(20)
    for _ in range(50):
        r, a, b = rng.uniform(0.05, 0.95), rng.uniform(0, 2 * math.pi), rng.uniform(0.01, math.pi)
        x = r * np.array([math.cos(a), math.sin(a)])
        y = r * np.array([math.cos(a + b), math.sin(a + b)])
        assert abs(M.tri_ratio(DISK, x, y, strategy="closed_form") - s_oracle(DISK, x, y, 1e-11)) <= 1e-9


def test_w_near_vertex_of_straight_sector():
    # the vertex is within the tie tolerance but is not a nearest point
    x, y = np.array([-1.15e-4, 5.485]), np.array([5.748, 0.7532])
    want = M.point_pair(HalfSpace(2), x, y)
    assert abs(M.w_metric(Sector(math.pi), x, y) - want) <= 1e-12


def test_w_near_polygon_vertex_has_single_tilde():
    from metriq.geometry import ConvexPolygon
    d = ConvexPolygon(((-1.0, 0.0), (0.0, 0.0), (1.0, 1e-3), (0.0, 2.0)))
    x = np.array([-1.2e-6, 1e-3])  # the vertex is 7.2e-10 farther than the foot
    _, valid = d.tilde_candidates(x[None])
    assert valid.sum() == 1
    y = np.array([0.4, 0.9])
    ty, vy = d.tilde_candidates(y[None])
    to_ty = min(np.linalg.norm(x - t) for t, v in zip(ty[0], vy[0]) if v)
    want = np.linalg.norm(x - y) / min(np.linalg.norm(y - [-1.2e-6, -1e-3]), to_ty)
    assert M.w_metric(d, x, y) == pytest.approx(want, abs=1e-14)
