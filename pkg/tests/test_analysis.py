import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from metriq import analysis as A
from metriq import metrics as M
from metriq.errors import InvalidArgument
from metriq.geometry import HalfSpace, PuncturedPlane, Sector, UnitBall, contains
from metriq.oracle import RECTANGLE

DISK = UnitBall(2)


# sampling and projection


@pytest.mark.parametrize("d", [DISK, HalfSpace(2), Sector(5.0), RECTANGLE, PuncturedPlane(((0.0, 0.0), (1.0, 1.0)))])
def test_samples_are_inside_and_seeded(d):
    a = A.sample_points(d, 500, np.random.default_rng(3))
    b = A.sample_points(d, 500, np.random.default_rng(3))
    assert np.array_equal(a, b)
    assert all(contains(d, p) for p in a)


def test_project_inside():
    P = np.array([[2.0, 0.0], [0.3, 0.1], [0.0, -5.0]])
    Q = A.project_inside(DISK, P)
    assert all(contains(DISK, q) for q in Q)
    assert np.array_equal(Q[1], P[1])


# pattern search


def test_pattern_search_finds_smooth_maximum():
    f = lambda P: -np.sum((P - np.array([0.3, -0.2])) ** 2, axis=1)
    P, v, evals = A.pattern_search(f, np.zeros((3, 2)) + np.array([[0.0, 0.0], [0.5, 0.5], [-0.4, 0.1]]))
    assert np.allclose(P, [0.3, -0.2], atol=1e-8)
    assert evals > 0


@given(st.integers(0, 1000))
def test_pattern_search_never_decreases(seed):
    rng = np.random.default_rng(seed)
    c = rng.normal(size=(4, 3))

    def f(P):
        return -np.abs(P - c[0]).sum(axis=1) + np.sin(5 * P[:, 1])

    P0 = rng.normal(size=(4, 3))
    _, v, _ = A.pattern_search(f, P0, step_min=1e-6)
    assert np.all(v >= f(P0))


# quasi constants and metric checks


def test_quasi_constant_small_disk_p():
    w = A.quasi_constant(DISK, "pp", 2000, 0)
    assert w.ratio >= math.sqrt(5) / 2 - 1e-6
    assert abs(w.recompute() - w.ratio) <= 1e-12


def test_quasi_constant_halfplane_p_is_metric():
    w = A.quasi_constant(HalfSpace(2), "pp", 2000, 1)
    assert w.ratio <= 1 + 1e-9


def test_quasi_constant_deterministic():
    a = A.quasi_constant(RECTANGLE, "jstar", 500, 4)
    b = A.quasi_constant(RECTANGLE, "jstar", 500, 4)
    assert a.to_dict() == b.to_dict()


def test_quasi_constant_rejects_zero_samples():
    with pytest.raises(InvalidArgument):
        A.quasi_constant(DISK, "pp", 0, 0)


def test_sector_probe_violates():
    r = A.metric_check_sector(math.pi / 2, 500, 0, refine=False)
    assert not r.passed and r.estimate > 1
    assert r.witness is not None


def test_sector_large_angle_passes_small():
    r = A.metric_check_sector(3 * math.pi / 2, 2000, 0, refine=False)
    assert r.passed


def test_witness_is_reproducible():
    r = A.metric_check_sector(math.pi / 2, 500, 0)
    x, y, z = r.witness
    f = lambda a, b: M.point_pair(Sector(math.pi / 2), a, b)
    assert abs(f(x, y) / (f(x, z) + f(z, y)) - r.estimate) <= 1e-12


# inequality sweeps


def test_sweep_selector_domain_mismatch():
    with pytest.raises(InvalidArgument):
        A.inequality_sweep(HalfSpace(2), "T510", 10, 0)
    with pytest.raises(InvalidArgument):
        A.inequality_sweep(Sector(4.0), "C48", 10, 0)
    with pytest.raises(InvalidArgument):
        A.inequality_sweep(DISK, "nope", 10, 0)


@pytest.mark.parametrize(
    "d,sel",
    [(DISK, "L23a"), (DISK, "L23b"), (DISK, "L23c"), (DISK, "L24"), (DISK, "C48"), (DISK, "C49"),
     (DISK, "T46"), (DISK, "T510"), (DISK, "T511"), (DISK, "T57"), (HalfSpace(2), "EQH"),
     (RECTANGLE, "T46"), (Sector(2.0), "C48"), (PuncturedPlane(((0.0, 0.0),)), "L23b")],
)
def test_sweeps_pass(d, sel):
    r = A.inequality_sweep(d, sel, 2000, 3)
    assert r.passed, r.to_dict()
    assert r.to_dict()["pass"] is True


def test_sweep_failure_carries_witness():
    # j* <= s <= sqrt2 j* only holds on convex domains
    _, desc, kinds, terms = A.SELECTORS["L23c"]
    A.SELECTORS["L23c_any"] = (lambda d: True, desc, kinds, terms)
    try:
        r = A.inequality_sweep(PuncturedPlane(((0.0, 0.0),)), "L23c_any", 5000, 0)
    finally:
        del A.SELECTORS["L23c_any"]
    assert not r.passed
    x, y = r.witness
    s = M.tri_ratio(PuncturedPlane(((0.0, 0.0),)), x, y)
    j = M.jstar(PuncturedPlane(((0.0, 0.0),)), x, y)
    assert math.sqrt(2) * j - s == pytest.approx(r.worst_margin, abs=1e-12)


def test_sweep_deterministic():
    a = A.inequality_sweep(DISK, "T57", 500, 9).to_dict()
    b = A.inequality_sweep(DISK, "T57", 500, 9).to_dict()
    assert a == b


# disk extremal quotients


def test_special_case_extremum():
    r = A.special_case_extremum()
    assert r.extra["argmax_h"] == pytest.approx(0.48236, abs=1e-4)
    assert r.estimate == pytest.approx(1.07313, abs=1e-4)
    assert r.extra["branch_value"] == pytest.approx(1.04201, abs=1e-4)
    assert r.extra["argmax_h"] == pytest.approx(A.SPECIAL_H0, abs=1e-7)
    assert r.estimate == pytest.approx(A.SPECIAL_C, abs=1e-12)
    assert A.SPECIAL_BRANCH == pytest.approx(r.extra["branch_value"], abs=1e-12)
    h0 = r.extra["argmax_h"]
    assert A.sw_quotient([h0, 0], [0, h0]) == pytest.approx(r.estimate, abs=1e-10)


def test_golden_max():
    x, v, steps = A.golden_max(lambda t: -(t - 0.3) ** 2, 0, 1)
    assert x == pytest.approx(0.3, abs=1e-9) and steps > 10


def test_conjecture_restricted_searches():
    r = A.conjecture_sw_search(500, 0, restrict="collinear")
    assert abs(r.estimate - 1) <= 1e-8
    r = A.conjecture_sw_search(500, 0, quotient="p/w", restrict="same_ray")
    assert abs(r.estimate - 1) <= 1e-12
    assert r.exploratory


def test_conjecture_search_initialized_at_special_pair():
    h0 = A.SPECIAL_H0
    r = A.conjecture_sw_search(50, 0, init=[([h0, 0.0], [0.0, h0])])
    assert r.estimate >= 1.0731
    x, y = r.witness
    assert A.sw_quotient(x, y) == pytest.approx(r.estimate, abs=1e-10)


def test_conjecture_search_arguments():
    with pytest.raises(InvalidArgument):
        A.conjecture_sw_search(0, 0)
    with pytest.raises(InvalidArgument):
        A.conjecture_sw_search(10, 0, quotient="j/w")
    with pytest.raises(InvalidArgument):
        A.conjecture_sw_search(10, 0, restrict="diagonal")


def test_figure_grid_small():
    g = A.figure1_grid(0.6, 16)
    rows = list(g.rows())
    assert len(rows) == 256
    csv = g.to_csv()
    assert csv.splitlines()[0] == "re_y,im_y,quotient" and len(csv.splitlines()) == 257
    q = np.array([r[2] for r in rows if r[2] is not None])
    assert np.all(q >= 1 - 1e-7)
    on_axis = [r[2] for r in rows if r[1] == 0.0 and r[2] is not None]
    assert np.allclose(on_axis, 1, atol=1e-7)
    with pytest.raises(InvalidArgument):
        A.figure1_grid(1.0, 16)
    with pytest.raises(InvalidArgument):
        A.figure1_grid(0.5, 8)


def test_jw_limit_curve():
    assert A.jw_limit_curve(1e-4) >= math.sqrt(2) - 1e-3
    for k in (0.5, 0.999, 0.01):
        assert abs(A.jw_limit_curve(k) - A.jw_limit_closed(k)) <= 1e-10
    with pytest.raises(InvalidArgument):
        A.jw_limit_curve(1.0)


def test_known_witnesses_only_for_rectangle_w():
    assert A.known_witnesses(RECTANGLE, M.MetricId("w"))
    assert not A.known_witnesses(DISK, M.MetricId("w"))
    assert not A.known_witnesses(RECTANGLE, M.MetricId("pp"))
