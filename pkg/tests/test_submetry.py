import json

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays
from scipy.optimize import minimize

from orbitconvex.groups import make_action, orbit
from orbitconvex.submetry import (
    SaturatedSet,
    SlopeEstimate,
    ascending_slope,
    basic_function_check,
    convexity_detect,
    distance_to_saturated,
    hull_invariance_check,
    midpoint_convexity_oracle,
    radial_support_formula,
    slope_csv,
)

O2 = make_action("O", 2)
S3 = make_action("S", 3)
finite = st.floats(-4, 4, allow_nan=False, allow_infinity=False)


def _sphere_grid(m: int) -> np.ndarray:
    """Fibonacci points on S^2."""
    i = np.arange(m) + 0.5
    phi = np.arccos(1 - 2 * i / m)
    theta = np.pi * (1 + 5**0.5) * i
    return np.column_stack([np.cos(theta) * np.sin(phi), np.sin(theta) * np.sin(phi), np.cos(phi)])


def test_distance_examples():
    disk = SaturatedSet.radial(O2, 0, 1)
    assert distance_to_saturated(disk, [2.0, 0.0]) == pytest.approx(1.0)
    assert distance_to_saturated(SaturatedSet.radial(O2, 1, 1), [0.0, 0.0]) == pytest.approx(1.0)
    orb = SaturatedSet.fibers(S3, [[1, 2, 3]])
    assert distance_to_saturated(orb, [3, 2, 1]) == pytest.approx(0.0)
    with pytest.raises(ValueError):
        SaturatedSet.fibers(S3, np.zeros((0, 3)))
    with pytest.raises(ValueError):
        SaturatedSet.radial(O2, 2, 1)


def test_fiber_distance_is_euclidean_distance_to_orbit(rng):
    S = SaturatedSet.fibers(S3, [[1, 2, 3], [0, 0, 5]])
    pts = np.vstack([orbit(S3, r).points for r in S.reps])
    for x in rng.standard_normal((20, 3)) * 3:
        assert S.distance(x) == pytest.approx(np.linalg.norm(pts - x, axis=1).min())


def test_sublevel_projection_matches_slsqp(rng):
    w = np.array([1.0, 0.3, -0.5])
    S = SaturatedSet.basic_sublevel(S3, w, 1.0)
    F = orbit(S3, w).points
    for x in rng.standard_normal((15, 3)) * 3:
        res = minimize(lambda y: np.sum((y - x) ** 2), np.zeros(3), method="SLSQP",
                       constraints=[{"type": "ineq", "fun": lambda y: 1.0 - F @ y}],
                       options={"ftol": 1e-14, "maxiter": 500})
        assert S.distance(x) == pytest.approx(np.linalg.norm(res.x - x), abs=1e-6)


def test_sublevel_of_rotation_group_is_ball():
    S = SaturatedSet.basic_sublevel(make_action("O", 3), [2.0, 0.0, 0.0], 1.0)
    assert S.distance([1.5, 0, 0]) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        SaturatedSet.basic_sublevel(make_action("O", 3, "diagonal", 2), np.ones(6), 1.0)


def test_json_round_trip():
    for S in (SaturatedSet.radial(O2, 0.5, 1.0), SaturatedSet.fibers(S3, [[1, 2, 3]]),
              SaturatedSet.basic_sublevel(S3, [1, 0, 0], 2.0)):
        back = SaturatedSet.from_json(json.loads(json.dumps(S.to_json())), S.action)
        assert back.to_json() == S.to_json()
    with pytest.raises(ValueError):
        SaturatedSet.from_json({"kind": "cube"}, S3)


def test_slope_outside_disk_is_one():
    est = ascending_slope(SaturatedSet.radial(O2, 0, 1), [2.0, 0.0])
    assert est.extrapolated == pytest.approx(1.0, abs=0.02)
    assert all(s <= 1 + 1e-9 for s in est.per_radius_sup)


def test_slope_near_centre_of_circle_is_minus_one():
    # sampled radii (down to 1e-3) are far larger than the offset from the origin
    est = ascending_slope(SaturatedSet.radial(O2, 1, 1), [1e-6, 0.0])
    assert est.extrapolated == pytest.approx(-1.0, abs=0.02)
    assert est.clamped == 0.0


def test_slope_precondition_names_margin():
    with pytest.raises(ValueError, match="margin"):
        ascending_slope(SaturatedSet.radial(O2, 0, 1), [0.5, 0.0])


@pytest.mark.parametrize("x", [(2.0, 2.0, 2.0), (3.0, 3.0, 0.0), (0.0, 0.0, 0.0), (4.0, 1.0, 1.0)])
def test_slope_matches_dense_sphere_grid(x):
    S = SaturatedSet.fibers(S3, [[1, 2, 3]])
    x = np.array(x)
    fx = S.distance(x)
    r = 1e-3 * fx
    U = _sphere_grid(40000)
    Y = x + r * U
    from orbitconvex.groups import orbit_distances

    den = orbit_distances(S3, Y, x)
    ok = den > 1e-6 * r
    grid = np.max((S.distances(Y[ok]) - fx) / den[ok])
    est = ascending_slope(S, x)
    assert est.per_radius_sup[-1] >= grid - 0.01
    assert est.per_radius_sup[-1] <= 1 + 1e-9


def test_detector_examples():
    disk = convexity_detect(SaturatedSet.radial(O2, 0, 1), probe_budget=200)
    assert disk.verdict == "consistent-with-convex" and disk.metrics["min_raw_slope"] >= 0.98
    circle = convexity_detect(SaturatedSet.radial(O2, 1, 1), probe_budget=200)
    assert circle.verdict == "nonconvex-witness"
    assert circle.metrics["min_raw_slope"] <= -0.9
    assert np.linalg.norm(circle.details["witness"]["base_point"]) <= 0.1
    orb = convexity_detect(SaturatedSet.fibers(S3, [[1, 2, 3]]), probe_budget=60)
    assert orb.verdict == "nonconvex-witness"


def test_detector_reports_uncovered_ball():
    rep = convexity_detect(SaturatedSet.radial(O2, 0, 10), probe_budget=10, ball_radius=5.0)
    assert rep.verdict == "no-probe-points" and rep.status == "unconverged"


def test_detector_estimates_export_csv():
    rep, ests = convexity_detect(SaturatedSet.radial(O2, 0, 1), probe_budget=5, return_estimates=True)
    assert all(isinstance(e, SlopeEstimate) for e in ests)
    lines = slope_csv(ests).splitlines()
    assert lines[0] == "x,radius,sup,extrapolated"
    assert len(lines) == 1 + 3 * len(ests)


def test_midpoint_oracle_examples():
    assert midpoint_convexity_oracle(SaturatedSet.radial(O2, 0, 1)).passed
    circle = midpoint_convexity_oracle(SaturatedSet.radial(O2, 1, 1))
    assert circle.verdict == "nonconvex-certificate"
    S = SaturatedSet.fibers(S3, [[1, 2, 3]])
    assert S.distance([1.5, 1.5, 3.0]) == pytest.approx(np.sqrt(0.5))
    cert = midpoint_convexity_oracle(S).details["certificate"]
    assert S.distance(cert["midpoint"]) == pytest.approx(cert["distance"])


def test_basic_function_examples():
    zero = orbit(S3, [0, 0, 0])
    assert basic_function_check(S3, zero, test_pairs=20).passed
    assert basic_function_check(S3, orbit(S3, [3, 2, 1]), test_pairs=50).passed
    SO2 = make_action("SO", 2)
    val = radial_support_formula(SO2, [1.0, 0.0], [2.0, 0.0], np.geomspace(1, 1e4, 60))
    assert val == pytest.approx(2.0, abs=1e-3)
    assert basic_function_check(SO2, orbit(SO2, [1.0, 0.0], budget=500), test_pairs=20).passed


def test_hull_invariance_on_finite_actions():
    for spec in (("S", 3), ("dihedral", 5), ("sign", 3)):
        G = make_action(*spec)
        v = np.arange(1, G.ambient_dim + 1, dtype=float)
        assert hull_invariance_check(G, orbit(G, v), test_pairs=50).passed


def test_fibertope_depends_only_on_quotient_distance():
    # radial fibers of O(2) and O(3) have the same quotient [0, inf): hull distances agree
    for r in (0.5, 1.0, 2.0):
        for t in (0.0, 0.7, 3.0):
            a = SaturatedSet.radial(make_action("O", 2), 0, r).distance([t, 0])
            b = SaturatedSet.radial(make_action("O", 3), 0, r).distance([0, t, 0])
            assert a == pytest.approx(b)


@given(arrays(float, 3, elements=finite), arrays(float, 3, elements=finite), st.integers(0, 5))
def test_distance_is_invariant_and_one_lipschitz(x, y, k):
    S = SaturatedSet.fibers(S3, [[1, 2, 3], [0, -1, 2]])
    g = S3.elements()[k]
    assert S.distance(g @ x) == pytest.approx(S.distance(x), abs=1e-9)
    assert abs(S.distance(x) - S.distance(y)) <= np.linalg.norm(x - y) + 1e-9
    assert S.contains(x) == S.contains(g @ x)


@given(arrays(float, 2, elements=finite), st.floats(0, 1), st.floats(0.1, 2))
def test_sublevel_distance_is_one_lipschitz_and_invariant(x, a, width):
    D5 = make_action("dihedral", 5)
    S = SaturatedSet.basic_sublevel(D5, [1.0, 0.2], width)
    for g in D5.elements()[:3]:
        assert S.distance(g @ x) == pytest.approx(S.distance(x), abs=1e-9)
    y = x + np.array([a, -a])
    assert abs(S.distance(x) - S.distance(y)) <= np.linalg.norm(x - y) + 1e-9


@given(st.integers(0, 1000))
def test_slope_estimates_stay_within_bounds(seed):
    rng = np.random.default_rng(seed)
    S = SaturatedSet.fibers(S3, [rng.standard_normal(3)])
    x = rng.standard_normal(3) * 2
    if S.distance(x) < 1e-3:
        return
    est = ascending_slope(S, x, per_radius_budget=8, seed=seed)
    assert all(s <= 1 + 1e-9 for s in est.per_radius_sup)
    assert -1 - 1e-9 <= est.extrapolated <= 1 + 1e-9
