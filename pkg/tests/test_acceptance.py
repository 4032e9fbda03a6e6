"""One test per acceptance criterion; each prints a PASS/FAIL line."""

import time

import numpy as np
import pytest

from orbitconvex.convex import bipolar_check, projection_polar_check
from orbitconvex.geomcore import busemann_gap_bound, busemann_pairing, orthonormalize
from orbitconvex.groups import orbit
from orbitconvex.scenarios import parse_action, run_scenario
from orbitconvex.submetry import basic_function_check, hull_invariance_check

from .conftest import ACCEPTANCE_LINES

SEED = 1729


def _report(number: int, title: str, ok: bool, detail: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} ({detail})"
    print(line)
    ACCEPTANCE_LINES.append(line)


def _random_origin_cloud(rng, dim: int) -> np.ndarray:
    m = int(rng.integers(dim + 1, 30))
    A = rng.standard_normal((m, dim)) * rng.uniform(0.2, 3.0)
    A -= A.mean(axis=0)
    return A + rng.uniform(-0.1, 0.1, dim) * np.abs(A).min()


def test_criterion_1_schur_horn():
    t0 = time.perf_counter()
    rep = run_scenario("schur-horn", {"n": 3, "eigenvalues": [3, 2, 1], "orbit_budget": 20000,
                                      "direction_budget": 500}, seed=SEED)
    elapsed = time.perf_counter() - t0
    m = rep.metrics
    ok = (m["inclusion_violations"] == 0 and m["majorization_violations"] == 0
          and m["hausdorff_gap"] <= 0.05 and elapsed <= 60.0)
    _report(1, "Schur-Horn projection equals permutohedron", ok,
            f"violations={m['inclusion_violations']:.0f}, gap={m['hausdorff_gap']:.4f}, {elapsed:.1f}s")
    assert m["inclusion_violations"] == 0
    assert m["majorization_violations"] == 0
    assert m["hausdorff_gap"] <= 0.05
    assert elapsed <= 60.0


def test_criterion_2_slope_criterion():
    rep = run_scenario("slope-criterion", {"probe_budget": 200, "suite_size": 50}, seed=SEED)
    m = rep.metrics
    ok = (m["disk_min_raw_slope"] >= 0.98 and m["circle_witness_slope"] <= -0.9
          and m["circle_witness_norm"] <= 0.1 and m["detector_oracle_disagreements"] == 0)
    _report(2, "slope criterion detector", ok,
            f"disk={m['disk_min_raw_slope']:.4f}, circle={m['circle_witness_slope']:.4f} "
            f"at |x|={m['circle_witness_norm']:.3g}, disagreements={m['detector_oracle_disagreements']:.0f}/50")
    assert m["disk_min_raw_slope"] >= 0.98
    assert m["circle_witness_slope"] <= -0.9
    assert m["circle_witness_norm"] <= 0.1
    assert m["detector_oracle_disagreements"] == 0


def test_criterion_3_bipolar():
    rng = np.random.default_rng(SEED)
    gaps = []
    for i in range(100):
        A = _random_origin_cloud(rng, int(rng.integers(1, 6)))
        rep = bipolar_check(A, direction_budget=200, tol=1e-6, seed=i)
        assert rep.verdict != "origin-not-in-hull"
        gaps.append(rep.metrics["max_support_gap"])
    worst = max(gaps)
    _report(3, "bipolar equals hull", worst <= 1e-6, f"max gap={worst:.2e} over 100 clouds")
    assert worst <= 1e-6


def test_criterion_4_projection_polar():
    rng = np.random.default_rng(SEED + 4)
    gaps = []
    for i in range(100):
        dim = int(rng.integers(2, 6))
        A = _random_origin_cloud(rng, dim)
        sigma = orthonormalize(rng.standard_normal((int(rng.integers(1, dim + 1)), dim)))
        rep = projection_polar_check(A, sigma, direction_budget=50, tol=1e-6, seed=i)
        assert rep.verdict != "origin-not-in-hull"
        gaps.append(rep.metrics["max_support_gap"])
    worst = max(gaps)
    _report(4, "projection equals polar of section slice", worst <= 1e-6,
            f"max gap={worst:.2e} over 100 sets")
    assert worst <= 1e-6


def test_criterion_5_fat_section():
    rep = run_scenario("fat-section", {"n": 4, "k": 3, "orbit_budget": 20000, "pairs": 100}, seed=SEED)
    m = rep.metrics
    ok = (m["inclusion_violations"] == 0 and m["hausdorff_projection_vs_slice"] <= 0.05
          and m["isometry_max_gap"] <= 1e-3)
    _report(5, "fat section identities", ok,
            f"violations={m['inclusion_violations']:.0f}, gap={m['hausdorff_projection_vs_slice']:.2e}, "
            f"isometry={m['isometry_max_gap']:.2e}")
    assert m["inclusion_violations"] == 0
    assert m["hausdorff_projection_vs_slice"] <= 0.05
    assert m["isometry_max_gap"] <= 1e-3


def test_criterion_6_orbitope_gap():
    rep = run_scenario("orbitope-gap", {"n": 4, "k": 3}, seed=SEED)
    m = rep.metrics
    a, b = m["projected_dimension"], m["orbitope_dimension"]
    ok = a <= 6 and b == 9 and m["rank_changes_under_doubling"] == 0
    _report(6, "orbitope strictly larger than projected orbit", ok,
            f"a={a:.0f}, b={b:.0f}, kn-k(k+1)/2={m['orbit_dimension_bound']:.0f}")
    assert a <= 4 * 3 - 3 * 4 // 2
    assert b == 3 * 3
    assert m["rank_changes_under_doubling"] == 0


@pytest.mark.parametrize("group", ["pm2", "C5"])
def test_criterion_7_finite_counterexample(group):
    rep = run_scenario("finite-counterexample", {"group": group}, seed=SEED)
    m = rep.metrics
    ok = m["midpoint_certificates"] > 0 and m["certificate_margin_ratio"] >= 10.0
    _report(7, f"finite group {group} orbit not convex", ok,
            f"certificates={m['midpoint_certificates']:.0f}, margin={m['certificate_margin_ratio']:.3g}x tol")
    assert m["midpoint_certificates"] > 0
    assert m["certificate_margin_ratio"] >= 10.0


EXACT_ACTIONS = ("S3", "D5", "C5", "pm3", "S4")
SAMPLED_ACTIONS = ("O3", "SO3", "O3x2:diag", "O3:conj", "SO2")


def test_criterion_8_basic_functions():
    rng = np.random.default_rng(SEED + 8)
    exact_gap = sampled_gap = 0.0
    disagreements = tests = 0
    for j, spec in enumerate(EXACT_ACTIONS + SAMPLED_ACTIONS):
        action = parse_action(spec, SEED)
        v = rng.standard_normal(action.ambient_dim)
        F = orbit(action, v, budget=2000, seed=j)
        rep = basic_function_check(action, F, test_pairs=100, seed=j)
        tests += 100
        if action.is_exact:
            exact_gap = max(exact_gap, rep.metrics["max_support_gap"])
            disagreements += hull_invariance_check(action, F, test_pairs=100, seed=j).metrics["disagreements"]
        else:
            sampled_gap = max(sampled_gap, rep.metrics["max_support_gap"])
    ok = exact_gap <= 1e-8 and sampled_gap <= 1e-3 and disagreements == 0
    _report(8, "support functions of fibers are basic", ok,
            f"{tests} tests, exact={exact_gap:.1e}, sampled={sampled_gap:.1e}, hull disagreements={disagreements:.0f}")
    assert tests == 1000
    assert exact_gap <= 1e-8
    assert sampled_gap <= 1e-3
    assert disagreements == 0


def test_criterion_9_busemann():
    rng = np.random.default_rng(SEED + 9)
    t = 1e4
    worst = 0.0
    for _ in range(500):
        v = rng.standard_normal(int(rng.integers(1, 6)))
        v *= rng.uniform(0, 5) / np.linalg.norm(v)
        u = rng.standard_normal(v.size)
        u /= np.linalg.norm(u)
        gap = abs(float(v @ u) - busemann_pairing(v, u, [t]))
        assert gap <= busemann_gap_bound(float(np.linalg.norm(v)), t) + 1e-12
        worst = max(worst, gap)
    _report(9, "Busemann pairing", worst <= 2e-3, f"max gap={worst:.2e} at t=1e4")
    assert worst <= 2e-3
