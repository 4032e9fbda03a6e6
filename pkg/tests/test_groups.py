import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from orbitconvex.geomcore import Subspace
from orbitconvex.groups import (
    GroupOrderOverflow,
    OrbitSupport,
    block_section,
    diagonal_section,
    enumerate_group,
    fixed_point_subspace,
    haar_orthogonal,
    homothety_check,
    make_action,
    orbit,
    orbit_distance,
    orbit_distances,
    rng_for,
    rotation2,
    section_slice,
    smat,
    so_basis,
    svec,
)

finite = st.floats(-5, 5, allow_nan=False, allow_infinity=False)


def _multiplication_closed(els):
    keys = {tuple(np.round(g.ravel(), 8)) for g in els}
    return all(tuple(np.round((a @ b).ravel(), 8)) in keys for a in els for b in els)


def test_enumerate_small_groups():
    assert enumerate_group([-np.eye(2)]).order == 2
    assert enumerate_group([rotation2(2 * np.pi / 5)]).order == 5
    refl = np.diag([1.0, -1.0])
    d5 = enumerate_group([rotation2(2 * np.pi / 5), refl])
    assert d5.order == 10
    assert _multiplication_closed(d5.elements)


def test_enumerate_overflow_names_cap():
    with pytest.raises(GroupOrderOverflow, match="max_order=3"):
        enumerate_group([rotation2(2 * np.pi / 5)], max_order=3)
    with pytest.raises(ValueError, match="not orthogonal"):
        enumerate_group([2 * np.eye(2)])


def test_haar_samples_are_orthogonal_and_special(rng):
    Q = haar_orthogonal(4, 50, rng)
    assert np.allclose(np.swapaxes(Q, 1, 2) @ Q, np.eye(4), atol=1e-12)
    S = haar_orthogonal(3, 50, rng, special=True)
    assert np.allclose(np.linalg.det(S), 1.0)


def test_haar_first_column_is_uniform_on_sphere():
    Q = haar_orthogonal(3, 20000, rng_for(3, 0))
    x = Q[:, :, 0]
    # coordinates of a uniform point on S^2 are uniform on [-1, 1]
    for j in range(3):
        counts, _ = np.histogram(x[:, j], bins=10, range=(-1, 1))
        assert np.all(np.abs(counts - 2000) < 5 * np.sqrt(2000))


def test_orbit_of_permutations():
    S3 = make_action("S", 3)
    pts = orbit(S3, [1, 2, 3]).points
    assert len(pts) == 6
    assert {tuple(p) for p in np.round(pts).astype(int)} == set(itertools.permutations((1, 2, 3)))
    assert len(orbit(S3, [0, 0, 0]).points) == 1


def test_so2_circle_samples_have_small_gaps():
    pts = orbit(make_action("SO", 2), [1.0, 0.0], budget=100, seed=11).points
    assert np.allclose(np.linalg.norm(pts, axis=1), 1.0)
    ang = np.sort(np.arctan2(pts[:, 1], pts[:, 0]))
    gaps = np.diff(np.concatenate([ang, [ang[0] + 2 * np.pi]]))
    assert gaps.min() < 2 * np.pi / 25


def test_orbit_is_deterministic_per_seed():
    O3 = make_action("O", 3)
    a = orbit(O3, [1, 2, 3], budget=20, seed=5).points
    b = orbit(O3, [1, 2, 3], budget=20, seed=5).points
    c = orbit(O3, [1, 2, 3], budget=20, seed=6).points
    assert np.array_equal(a, b) and not np.array_equal(a, c)


def test_orbit_distance_examples():
    S3 = make_action("S", 3)
    assert orbit_distance(S3, [1, 2, 3], [3, 1, 2]) == pytest.approx(0.0, abs=1e-12)
    assert orbit_distance(S3, [1, 2, 3], [0, 0, 0]) == pytest.approx(np.sqrt(14))
    assert orbit_distance(make_action("SO", 2), [1, 0], [0, 2]) == pytest.approx(1.0)


@pytest.mark.parametrize("spec", [("O", 3, "standard", 1), ("SO", 3, "standard", 1),
                                  ("O", 3, "diagonal", 2), ("SO", 3, "conjugation", 1),
                                  ("O", 4, "diagonal", 3)])
def test_sampled_route_matches_closed_form(spec, rng):
    fam, n, rep, copies = spec
    G = make_action(fam, n, rep, copies)
    for _ in range(4):
        v = rng.standard_normal(G.ambient_dim)
        w = rng.standard_normal(G.ambient_dim)
        exact = orbit_distance(G, v, w, method="exact")
        sampled = orbit_distance(G, v, w, method="sampled", budget=500)
        assert sampled >= exact - 1e-9
        assert sampled == pytest.approx(exact, abs=1e-6)


def test_finite_distance_matches_enumeration(rng):
    D5 = make_action("dihedral", 5)
    for _ in range(20):
        v, w = rng.standard_normal((2, 2))
        brute = min(np.linalg.norm(g @ v - w) for g in D5.elements())
        assert orbit_distance(D5, v, w) == pytest.approx(brute)


def test_batch_distances_match_single(rng):
    for G in (make_action("S", 4), make_action("O", 3, "diagonal", 2), make_action("cyclic", 5)):
        P = rng.standard_normal((7, G.ambient_dim))
        w = rng.standard_normal(G.ambient_dim)
        assert np.allclose(orbit_distances(G, P, w), [orbit_distance(G, p, w) for p in P])


def test_orbit_support_matches_nuclear_norm(rng):
    G = make_action("O", 3, "diagonal", 2)
    v = rng.standard_normal(6)
    h = OrbitSupport(G, v, budget=300)
    U = rng.standard_normal((5, 6))
    vals, pts = h.support_many(U)
    assert np.allclose(np.einsum("ij,ij->i", U, pts), vals)
    # exact value: max over O(3) of tr(g V^T U) is the nuclear norm
    Vm = v.reshape(2, 3)
    exact = [np.linalg.svd(Vm.T @ u.reshape(2, 3), compute_uv=False).sum() for u in U]
    assert np.allclose(vals, exact, atol=1e-8)


def test_fixed_point_subspaces():
    assert fixed_point_subspace(make_action("O", 2)).dim == 0
    V0 = fixed_point_subspace(make_action("S", 3))
    assert V0.same_as(Subspace(3, np.ones((1, 3)) / np.sqrt(3)))
    assert fixed_point_subspace(make_action("O", 4, "diagonal", 3)).dim == 0
    # conjugation fixes the identity matrix
    assert fixed_point_subspace(make_action("SO", 3, "conjugation")).dim == 1


def test_homothety_examples():
    S3 = make_action("S", 3)
    rep = homothety_check(S3, [1, 2, 3], [2, 3, 1], [0, 0.5, 2, 3])
    assert rep.passed and rep.metrics["max_scaled_distance"] == 0.0
    bad = homothety_check(S3, [1, 2, 3], [1, 2, 4], [1.0])
    assert bad.verdict == "not-same-fiber"


def test_svec_is_an_isometry(rng):
    A = rng.standard_normal((4, 4))
    A = A + A.T
    B = rng.standard_normal((4, 4))
    B = B + B.T
    assert svec(A) @ svec(B) == pytest.approx(np.trace(A @ B))
    assert np.allclose(smat(svec(A)), A)
    L = so_basis(4)
    assert L.shape == (6, 4, 4) and np.allclose(L + np.swapaxes(L, 1, 2), 0)


def test_conjugation_slice_is_weyl_orbit():
    G = make_action("SO", 3, "conjugation")
    v = svec(np.diag([3.0, 2.0, 1.0]))
    sl = section_slice(orbit(G, v, budget=10), diagonal_section(3))
    assert len(sl) == 6
    assert {tuple(np.round(p[:3], 9)) for p in sl.points} == set(itertools.permutations((3.0, 2.0, 1.0)))


def test_slice_special_cases():
    SO2 = make_action("SO", 2)
    line = Subspace.coordinate(2, [0])
    sl = section_slice(orbit(SO2, [0.0, 1.0], budget=10), line)
    assert np.allclose(sorted(sl.points[:, 0]), [-1, 1])
    zero = section_slice(orbit(SO2, [0.0, 0.0]), line)
    assert np.allclose(zero.points, 0)
    fat = block_section(4, 3)
    assert fat.dim == 9 and fat.ambient_dim == 12


@given(arrays(float, 3, elements=finite), arrays(float, 3, elements=finite), st.integers(0, 5))
def test_permutation_distance_is_invariant_and_symmetric(v, w, k):
    S3 = make_action("S", 3)
    g = S3.elements()[k]
    d = orbit_distance(S3, v, w)
    assert orbit_distance(S3, g @ v, w) == pytest.approx(d, abs=1e-9)
    assert orbit_distance(S3, w, v) == pytest.approx(d, abs=1e-9)
    assert d <= np.linalg.norm(v - w) + 1e-12
    assert d >= abs(np.linalg.norm(v) - np.linalg.norm(w)) - 1e-9


@given(arrays(float, 2, elements=finite), arrays(float, 2, elements=finite),
       arrays(float, 2, elements=finite))
def test_quotient_distance_triangle_inequality(a, b, c):
    D5 = make_action("dihedral", 5)
    ab, bc, ac = (orbit_distance(D5, x, y) for x, y in ((a, b), (b, c), (a, c)))
    assert ac <= ab + bc + 1e-9
