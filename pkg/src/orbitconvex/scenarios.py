"""End-to-end verification suites on named representation families.

Each scenario takes a config dataclass and a seed, returns a
``VerificationReport``, and can write the report plus CSV tables to an
output directory (``run_scenario``).
"""

from __future__ import annotations

import csv
import dataclasses
import io
import itertools
import json
import math
import os
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np
from scipy.linalg import expm

from .config import DEFAULT_SEED, TOL
from .convex import (
    OrthogonalOrbitope,
    SupportOracle,
    affine_dimension,
    conv_membership,
    hull_hausdorff,
    sample_directions,
)
from .geomcore import Subspace
from .groups import (
    GroupAction,
    OrbitSupport,
    block_section,
    diagonal_section,
    fixed_point_subspace,
    make_action,
    orbit,
    orbit_distance,
    rng_for,
    so_basis,
    svec,
)
from .report import VerificationReport
from .submetry import SaturatedSet, convexity_detect, midpoint_convexity_oracle


class ConfigError(ValueError):
    """Invalid scenario configuration (maps to exit code 2 on the command line)."""


# ---------------------------------------------------------------------------
# action descriptors

_ACTION_RE = re.compile(r"^(O|SO|S|D|C|pm)(\d+)(?:x(\d+))?(?::(std|conj|diag))?$")


def parse_action(spec, seed: int = DEFAULT_SEED) -> GroupAction:
    """Build an action from a short string or a JSON-style descriptor.

    Strings: ``O2``, ``SO3:conj`` (conjugation on symmetric matrices),
    ``O4x3`` (diagonal on three copies), ``S3`` (coordinate permutations),
    ``D5`` (dihedral of order 10), ``C5`` (rotations of order 5), ``pm2``
    (``{+I, -I}`` on R^2). Dicts use the keys ``family``, ``n``, ``rep``,
    ``copies``.
    """
    if isinstance(spec, dict):
        extra = set(spec) - {"family", "n", "rep", "copies"}
        if extra:
            raise ConfigError(f"unknown action keys: {sorted(extra)}")
        try:
            return make_action(spec["family"], int(spec["n"]), spec.get("rep", "standard"),
                               int(spec.get("copies", 1)), seed=seed)
        except KeyError as exc:
            raise ConfigError(f"action descriptor missing {exc}") from None
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    text = str(spec).strip()
    if text.startswith("{"):
        try:
            return parse_action(json.loads(text), seed)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"action descriptor: {exc}") from None
    m = _ACTION_RE.match(text)
    if not m:
        raise ConfigError(f"cannot parse action {text!r}")
    fam, n, copies, rep = m.group(1), int(m.group(2)), m.group(3), m.group(4)
    family = {"D": "dihedral", "C": "cyclic", "pm": "sign"}.get(fam, fam)
    if copies is not None:
        rep = "diag"
    rep_name = {"std": "standard", "conj": "conjugation", "diag": "diagonal", None: "standard"}[rep]
    if n < 1:
        raise ConfigError("group size must be positive")
    try:
        return make_action(family, n, rep_name, int(copies or 1), seed=seed)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def action_label(action: GroupAction) -> str:
    d = action.describe()
    return json.dumps(d, sort_keys=True)


# ---------------------------------------------------------------------------
# config plumbing


def _strict(cls, params: dict):
    names = {f.name for f in dataclasses.fields(cls)}
    unknown = sorted(set(params) - names)
    if unknown:
        raise ConfigError(f"unknown key(s) for {cls.__name__}: {', '.join(unknown)}")
    try:
        cfg = cls(**params)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None
    return cfg


def _as_float_list(x, name: str) -> list[float] | None:
    if x is None:
        return None
    if isinstance(x, str):
        x = [t for t in x.replace(";", ",").split(",") if t.strip()]
    try:
        return [float(t) for t in x]
    except (TypeError, ValueError):
        raise ConfigError(f"{name} must be a list of numbers") from None


def parallel_map(fn: Callable, items, jobs: int = 1) -> list:
    """Map preserving input order; ``jobs > 1`` uses a thread pool."""
    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, items))


# ---------------------------------------------------------------------------
# Schur-Horn


@dataclass
class SchurHornConfig:
    n: int = 3
    eigenvalues: list[float] | None = None
    orbit_budget: int = 20000
    direction_budget: int = 500
    tol: float = 0.05
    inclusion_tol: float = 1e-8

    def __post_init__(self):
        self.eigenvalues = _as_float_list(self.eigenvalues, "eigenvalues")
        if self.eigenvalues is None:
            self.eigenvalues = [float(self.n - i) for i in range(self.n)]
        if not 2 <= self.n <= 5:
            raise ConfigError(f"n must be between 2 and 5, got {self.n}")
        if len(self.eigenvalues) != self.n:
            raise ConfigError(f"expected {self.n} eigenvalues, got {len(self.eigenvalues)}")
        if self.orbit_budget < 1 or self.direction_budget < 1:
            raise ConfigError("budgets must be positive")


def majorization_violation(x: np.ndarray, lam: np.ndarray) -> np.ndarray:
    """How far each row of ``x`` is from being majorized by ``lam`` (0 when majorized)."""
    xs = -np.sort(-x, axis=1)
    ls = -np.sort(-lam)
    px = np.cumsum(xs, axis=1)
    pl = np.cumsum(ls)
    partial = np.maximum(px[:, :-1] - pl[None, :-1], 0.0).max(axis=1, initial=0.0)
    total = np.abs(px[:, -1] - pl[-1])
    return np.maximum(partial, total)


def scenario_schur_horn(cfg: SchurHornConfig, seed: int = DEFAULT_SEED, jobs: int = 1) -> VerificationReport:
    """Diagonals of conjugates of ``diag(lambda)`` against the permutohedron."""
    n = cfg.n
    lam = np.array(cfg.eigenvalues)
    rep = VerificationReport("schur-horn")
    rep.budgets.update(orbit=cfg.orbit_budget, directions=cfg.direction_budget, seed=seed)
    action = make_action("SO", n, "conjugation", seed=seed)
    sigma = diagonal_section(n)
    v = svec(np.diag(lam))
    orb = orbit(action, v, budget=cfg.orbit_budget, seed=seed)
    diag = sigma.coords(orb.points)
    weyl = np.unique(np.array(list(itertools.permutations(lam))), axis=0)
    rep.record("weyl_vertices", len(weyl))
    rep.record("projected_points", len(diag))
    weyl_oracle = SupportOracle(weyl)

    def member(chunk):
        return [conv_membership(weyl_oracle, d, tol=cfg.inclusion_tol) for d in chunk]

    chunks = np.array_split(diag, max(1, min(jobs, len(diag))))
    results = [r for part in parallel_map(member, chunks, jobs) for r in part]
    dists = np.array([r.distance for r in results])
    rep.check("inclusion_violations", int(sum(not r.inside for r in results)), "==", 0)
    rep.record("max_inclusion_distance", dists.max())
    rep.record("unconverged_memberships", sum(not r.converged for r in results))
    maj = majorization_violation(diag, lam)
    rep.check("majorization_violations", int(np.sum(maj > cfg.inclusion_tol)), "==", 0)
    rep.record("max_majorization_excess", maj.max())

    gap = hull_hausdorff(diag, weyl, cfg.direction_budget, seed)
    ok = rep.check("hausdorff_gap", gap, "<=", cfg.tol)
    hard_fail = any(not rep.tolerances[k]["pass"] for k in ("inclusion_violations", "majorization_violations"))
    if not ok and not hard_fail:
        rep.status = "unconverged"
        rep.notes.append(f"orbit budget {cfg.orbit_budget} leaves a support gap of {gap:.3g}")
    rep.verdict = {"pass": "projection-equals-permutohedron", "unconverged": "budget-too-small"}.get(
        rep.status, "inclusion-violated")
    rep.details["tables"] = {"projected_diagonals": diag, "weyl_orbit": weyl}
    return rep


# ---------------------------------------------------------------------------
# fat sections


@dataclass
class FatSectionConfig:
    n: int = 4
    k: int = 3
    v: list[float] | None = None
    orbit_budget: int = 20000
    direction_budget: int = 500
    pairs: int = 100
    inclusion_tol: float = 1e-6
    hausdorff_tol: float = 0.05
    isometry_tol: float = 1e-3
    refine_budget: int = 4
    sample_check_points: int = 200

    def __post_init__(self):
        self.v = _as_float_list(self.v, "v")
        if not 1 <= self.k <= self.n - 1:
            raise ConfigError(f"need 1 <= k <= n-1, got n={self.n}, k={self.k}")
        if self.v is not None and len(self.v) not in (self.k * self.k, self.k * self.n):
            raise ConfigError(f"v must have k^2={self.k * self.k} (section coordinates) "
                              f"or kn={self.k * self.n} (ambient) entries")


def generic_section_point(k: int, rng: np.random.Generator, min_sv: float = 1e-6) -> np.ndarray:
    """Gaussian ``k x k`` block with linearly independent rows (checked)."""
    for _ in range(100):
        X = rng.standard_normal((k, k))
        if np.linalg.svd(X, compute_uv=False)[-1] > min_sv:
            return X
    raise RuntimeError("could not draw a generic section point")


def _section_point(cfg, sigma: Subspace, rng) -> tuple[np.ndarray, np.ndarray]:
    """Ambient and section coordinates of the configured (or generic) ``v``."""
    k = cfg.k
    if cfg.v is None:
        vs = generic_section_point(k, rng).ravel()
        vs /= np.linalg.norm(vs)
        return sigma.embed(vs), vs
    v = np.array(cfg.v)
    if len(v) == k * k:
        return sigma.embed(v), v
    off = sigma.distance(v)
    if off > TOL.exact:
        raise ConfigError(f"v is not in the section (distance {off:.3g})")
    return v, sigma.coords(v)


def scenario_fat_section(cfg: FatSectionConfig, seed: int = DEFAULT_SEED, jobs: int = 1) -> VerificationReport:
    """O(n) diagonally on k copies of R^n with the fat section (R^k)^k."""
    n, k = cfg.n, cfg.k
    rep = VerificationReport("fat-section")
    rep.budgets.update(orbit=cfg.orbit_budget, directions=cfg.direction_budget, pairs=cfg.pairs,
                       refine=cfg.refine_budget, seed=seed)
    G = make_action("O", n, "diagonal", copies=k, seed=seed)
    H = make_action("O", k, "diagonal", copies=k, seed=seed)
    sigma = block_section(n, k)
    rng = rng_for(seed, 50)
    v, vs = _section_point(cfg, sigma, rng)
    rep.details["v_section"] = vs
    orbitope = OrthogonalOrbitope(vs.reshape(k, k))

    # (i) pointwise inclusion of projected orbit samples in the slice orbitope
    F = orbit(G, v, budget=cfg.orbit_budget, seed=seed)
    proj = sigma.coords(F.points)
    res = parallel_map(lambda y: orbitope.membership(y, tol=cfg.inclusion_tol), list(proj), jobs)
    rep.check("inclusion_violations", sum(not r.inside for r in res), "==", 0)
    rep.record("max_inclusion_excess", max(r.upper_bound for r in res))

    # sampled-hull view of the same inclusion, for comparison only
    H_samples = orbit(H, vs, budget=cfg.orbit_budget, seed=seed).points
    m = min(cfg.sample_check_points, len(proj))
    if m:
        so = SupportOracle(H_samples)
        sd = [conv_membership(so, y, tol=cfg.inclusion_tol, max_iter=300).distance for y in proj[:m]]
        rep.record("sampled_hull_max_distance", max(sd))

    # (ii) support of the projected orbit (group-refined) against the exact slice orbitope
    U = sample_directions(k * k, cfg.direction_budget, seed)
    G_support = OrbitSupport(G, v, budget=2000, refine_budget=cfg.refine_budget, seed=seed)
    hG, _ = G_support.support_many(sigma.embed(U))
    hS, _ = orbitope.support_many(U)
    rep.check("hausdorff_projection_vs_slice", float(np.max(np.abs(hG - hS))), "<=", cfg.hausdorff_tol)
    h_raw, _ = SupportOracle(proj).support_many(U)
    h_raw_slice, _ = SupportOracle(H_samples).support_many(U)
    rep.record("raw_sample_gap_projection", float(np.max(hS - h_raw)))
    rep.record("raw_sample_gap_slice", float(np.max(hS - h_raw_slice)))

    # (iii) quotient isometry between the two orbit spaces
    W = np.array([generic_section_point(k, rng).ravel() for _ in range(2 * cfg.pairs)])
    W /= np.linalg.norm(W, axis=1, keepdims=True)

    def pair_gap(i):
        a, b = W[2 * i], W[2 * i + 1]
        dG = orbit_distance(G, sigma.embed(a), sigma.embed(b), refine_budget=cfg.refine_budget,
                            seed=seed + i, method="sampled")
        dH = orbit_distance(H, a, b, method="exact")
        return abs(dG - dH)

    gaps = parallel_map(pair_gap, range(cfg.pairs), jobs)
    if gaps:
        rep.check("isometry_max_gap", max(gaps), "<=", cfg.isometry_tol)
    rep.verdict = "fat-section-identities-hold" if rep.passed else "fat-section-mismatch"
    rep.details["tables"] = {"projected_orbit": proj}
    return rep


# ---------------------------------------------------------------------------
# orbitope gap


@dataclass
class OrbitopeGapConfig:
    n: int = 4
    k: int = 3
    v: list[float] | None = None
    orbit_budget: int = 2000
    patches: int = 8
    step: float = 1e-6
    rank_tol: float = 1e-4

    def __post_init__(self):
        self.v = _as_float_list(self.v, "v")
        if not 1 <= self.k <= self.n - 1:
            raise ConfigError(f"need 1 <= k <= n-1, got n={self.n}, k={self.k}")
        if not 3 * self.k > 2 * self.n - 1:
            raise ConfigError(f"k={self.k} violates k > (2n-1)/3 = {(2 * self.n - 1) / 3:.4g} for n={self.n}")
        if self.v is not None and len(self.v) not in (self.k * self.k, self.k * self.n):
            raise ConfigError(f"v must have {self.k * self.k} or {self.k * self.n} entries")


def _local_dimension(G: GroupAction, sigma: Subspace, v: np.ndarray, gs: np.ndarray,
                     step: float, rank_tol: float) -> tuple[int, int]:
    """Largest affine dimension of small patches of the projected orbit, and the Jacobian rank."""
    lie = so_basis(G.n)
    best_patch, best_jac = 0, 0
    for g in gs:
        base = G.act(g, v)
        patch = [sigma.coords(base)]
        jac = []
        for A in lie:
            patch.append(sigma.coords(G.act(expm(step * A) @ g, v)))
            jac.append(sigma.coords(G.act(A @ g, v)))  # linear in the group element
        best_patch = max(best_patch, affine_dimension(np.array(patch), rel_tol=rank_tol))
        J = np.array(jac)
        s = np.linalg.svd(J, compute_uv=False)
        best_jac = max(best_jac, int(np.sum(s > 1e-9 * max(s[0], 1e-300))) if s[0] > TOL.degenerate else 0)
    return best_patch, best_jac


def _gap_dimensions(cfg: OrbitopeGapConfig, v, vs, seed: int, scale: int) -> dict:
    n, k = cfg.n, cfg.k
    G = make_action("O", n, "diagonal", copies=k, seed=seed)
    H = make_action("O", k, "diagonal", copies=k, seed=seed)
    sigma = block_section(n, k)
    gs = G.group.sample(cfg.patches * scale, rng_for(seed, 60, scale))
    a, jac = _local_dimension(G, sigma, v, gs, cfg.step, cfg.rank_tol)
    hs = orbit(H, vs, budget=cfg.orbit_budget * scale, seed=seed + scale)
    b = affine_dimension(hs.points, rel_tol=1e-9)
    proj = sigma.coords(orbit(G, v, budget=cfg.orbit_budget * scale, seed=seed + scale).points)
    return {"a": a, "jac": jac, "b": b, "global": affine_dimension(proj, rel_tol=1e-9)}


def scenario_orbitope_gap(cfg: OrbitopeGapConfig, seed: int = DEFAULT_SEED, jobs: int = 1) -> VerificationReport:
    """Dimension of the projected orbit against the dimension of the slice orbitope.

    The projection of the ``G``-orbit into the section is a compact set of
    dimension at most ``kn - k(k+1)/2`` (the orbit dimension), measured as
    the affine dimension of small patches around sampled orbit points. The
    orbitope of the slice is full-dimensional, ``k^2``.
    """
    n, k = cfg.n, cfg.k
    rep = VerificationReport("orbitope-gap")
    rep.budgets.update(orbit=cfg.orbit_budget, patches=cfg.patches, seed=seed)
    sigma = block_section(n, k)
    rng = rng_for(seed, 51)
    v, vs = _section_point(cfg, sigma, rng)
    bound = k * n - k * (k + 1) // 2
    rep.record("orbit_dimension_bound", bound)
    rep.record("full_dimension", k * k)
    base = _gap_dimensions(cfg, v, vs, seed, 1)
    doubled = _gap_dimensions(cfg, v, vs, seed, 2)
    rep.check("projected_dimension", base["a"], "<=", bound)
    rep.check("orbitope_dimension", base["b"], "==", k * k)
    rep.check("dimension_gap", base["b"] - base["a"], ">", 0)
    rep.record("jacobian_rank", base["jac"])
    rep.record("global_affine_dimension", base["global"])
    changes = sum(base[key] != doubled[key] for key in ("a", "b", "jac"))
    rep.check("rank_changes_under_doubling", changes, "==", 0)
    if np.linalg.norm(vs) <= TOL.degenerate:
        rep.verdict = "degenerate-seed"
        rep.status = "fail"
    else:
        rep.verdict = "strict-containment" if rep.passed else "no-gap"
    return rep


# ---------------------------------------------------------------------------
# finite counterexample


@dataclass
class FiniteCounterexampleConfig:
    group: str = "pm2"
    v: list[float] | None = None
    tol: float = 1e-6
    probe_budget: int = 100
    pair_budget: int = 200

    def __post_init__(self):
        self.v = _as_float_list(self.v, "v")


def scenario_finite_counterexample(cfg: FiniteCounterexampleConfig, seed: int = DEFAULT_SEED,
                                   jobs: int = 1) -> VerificationReport:
    """With the whole space as section, a nontrivial finite orbit is not convex."""
    action = parse_action(cfg.group, seed)
    if not action.is_exact:
        raise ConfigError("finite counterexample needs a finite group")
    order = len(action.elements())
    if order < 2:
        raise ConfigError("group must be nontrivial (order >= 2)")
    dim = action.ambient_dim
    v = np.array(cfg.v) if cfg.v is not None else np.eye(dim)[0]
    if len(v) != dim:
        raise ConfigError(f"v must have {dim} coordinates")
    rep = VerificationReport("finite-counterexample")
    rep.budgets.update(probes=cfg.probe_budget, pairs=cfg.pair_budget, seed=seed)
    rep.record("group_order", order)
    orb = orbit(action, v)
    rep.record("orbit_size", len(orb.points))
    if len(orb.points) < 2:
        rep.status = "fail"
        rep.verdict = "degenerate-seed"
        rep.notes.append("v is fixed by the whole group")
        return rep

    S = SaturatedSet.fibers(action, [v])
    mid = midpoint_convexity_oracle(S, cfg.pair_budget, cfg.tol, seed)
    rep.check("midpoint_certificates", mid.metrics["violations"], ">", 0)
    cert = mid.details.get("certificate")
    if cert is not None:
        recheck = orbit_distance(action, v, cert["midpoint"], method="exact")
        rep.check("certificate_margin_ratio", recheck / cfg.tol, ">=", 10.0)
        rep.details["certificate"] = cert
    det = convexity_detect(S, cfg.probe_budget, seed=seed)
    rep.check("detector_min_slope", det.metrics.get("min_raw_slope", 1.0), "<", 1.0 - 0.02)
    rep.details["witness"] = det.details.get("witness")

    # with the whole space as section the inclusion of the projection is trivial
    oracle = SupportOracle(orb.points)
    bad = sum(not conv_membership(oracle, p).inside for p in orb.points)
    rep.check("inclusion_violations", bad, "==", 0)
    rep.verdict = "orbit-not-convex" if rep.passed else "no-certificate"
    return rep


# ---------------------------------------------------------------------------
# fixed points


@dataclass
class FixedPointsConfig:
    action: str = "S3"
    translations: int = 20
    tol: float = 1e-8
    sampled_tol: float = 1e-2
    orbit_budget: int = 500
    fat_pairs: list[list[int]] = field(default_factory=lambda: [[4, 3], [3, 2]])

    def __post_init__(self):
        try:
            self.fat_pairs = [[int(a), int(b)] for a, b in self.fat_pairs]
        except (TypeError, ValueError):
            raise ConfigError("fat_pairs must be a list of [n, k] pairs") from None


def _set_hausdorff(A: np.ndarray, B: np.ndarray) -> float:
    d = np.linalg.norm(A[:, None, :] - B[None, :, :], axis=2)
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


def scenario_fixed_points(cfg: FixedPointsConfig, seed: int = DEFAULT_SEED, jobs: int = 1) -> VerificationReport:
    """Fixed vectors form a subspace that splits off orbits, and convex invariant sets meet it."""
    action = parse_action(cfg.action, seed)
    rep = VerificationReport("fixed-points")
    rep.budgets.update(translations=cfg.translations, orbit=cfg.orbit_budget, seed=seed)
    exact = action.is_exact
    tol = cfg.tol if exact else cfg.sampled_tol
    V0 = fixed_point_subspace(action, seed=seed)
    rep.record("fixed_dimension", V0.dim)
    rng = rng_for(seed, 70)

    # (i) basis vectors are fixed by every element tested
    gs = action.elements() if exact else action.sample_elements(50, rng)
    moved = 0.0
    for b in V0.basis:
        moved = max(moved, float(np.abs(action.act(gs, b) - b).max()))
    rep.check("fixed_basis_motion", moved, "<=", cfg.tol)

    # (ii) translation along V0 maps orbits to orbits
    worst = 0.0
    for i in range(cfg.translations if V0.dim else 0):
        v = rng.standard_normal(action.ambient_dim)
        u0 = V0.embed(rng.standard_normal(V0.dim))
        A = orbit(action, v + u0, budget=cfg.orbit_budget, seed=seed + i).points
        B = orbit(action, v, budget=cfg.orbit_budget, seed=seed + i).points + u0
        worst = max(worst, _set_hausdorff(A, B))
    rep.check("translation_hausdorff", worst, "<=", cfg.tol)

    # (iii) fixed vectors of the reduced action on a fat section are V0 cap Sigma
    mism = 0
    for n, k in cfg.fat_pairs:
        G = make_action("O", n, "diagonal", copies=k, seed=seed)
        H = make_action("O", k, "diagonal", copies=k, seed=seed)
        inter = fixed_point_subspace(G, seed=seed).intersect(block_section(n, k))
        red = fixed_point_subspace(H, seed=seed)
        rep.record(f"fat_{n}_{k}_fixed_in_section", inter.dim)
        rep.record(f"fat_{n}_{k}_reduced_fixed", red.dim)
        mism += inter.dim != red.dim
    rep.check("fat_fixed_mismatches", mism, "==", 0)

    # (iv) the point of a convex invariant set nearest to the origin is fixed
    v = rng.standard_normal(action.ambient_dim) + V0.embed(np.ones(V0.dim))
    hull = orbit(action, v, budget=cfg.orbit_budget, seed=seed).points
    near = conv_membership(SupportOracle(hull), np.zeros(action.ambient_dim)).nearest
    rep.check("nearest_point_off_fixed", float(V0.distance(near)), "<=", tol)
    centroid = hull.mean(axis=0)
    # a sampled orbit's centroid carries Monte Carlo error of order |v| / sqrt(budget)
    ctol = tol if exact else max(tol, 4.0 * float(np.linalg.norm(v)) / math.sqrt(len(hull)))
    rep.check("centroid_off_fixed", float(V0.distance(centroid)), "<=", ctol)
    rep.verdict = "fixed-subspace-consistent" if rep.passed else "fixed-subspace-violation"
    return rep


# ---------------------------------------------------------------------------
# slope criterion


SUITE_ACTIONS = ("O2", "O2x2", "S3", "D5")


def saturated_suite(count: int = 50, seed: int = DEFAULT_SEED) -> list[tuple[SaturatedSet, bool]]:
    """Random saturated sets with their known convexity.

    Radial intervals ``[0, b]`` are balls and ``[a, b]`` with ``a > 0`` are
    shells; a union of orbits is convex only when it is a single fixed point;
    sublevel sets of support functions are convex.
    """
    rng = rng_for(seed, 80)
    out = []
    for i in range(count):
        action = parse_action(SUITE_ACTIONS[i % len(SUITE_ACTIONS)], seed)
        dim = action.ambient_dim
        kinds = ["radial", "fibers"] + (["sublevel"] if action.is_exact or action.copies == 1 else [])
        kind = kinds[int(rng.integers(len(kinds)))]
        if kind == "radial":
            a = 0.0 if rng.uniform() < 0.5 else float(rng.uniform(0.3, 0.8))
            out.append((SaturatedSet.radial(action, a, a + float(rng.uniform(0.2, 1.0))), a == 0.0))
        elif kind == "fibers":
            V0 = fixed_point_subspace(action, seed=seed)
            if V0.dim and rng.uniform() < 0.3:
                rep = V0.embed(rng.standard_normal(V0.dim))
                out.append((SaturatedSet.fibers(action, [rep]), True))
                continue
            m = int(rng.integers(1, 3))
            reps = rng.standard_normal((m, dim))
            reps *= (rng.uniform(0.5, 2.0, m) / np.linalg.norm(reps, axis=1))[:, None]
            out.append((SaturatedSet.fibers(action, reps), False))
        else:
            w = rng.standard_normal(dim)
            w /= np.linalg.norm(w)
            out.append((SaturatedSet.basic_sublevel(action, w, float(rng.uniform(0.5, 2.0))), True))
    return out


@dataclass
class SlopeCriterionConfig:
    probe_budget: int = 200
    suite_size: int = 50
    suite_probe_budget: int = 100
    pair_budget: int = 200
    tol: float = 0.02
    convex_min_slope: float = 0.98
    witness_max_slope: float = -0.9


def scenario_slope_criterion(cfg: SlopeCriterionConfig, seed: int = DEFAULT_SEED,
                             jobs: int = 1) -> VerificationReport:
    """Slope criterion on the disk and circle for O(2), plus the randomized agreement suite."""
    rep = VerificationReport("slope-criterion")
    rep.budgets.update(probes=cfg.probe_budget, suite=cfg.suite_size,
                       suite_probes=cfg.suite_probe_budget, pairs=cfg.pair_budget, seed=seed)
    O2 = parse_action("O2", seed)
    disk = convexity_detect(SaturatedSet.radial(O2, 0.0, 1.0), cfg.probe_budget, tol=cfg.tol, seed=seed)
    rep.check("disk_min_raw_slope", disk.metrics["min_raw_slope"], ">=", cfg.convex_min_slope)
    circle = convexity_detect(SaturatedSet.radial(O2, 1.0, 1.0), cfg.probe_budget, tol=cfg.tol, seed=seed)
    rep.check("circle_witness_slope", circle.metrics["min_raw_slope"], "<=", cfg.witness_max_slope)
    rep.record("circle_witness_norm", float(np.linalg.norm(circle.details["witness"]["base_point"])))
    rep.details["circle_witness"] = circle.details["witness"]

    suite = saturated_suite(cfg.suite_size, seed)

    def judge(item):
        i, (S, truth) = item
        d = convexity_detect(S, cfg.suite_probe_budget, tol=cfg.tol, seed=seed + i)
        m = midpoint_convexity_oracle(S, cfg.pair_budget, seed=seed + i)
        return {
            "index": i,
            "action": S.action.describe(),
            "set": S.to_json(),
            "known_convex": truth,
            "detector_convex": d.passed,
            "oracle_convex": m.passed,
            "min_raw_slope": d.metrics.get("min_raw_slope", float("nan")),
            "max_midpoint_distance": m.metrics["max_midpoint_distance"],
        }

    rows = parallel_map(judge, list(enumerate(suite)), jobs)
    rep.check("detector_oracle_disagreements", sum(r["detector_convex"] != r["oracle_convex"] for r in rows), "==", 0)
    rep.check("detector_truth_disagreements", sum(r["detector_convex"] != r["known_convex"] for r in rows), "==", 0)
    rep.record("suite_convex_sets", sum(r["known_convex"] for r in rows))
    rep.details["suite"] = rows
    rep.verdict = "slope-criterion-consistent" if rep.passed else "slope-criterion-mismatch"
    return rep


# ---------------------------------------------------------------------------
# registry and artifacts


@dataclass(frozen=True)
class ScenarioEntry:
    config: type
    run: Callable


SCENARIOS: dict[str, ScenarioEntry] = {
    "schur-horn": ScenarioEntry(SchurHornConfig, scenario_schur_horn),
    "fat-section": ScenarioEntry(FatSectionConfig, scenario_fat_section),
    "orbitope-gap": ScenarioEntry(OrbitopeGapConfig, scenario_orbitope_gap),
    "finite-counterexample": ScenarioEntry(FiniteCounterexampleConfig, scenario_finite_counterexample),
    "fixed-points": ScenarioEntry(FixedPointsConfig, scenario_fixed_points),
    "slope-criterion": ScenarioEntry(SlopeCriterionConfig, scenario_slope_criterion),
}


def make_config(name: str, params: dict | None = None):
    if name not in SCENARIOS:
        raise ConfigError(f"unknown scenario {name!r}; choose from {', '.join(SCENARIOS)}")
    return _strict(SCENARIOS[name].config, dict(params or {}))


def flatten_numbers(obj: Any, prefix: str = "") -> list[tuple[str, Any]]:
    """All numeric leaves of a JSON-like object as ``(path, value)`` pairs."""
    out: list[tuple[str, Any]] = []
    if isinstance(obj, dict):
        for key in sorted(obj):
            out += flatten_numbers(obj[key], f"{prefix}.{key}" if prefix else str(key))
    elif isinstance(obj, (list, tuple)):
        for i, item in enumerate(obj):
            out += flatten_numbers(item, f"{prefix}[{i}]")
    elif isinstance(obj, bool):
        pass
    elif isinstance(obj, (int, float)):
        out.append((prefix, obj))
    elif isinstance(obj, str) and obj in ("nan", "inf", "-inf"):
        out.append((prefix, obj))
    return out


def _csv_text(header: list[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in row])
    return buf.getvalue()


def write_artifacts(report: VerificationReport, output_dir: str, seed: int,
                    tables: dict[str, np.ndarray] | None = None,
                    texts: dict[str, str] | None = None) -> list[str]:
    """Write ``<id>_seed<seed>.json``, a CSV of every number in the report, and extra tables."""
    os.makedirs(output_dir, exist_ok=True)
    stem = f"{report.scenario_id}_seed{seed}"
    files = {}
    for tname, arr in sorted((tables or {}).items()):
        arr = np.atleast_2d(np.asarray(arr, dtype=float))
        header = [f"x{i}" for i in range(arr.shape[1])]
        files[f"{stem}_{tname}.csv"] = _csv_text(header, arr.tolist())
    for tname, text in sorted((texts or {}).items()):
        files[f"{stem}_{tname}.csv"] = text
    report.artifacts = sorted(files) + [f"{stem}_values.csv"]
    files[f"{stem}_values.csv"] = _csv_text(["path", "value"], flatten_numbers(report.to_dict()))
    files[f"{stem}.json"] = report.to_json() + "\n"
    for fname, text in files.items():
        with open(os.path.join(output_dir, fname), "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return sorted(files)


def run_scenario(name: str, params: dict | None = None, seed: int = DEFAULT_SEED,
                 output_dir: str | None = None, jobs: int = 1) -> VerificationReport:
    """Run a registered scenario; with ``output_dir`` write JSON and CSV artifacts."""
    cfg = make_config(name, params)
    report = SCENARIOS[name].run(cfg, seed=seed, jobs=jobs)
    report.config = {"scenario": name, "seed": int(seed), "params": dataclasses.asdict(cfg)}
    tables = report.details.pop("tables", {})
    if output_dir is not None:
        write_artifacts(report, output_dir, seed, tables)
    return report
