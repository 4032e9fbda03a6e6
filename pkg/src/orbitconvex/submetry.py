"""Saturated sets, distance functions, ascending slopes and convexity tests.

A saturated set is a union of orbits. Its distance function ``f`` is basic
(constant on orbits), and the preimage of the set is convex exactly when the
raw ascending slope of ``f`` in the quotient equals one at every point
outside the set. ``convexity_detect`` samples that criterion;
``midpoint_convexity_oracle`` tests convexity directly on preimage points.
"""

from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT_SEED, TOL
from .convex import SupportOracle, conv_membership
from .geomcore import as_point
from .groups import (
    CONTINUOUS_FAMILIES,
    GroupAction,
    OrbitCloud,
    OrbitSupport,
    fixed_point_subspace,
    nearest_orbit_point,
    orbit,
    orbit_distance,
    orbit_distances,
    rng_for,
)
from .report import VerificationReport

DEFAULT_RADII = (1e-1, 1e-2, 1e-3)


def _unit_rows(rng: np.random.Generator, count: int, dim: int) -> np.ndarray:
    g = rng.standard_normal((count, dim))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


# ---------------------------------------------------------------------------
# polyhedral projection for sublevel sets of support functions


def _project_polyhedron(F: np.ndarray, c: float, p: np.ndarray, max_iter: int = 500) -> np.ndarray:
    """Nearest point of ``{x : F x <= c}`` (with ``0`` feasible) to ``p``.

    Primal active-set method with identity Hessian started from the origin.
    """
    if np.all(F @ p <= c):
        return p.copy()
    x = np.zeros_like(p)
    W: list[int] = []
    for _ in range(max_iter):
        if W:
            A = F[W]
            q, _ = np.linalg.qr(A.T)
            d = (p - x) - q @ (q.T @ (p - x))
        else:
            d = p - x
        if np.linalg.norm(d) <= 1e-13 * (1.0 + np.linalg.norm(p)):
            if not W:
                return x
            lam = np.linalg.lstsq(F[W].T, p - x, rcond=None)[0]
            j = int(np.argmin(lam))
            if lam[j] >= -1e-12:
                return x
            W.pop(j)
            continue
        Fd = F @ d
        slack = c - F @ x
        alpha, block = 1.0, -1
        for i in np.flatnonzero(Fd > 1e-14):
            if i in W:
                continue
            a = max(slack[i], 0.0) / Fd[i]
            if a < alpha:
                alpha, block = a, int(i)
        x = x + alpha * d
        if block >= 0:
            W.append(block)
    raise RuntimeError("active-set projection did not converge")


class _FaceTable:
    """KKT enumeration over all independent active sets of ``{x : F x <= c}``.

    For each candidate active set ``A`` the projection onto ``{A x = c}`` and
    its multipliers are affine in the query point, so a batch of queries is
    resolved with a few matrix products. Used when the number of active sets
    is small; otherwise queries go through the iterative method.
    """

    MAX_SETS = 4000

    def __init__(self, F: np.ndarray, c: float):
        m, n = F.shape
        self.F, self.c = F, c
        total = sum(math.comb(m, k) for k in range(1, min(m, n) + 1))
        self.usable = total <= self.MAX_SETS
        if not self.usable:
            return
        A_all, G_all, mask = [], [], []
        for k in range(1, min(m, n) + 1):
            for idx in itertools.combinations(range(m), k):
                A = F[list(idx)]
                G = A @ A.T
                if np.linalg.matrix_rank(G, tol=1e-10) < k:
                    continue
                Ap = np.zeros((n, n))
                Gp = np.zeros((n, n))
                Ap[:k] = A
                Gp[:k, :k] = np.linalg.inv(G)
                A_all.append(Ap)
                G_all.append(Gp)
                mask.append(np.arange(n) < k)
        self.A = np.array(A_all)  # (K, n, n), rows beyond k are zero
        self.Gi = np.array(G_all)
        self.rows = np.array(mask, dtype=float)

    def project(self, Y: np.ndarray) -> np.ndarray:
        out = Y.copy()
        scale = 1.0 + np.abs(Y).max(initial=0.0)
        pending = np.flatnonzero(np.any(Y @ self.F.T > self.c, axis=1))
        if len(pending) == 0:
            return out
        Yp = Y[pending]
        r = np.einsum("kij,pj->pki", self.A, Yp) - self.c * self.rows[None]
        lam = np.einsum("kij,pkj->pki", self.Gi, r)
        X = Yp[:, None, :] - np.einsum("pki,kij->pkj", lam, self.A)
        ok = (lam.min(axis=2) >= -1e-10 * scale) & np.all(X @ self.F.T <= self.c + 1e-10 * scale, axis=2)
        d = np.where(ok, np.linalg.norm(X - Yp[:, None, :], axis=2), np.inf)
        j = d.argmin(axis=1)
        sol = X[np.arange(len(Yp)), j]
        for t in np.flatnonzero(~np.isfinite(d[np.arange(len(Yp)), j])):
            sol[t] = _project_polyhedron(self.F, self.c, Yp[t])
        out[pending] = sol
        return out


# ---------------------------------------------------------------------------
# saturated sets


@dataclass(eq=False)
class SaturatedSet:
    """A closed invariant subset of the ambient space of ``action``.

    ``kind`` is one of ``"radial"`` (points with norm in ``interval``),
    ``"fibers"`` (union of the orbits of ``reps``) or ``"basic-sublevel"``
    (``{x : h(G w, x) <= level}`` for the orbit of ``function_seed``).
    """

    action: GroupAction
    kind: str
    interval: tuple[float, float] | None = None
    reps: np.ndarray | None = None
    function_seed: np.ndarray | None = None
    level: float | None = None
    _facets: np.ndarray | None = field(default=None, repr=False)
    _faces: _FaceTable | None = field(default=None, repr=False)
    _fixed: object = field(default=None, repr=False)

    def __post_init__(self):
        dim = self.action.ambient_dim
        if self.kind == "radial":
            a, b = (float(t) for t in self.interval)
            if not (0.0 <= a <= b) or not math.isfinite(b):
                raise ValueError(f"radial interval must satisfy 0 <= a <= b < inf, got {self.interval}")
            self.interval = (a, b)
        elif self.kind == "fibers":
            reps = np.atleast_2d(np.asarray(self.reps, dtype=float))
            if reps.size == 0:
                raise ValueError("fiber set needs at least one representative")
            if reps.shape[1] != dim:
                raise ValueError(f"representatives must have {dim} coordinates")
            self.reps = reps
        elif self.kind == "basic-sublevel":
            w = as_point(self.function_seed, dim)
            self.function_seed = w
            self.level = float(self.level)
            if self.level <= 0:
                raise ValueError("sublevel sets need a positive level")
            if self.action.is_exact:
                self._facets = orbit(self.action, w).points
                self._faces = _FaceTable(self._facets, self.level)
            elif self.action.family in CONTINUOUS_FAMILIES and self.action.rep == "standard":
                nw = float(np.linalg.norm(w))
                if nw <= TOL.degenerate:
                    raise ValueError("support of the zero orbit has no bounded sublevel set")
                self._facets = None  # h(G w, x) = |w| |x|: a ball
            else:
                raise ValueError("basic-sublevel sets need an exact action or standard O(n)/SO(n)")
        else:
            raise ValueError(f"unknown saturated set kind {self.kind!r}")

    # constructors
    @classmethod
    def radial(cls, action: GroupAction, a: float, b: float) -> "SaturatedSet":
        return cls(action, "radial", interval=(a, b))

    @classmethod
    def fibers(cls, action: GroupAction, reps) -> "SaturatedSet":
        return cls(action, "fibers", reps=reps)

    @classmethod
    def basic_sublevel(cls, action: GroupAction, function_seed, level: float) -> "SaturatedSet":
        return cls(action, "basic-sublevel", function_seed=function_seed, level=level)

    @property
    def dim(self) -> int:
        return self.action.ambient_dim

    def fixed_subspace(self):
        """Fixed-point subspace of the action (cached)."""
        if self._fixed is None:
            self._fixed = fixed_point_subspace(self.action)
        return self._fixed

    @property
    def _ball_radius(self) -> float | None:
        if self.kind == "basic-sublevel" and self._facets is None:
            return self.level / float(np.linalg.norm(self.function_seed))
        return None

    def extent(self) -> float:
        """Radius of a ball around the origin holding the part of the set that matters."""
        if self.kind == "radial":
            return self.interval[1]
        if self.kind == "fibers":
            return float(np.linalg.norm(self.reps, axis=1).max())
        rb = self._ball_radius
        if rb is not None:
            return rb
        return 2.0 * self.level / float(np.linalg.norm(self._facets, axis=1).min())

    # metric queries
    def distances(self, Y) -> np.ndarray:
        """``f(y)``: Euclidean distance from each row of ``Y`` to the preimage."""
        Y = np.atleast_2d(np.asarray(Y, dtype=float))
        if Y.shape[1] != self.dim:
            raise ValueError("dimension mismatch")
        if self.kind == "radial":
            a, b = self.interval
            r = np.linalg.norm(Y, axis=1)
            return np.maximum(np.maximum(a - r, r - b), 0.0)
        if self.kind == "fibers":
            return np.min([orbit_distances(self.action, Y, rep) for rep in self.reps], axis=0)
        rb = self._ball_radius
        if rb is not None:
            return np.maximum(np.linalg.norm(Y, axis=1) - rb, 0.0)
        return np.linalg.norm(Y - self.nearest_many(Y), axis=1)

    def distance(self, x) -> float:
        return float(self.distances(as_point(x, self.dim)[None])[0])

    def nearest_many(self, Y) -> np.ndarray:
        Y = np.atleast_2d(np.asarray(Y, dtype=float))
        if self.kind == "basic-sublevel" and self._facets is not None:
            if self._faces.usable:
                return self._faces.project(Y)
            return np.array([_project_polyhedron(self._facets, self.level, y) for y in Y])
        return np.array([self.nearest(y) for y in Y])

    def nearest(self, x) -> np.ndarray:
        """A point of the preimage closest to ``x``."""
        x = np.asarray(x, dtype=float)
        if self.kind == "fibers":
            d = [orbit_distances(self.action, x[None], rep)[0] for rep in self.reps]
            rep = self.reps[int(np.argmin(d))]
            return nearest_orbit_point(self.action, rep, x)
        if self.kind == "basic-sublevel" and self._facets is not None:
            return _project_polyhedron(self._facets, self.level, x)
        a, b = self.interval if self.kind == "radial" else (0.0, self._ball_radius)
        r = float(np.linalg.norm(x))
        if a <= r <= b:
            return x.copy()
        if r <= TOL.degenerate:
            e = np.zeros(self.dim)
            e[0] = a
            return e
        return x * (min(max(r, a), b) / r)

    def contains(self, x, tol: float = 1e-9) -> bool:
        return self.distance(x) <= tol

    def sample_preimage(self, count: int, rng: np.random.Generator) -> np.ndarray:
        """Points of the preimage; radial and sublevel samples favour the boundary."""
        dim = self.dim
        if self.kind == "fibers":
            idx = rng.integers(0, len(self.reps), size=count)
            gs = self.action.sample_elements(count, rng)
            return np.array([self.action.act(g, self.reps[i]) for g, i in zip(gs, idx)])
        if self.kind == "radial" or self._ball_radius is not None:
            a, b = self.interval if self.kind == "radial" else (0.0, self._ball_radius)
            choice = rng.integers(0, 3, size=count)
            r = np.where(choice == 0, a, np.where(choice == 1, b, rng.uniform(a, b, size=count)))
            return _unit_rows(rng, count, dim) * r[:, None]
        R = self.extent()
        Y = _unit_rows(rng, count, dim) * (R * rng.uniform(0, 1, size=count) ** (1 / dim))[:, None]
        out = self.nearest_many(Y)
        half = count // 2
        out[:half] = self.nearest_many(Y[:half] * 3.0)  # boundary points
        return out

    # serialisation
    def to_json(self) -> dict:
        if self.kind == "radial":
            return {"kind": "radial", "interval": list(self.interval)}
        if self.kind == "fibers":
            return {"kind": "fibers", "reps": self.reps.tolist()}
        return {"kind": "basic-sublevel", "function": "support-of-orbit",
                "seed_point": self.function_seed.tolist(), "level": self.level}

    @classmethod
    def from_json(cls, obj: dict, action: GroupAction) -> "SaturatedSet":
        kind = obj.get("kind")
        if kind == "radial":
            return cls.radial(action, *obj["interval"])
        if kind == "fibers":
            return cls.fibers(action, obj["reps"])
        if kind == "basic-sublevel":
            if obj.get("function", "support-of-orbit") != "support-of-orbit":
                raise ValueError(f"unknown basic function {obj['function']!r}")
            return cls.basic_sublevel(action, obj["seed_point"], obj["level"])
        raise ValueError(f"unknown saturated set kind {kind!r}")


def distance_to_saturated(S: SaturatedSet, x) -> float:
    """Distance from ``x`` to the preimage of ``S``."""
    return S.distance(x)


# ---------------------------------------------------------------------------
# ascending slope


@dataclass
class SlopeEstimate:
    base_point: np.ndarray
    radii: list[float]
    per_radius_sup: list[float]
    extrapolated: float
    sample_budget: int
    seed: int
    f_value: float = 0.0

    @property
    def clamped(self) -> float:
        return max(0.0, self.extrapolated)

    def csv_rows(self) -> list[dict]:
        x = " ".join(repr(float(t)) for t in self.base_point)
        return [
            {"x": x, "radius": r, "sup": s, "extrapolated": self.extrapolated}
            for r, s in zip(self.radii, self.per_radius_sup)
        ]

    def to_json(self) -> dict:
        return {
            "base_point": [float(t) for t in self.base_point],
            "radii": [float(r) for r in self.radii],
            "per_radius_sup": [float(s) for s in self.per_radius_sup],
            "extrapolated": float(self.extrapolated),
            "clamped": float(self.clamped),
            "sample_budget": int(self.sample_budget),
            "seed": int(self.seed),
            "f_value": float(self.f_value),
        }


def slope_csv(estimates: list[SlopeEstimate]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=["x", "radius", "sup", "extrapolated"], lineterminator="\n")
    w.writeheader()
    for est in estimates:
        for row in est.csv_rows():
            w.writerow({k: (repr(float(v)) if k != "x" else v) for k, v in row.items()})
    return buf.getvalue()


def ascending_slope(S: SaturatedSet, x, radii=DEFAULT_RADII, per_radius_budget: int = 32,
                    seed: int = DEFAULT_SEED, relative: bool = True, index: int = 0) -> SlopeEstimate:
    """Sampled ascending slope of the distance function at ``x``.

    For each radius ``r`` the sup of ``(f(y) - f(x)) / d(y, x)`` is taken over
    points ``y`` on the sphere of radius ``r`` around ``x``, where ``d`` is the
    quotient distance. Candidate directions are the two along the segment to
    a nearest preimage point, the fixed-subspace axes and ``per_radius_budget``
    uniform directions; the best one is then polished by a short random
    hill-climb on the sphere. With ``relative=True`` the radii are multiples
    of ``f(x)``.
    """
    x = np.asarray(as_point(x, S.dim), dtype=float)
    fx = S.distance(x)
    radii_abs = sorted((float(r) * fx if relative else float(r) for r in radii), reverse=True)
    if fx <= radii_abs[-1] or fx <= 0:
        raise ValueError(
            f"x must lie outside S with margin: distance {fx:.3g} <= smallest radius {radii_abs[-1]:.3g}"
        )
    rng = rng_for(seed, 21, index)
    p = S.nearest(x)
    u_ray = (x - p) / max(np.linalg.norm(x - p), TOL.degenerate)
    V0 = S.fixed_subspace().basis
    fixed_dirs = np.vstack([u_ray, -u_ray, V0, -V0])
    sups = []
    for r in radii_abs:

        def ratios(U):
            Y = x[None] + r * U
            num = S.distances(Y) - fx
            den = orbit_distances(S.action, Y, x)
            return np.where(den > 1e-6 * r, num / np.maximum(den, 1e-300), -np.inf)

        U = np.vstack([fixed_dirs, _unit_rows(rng, per_radius_budget, S.dim)])
        vals = ratios(U)
        j = int(np.argmax(vals))
        best_u, best = U[j], vals[j]
        for spread in (0.3, 0.3, 0.1, 0.1, 0.03, 0.03, 0.01, 0.003):
            cand = best_u[None] + spread * rng.standard_normal((16, S.dim))
            cand /= np.linalg.norm(cand, axis=1, keepdims=True)
            cv = ratios(cand)
            k = int(np.argmax(cv))
            if cv[k] > best:
                best_u, best = cand[k], cv[k]
        sups.append(float(best))
    extrap = max(sups[-2:]) if len(sups) >= 2 else sups[-1]
    return SlopeEstimate(x, radii_abs, sups, extrap, per_radius_budget, seed, fx)


# ---------------------------------------------------------------------------
# probes and the detector


def _cut_point(S: SaturatedSet, x: np.ndarray, t_max: float) -> np.ndarray | None:
    """First point where the ray from a nearest point through ``x`` stops being minimizing."""
    p = S.nearest(x)
    l0 = float(np.linalg.norm(x - p))
    if l0 <= TOL.degenerate:
        return None
    u = (x - p) / l0

    def minimizing(t):
        return S.distance(p + t * u) >= t - 1e-10 * max(1.0, t)

    lo, hi = l0, 2.0 * l0
    while minimizing(hi):
        lo, hi = hi, 2.0 * hi
        if lo > t_max:
            return None
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if minimizing(mid):
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-12 * hi:
            break
    return p + lo * u


def _probe_points(S: SaturatedSet, budget: int, ball_radius: float, fmin: float,
                  rng: np.random.Generator) -> tuple[np.ndarray, dict]:
    dim = S.dim
    n_uni = budget - budget // 2

    def ball(count):
        return _unit_rows(rng, count, dim) * (ball_radius * rng.uniform(0, 1, count) ** (1 / dim))[:, None]

    uni = np.zeros((0, dim))
    for _ in range(50):
        Y = ball(4 * budget)
        uni = np.vstack([uni, Y[S.distances(Y) > fmin]])
        if len(uni) >= n_uni:
            break
    uni = uni[:n_uni]
    if len(uni) == 0:
        return uni, {"uniform": 0, "near": 0, "cut": 0, "fixed": 0}
    scale = 2.0 * float(np.median(S.distances(uni)))
    near = np.zeros((0, dim))
    for _ in range(50):
        P = S.sample_preimage(2 * budget, rng)
        Y = P + _unit_rows(rng, len(P), dim) * rng.uniform(0, scale, len(P))[:, None]
        near = np.vstack([near, Y[S.distances(Y) > fmin]])
        if len(near) >= budget - n_uni:
            break
    near = near[: budget - n_uni]
    plain = np.vstack([near, uni])

    # structural probes: cut points of minimizing rays and projections to fixed points
    structural = []
    for x in plain[: max(1, budget // 4)]:
        c = _cut_point(S, x, 2.0 * ball_radius + S.extent())
        if c is not None and S.distance(c) > fmin:
            structural.append(c)
    n_cut = len(structural)
    V0 = S.fixed_subspace()
    # the origin is fixed by every linear action
    fixed = [np.zeros(dim)]
    if V0.dim > 0:
        fixed += list(V0.embed(V0.coords(plain[: max(1, budget // 8)])))
    for y in fixed:
        if S.distance(y) > fmin:
            structural.append(y)
    structural = structural[:budget]
    counts = {"cut": n_cut, "fixed": len(structural) - n_cut}
    rest = budget - len(structural)
    n_near_used = min(len(near), rest // 2 + rest % 2)
    chosen = np.vstack([np.array(structural).reshape(-1, dim), near[:n_near_used],
                        uni[: rest - n_near_used]])
    counts.update(near=n_near_used, uniform=len(chosen) - len(structural) - n_near_used)
    return chosen, counts


def convexity_detect(S: SaturatedSet, probe_budget: int = 200, radii=DEFAULT_RADII,
                     tol: float = 0.02, seed: int = DEFAULT_SEED, per_radius_budget: int = 32,
                     ball_radius: float | None = None, return_estimates: bool = False):
    """Sample the slope criterion at probe points outside ``S``.

    A raw slope below ``1 - tol`` is reported as a nonconvexity witness;
    otherwise the verdict is only "consistent-with-convex". With
    ``return_estimates`` the per-probe ``SlopeEstimate`` list is returned too.
    """
    rep = VerificationReport("convexity-detect")
    R = ball_radius if ball_radius is not None else 2.0 * S.extent() + 1.0
    fmin = 1e-3 * max(1.0, S.extent())
    rep.budgets.update(probes=probe_budget, per_radius=per_radius_budget, seed=seed,
                       radii=[float(r) for r in radii], ball_radius=R)
    rng = rng_for(seed, 20)
    probes, counts = _probe_points(S, probe_budget, R, fmin, rng)
    rep.details["probe_counts"] = counts
    rep.record("probes", len(probes))
    if len(probes) == 0:
        rep.verdict = "no-probe-points"
        rep.mark_unconverged(f"no point of the ball of radius {R:.3g} lies outside S")
        return (rep, []) if return_estimates else rep
    ests = [ascending_slope(S, x, radii, per_radius_budget, seed, index=i) for i, x in enumerate(probes)]
    raw = np.array([e.extrapolated for e in ests])
    j = int(np.argmin(raw))
    rep.record("min_clamped_slope", max(0.0, raw[j]))
    rep.record("max_per_radius_sup", max(max(e.per_radius_sup) for e in ests))
    rep.record("witness_distance", ests[j].f_value)
    rep.check("min_raw_slope", raw[j], ">=", 1.0 - tol)
    rep.details["witness"] = ests[j].to_json()
    rep.verdict = "consistent-with-convex" if rep.passed else "nonconvex-witness"
    return (rep, ests) if return_estimates else rep


def midpoint_convexity_oracle(S: SaturatedSet, pair_budget: int = 200, tol: float = 1e-6,
                              seed: int = DEFAULT_SEED) -> VerificationReport:
    """Look for preimage pairs whose midpoint leaves the preimage.

    Half of the pairs are independent preimage samples, half are pairs on a
    common orbit.
    """
    rep = VerificationReport("midpoint-oracle")
    rep.budgets.update(pairs=pair_budget, seed=seed)
    rng = rng_for(seed, 30)
    half = pair_budget // 2
    P = S.sample_preimage(pair_budget, rng)
    Q = S.sample_preimage(pair_budget, rng)
    gs = S.action.sample_elements(half, rng)
    Q[:half] = np.array([S.action.act(g, p) for g, p in zip(gs, P[:half])]).reshape(half, S.dim)
    mids = 0.5 * (P + Q)
    d = S.distances(mids)
    j = int(np.argmax(d))
    rep.record("max_midpoint_distance", d[j])
    rep.check("violations", int(np.sum(d > tol)), "==", 0)
    if not rep.passed:
        rep.details["certificate"] = {"P": P[j].tolist(), "Q": Q[j].tolist(),
                                      "midpoint": mids[j].tolist(), "distance": float(d[j])}
    rep.verdict = "no-violation" if rep.passed else "nonconvex-certificate"
    return rep


# ---------------------------------------------------------------------------
# basic functions


def _fiber_support(action: GroupAction, F: OrbitCloud, seed: int):
    if F.exact:
        return SupportOracle(F.points)
    return OrbitSupport(action, F.seed_point, seed=seed)


def radial_support_formula(action: GroupAction, w, v, t_grid) -> float:
    """``r * max_t (t - d(v, (t/r) G w))`` over ``t_grid``, with ``r = |w|``."""
    w = np.asarray(w, dtype=float)
    r = float(np.linalg.norm(w))
    if r <= TOL.degenerate:
        return 0.0
    vals = [t - orbit_distance(action, (t / r) * w, v) for t in np.asarray(t_grid, dtype=float)]
    return r * max(vals)


def basic_function_check(action: GroupAction, F: OrbitCloud, test_pairs: int = 100,
                         tol: float | None = None, seed: int = DEFAULT_SEED,
                         formula_tol: float = 1e-3, formula_points: int = 5) -> VerificationReport:
    """Support function of a fiber is constant on orbits; radial formula cross-check."""
    rep = VerificationReport("basic-function")
    tol = (1e-8 if F.exact else 1e-3) if tol is None else tol
    rep.budgets.update(pairs=test_pairs, seed=seed, formula_points=formula_points)
    rng = rng_for(seed, 40)
    scale = max(1.0, float(np.linalg.norm(F.seed_point)))
    V = rng.standard_normal((test_pairs, action.ambient_dim)) * scale
    gs = action.sample_elements(test_pairs, rng)
    GV = np.array([action.act(g, v) for g, v in zip(gs, V)]).reshape(V.shape)
    h = _fiber_support(action, F, seed)
    hv, _ = h.support_many(V)
    hg, _ = h.support_many(GV)
    rep.check("max_support_gap", float(np.max(np.abs(hv - hg))), "<=", tol)

    # h(F, v) = r sup_t (t - d(v, (t/r) F)), truncated where the Busemann bound meets formula_tol
    r = float(np.linalg.norm(F.seed_point))
    worst, above = 0.0, -math.inf
    for v, hval in zip(V[:formula_points], hv[:formula_points]):
        nv = float(np.linalg.norm(v))
        t_max = nv + r * nv * nv / formula_tol + 1.0
        t_grid = np.geomspace(1.0, t_max, 24)
        val = radial_support_formula(action, F.seed_point, v, t_grid)
        worst = max(worst, abs(val - hval))
        above = max(above, val - hval)
    if formula_points and r > TOL.degenerate:
        rep.check("max_formula_gap", worst, "<=", formula_tol)
        rep.check("formula_excess", above, "<=", 1e-8 * scale)
    rep.verdict = "basic" if rep.passed else "not-basic"
    return rep


def hull_invariance_check(action: GroupAction, F: OrbitCloud, test_pairs: int = 100,
                          seed: int = DEFAULT_SEED, tol: float = TOL.exact) -> VerificationReport:
    """Hull membership of ``v`` and ``g v`` agree for an invariant hull."""
    rep = VerificationReport("hull-invariance")
    rep.budgets.update(pairs=test_pairs, seed=seed)
    rng = rng_for(seed, 41)
    oracle = SupportOracle(F.points)
    scale = max(float(np.linalg.norm(F.seed_point)), 1e-3)
    V = rng.standard_normal((test_pairs, action.ambient_dim))
    V *= (scale * rng.uniform(0.0, 1.5, test_pairs) / np.linalg.norm(V, axis=1))[:, None]
    gs = action.sample_elements(test_pairs, rng)
    bad, inside = 0, 0
    for g, v in zip(gs, V):
        a = conv_membership(oracle, v, tol=tol)
        b = conv_membership(oracle, action.act(g, v), tol=tol)
        inside += a.inside
        bad += a.inside != b.inside
    rep.record("inside_count", inside)
    rep.check("disagreements", bad, "==", 0)
    rep.verdict = "hull-saturated" if rep.passed else "hull-not-saturated"
    return rep
