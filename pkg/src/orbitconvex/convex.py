"""Support functions, polars, and convex-hull oracles.

Every hull here is accessed through a support oracle: anything with
``support(u) -> (value, argmax)`` and ``support_many(U) -> (values, argmaxes)``.
Polar sets are never materialised; they exist through LPs over the source
points.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np

from .config import DEFAULT_SEED, TOL
from .geomcore import PointCloud, Subspace, dedup_rows, project
from .groups import rng_for
from .lp import maximize
from .report import VerificationReport


# ---------------------------------------------------------------------------
# support oracles


class SupportOracle:
    """Exact support function of a finite point set."""

    def __init__(self, source):
        pts = np.asarray(source.points if hasattr(source, "points") else source, dtype=float)
        pts = np.atleast_2d(pts)
        if pts.shape[0] == 0:
            raise ValueError("support of an empty cloud is undefined")
        # clouds collapsed to a point within 1e-12 behave as singletons
        if np.abs(pts - pts[0]).max() <= TOL.degenerate:
            pts = pts[:1]
        self.points = pts
        self.norms = np.linalg.norm(pts, axis=1)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def support_many(self, U) -> tuple[np.ndarray, np.ndarray]:
        U = np.atleast_2d(np.asarray(U, dtype=float))
        if U.shape[1] != self.dim:
            raise ValueError("dimension mismatch")
        vals = U @ self.points.T
        idx = vals.argmax(axis=1)
        return vals[np.arange(len(U)), idx], self.points[idx]

    def support(self, u) -> tuple[float, np.ndarray]:
        vals, pts = self.support_many(np.asarray(u, dtype=float)[None])
        return float(vals[0]), pts[0]


class OrthogonalOrbitope:
    """Convex hull of the orbit of ``X`` under O(k) (or SO(k)) acting diagonally.

    ``X`` has one row per copy of R^k. Orbit points are ``X g^T``; the hull is
    ``{X C^T : |C|_op <= 1}`` for O(k), and the support function is the
    nuclear norm of ``U^T X``.
    """

    def __init__(self, blocks, special: bool = False):
        self.X = np.atleast_2d(np.asarray(blocks, dtype=float))
        self.special = special
        self.copies, self.k = self.X.shape

    @property
    def dim(self) -> int:
        return self.copies * self.k

    def support_many(self, U) -> tuple[np.ndarray, np.ndarray]:
        U = np.atleast_2d(np.asarray(U, dtype=float)).reshape(-1, self.copies, self.k)
        M = np.swapaxes(U, 1, 2) @ self.X
        u, s, vt = np.linalg.svd(M)
        if self.special:
            neg = np.linalg.det(u @ vt) < 0
            u = u.copy()
            u[neg, :, -1] *= -1.0
            s = s.copy()
            s[neg, -1] *= -1.0
        g = u @ vt
        pts = (self.X[None] @ np.swapaxes(g, 1, 2)).reshape(len(U), -1)
        return s.sum(axis=1), pts

    def support(self, u) -> tuple[float, np.ndarray]:
        vals, pts = self.support_many(np.asarray(u, dtype=float)[None])
        return float(vals[0]), pts[0]

    def membership(self, y, tol: float = TOL.exact) -> "MembershipResult":
        """Closed-form membership through the operator norm of ``C = (X^{-1} Y)^T``."""
        y = np.asarray(y, dtype=float)
        Y = y.reshape(self.copies, self.k)
        if self.special or self.copies != self.k or np.linalg.cond(self.X) > 1e10:
            return conv_membership(self, y, tol=tol)
        Ct = np.linalg.solve(self.X, Y)
        P, s, Qt = np.linalg.svd(Ct.T)
        smax = float(s[0])
        if smax <= 1.0:
            return MembershipResult(True, 0.0, y.copy(), {"kind": "operator-norm", "sigma_max": smax},
                                    True, 0.0, 0.0, 0)
        upper = float(np.linalg.norm(y)) * (1.0 - 1.0 / smax)
        Z = np.outer(P[:, 0], Qt[0])
        U = np.linalg.solve(self.X.T, Z.T)  # <U, Y> = <Z, C>
        lower = (smax - 1.0) / float(np.linalg.norm(U))
        nearest = (self.X @ (Ct / smax)).ravel()
        inside = upper <= tol
        u = U.ravel() / np.linalg.norm(U)
        h, _ = self.support(u)
        cert = {"kind": "separator", "direction": u.tolist(), "margin": float(u @ y - h),
                "sigma_max": smax}
        return MembershipResult(inside, upper, nearest, cert, True, lower, upper, 0)


def as_oracle(obj):
    if hasattr(obj, "support_many"):
        return obj
    return SupportOracle(obj)


def support(oracle, u) -> tuple[float, np.ndarray]:
    """``h(A, u) = max_{a in A} <u, a>`` with a witness point."""
    return as_oracle(oracle).support(u)


# ---------------------------------------------------------------------------
# hull membership


@dataclass
class MembershipResult:
    inside: bool
    distance: float
    nearest: np.ndarray
    certificate: dict[str, Any]
    converged: bool = True
    lower_bound: float = 0.0
    upper_bound: float = 0.0
    iterations: int = 0

    @property
    def status(self) -> str:
        return "converged" if self.converged else "unconverged"

    def to_json(self) -> dict:
        return {
            "inside": bool(self.inside),
            "distance": float(self.distance),
            "nearest": np.asarray(self.nearest, dtype=float).tolist(),
            "certificate": self.certificate,
            "status": self.status,
            "lower_bound": float(self.lower_bound),
            "upper_bound": float(self.upper_bound),
            "iterations": int(self.iterations),
        }


def _affine_minimizer(S: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Weights ``mu`` (summing to one) minimizing ``|mu S - v|``."""
    Y = S - v
    k = len(S)
    G = Y @ Y.T
    K = np.zeros((k + 1, k + 1))
    K[:k, :k] = G
    K[:k, k] = 1.0
    K[k, :k] = 1.0
    rhs = np.zeros(k + 1)
    rhs[k] = 1.0
    sol = np.linalg.lstsq(K, rhs, rcond=None)[0]
    return sol[:k]


def conv_membership(oracle, v, tol: float = TOL.exact, max_iter: int = 1000,
                    method: str = "wolfe") -> MembershipResult:
    """Nearest point of the hull to ``v`` using only the support oracle.

    ``method="wolfe"`` adds affine corrections over the active vertices
    (finite on polytopes); ``method="gilbert"`` is the plain Frank-Wolfe
    iteration with exact line search. Both stop once the duality gap drops
    below ``tol**2``.
    """
    oracle = as_oracle(oracle)
    v = np.asarray(v, dtype=float)
    if v.shape != (oracle.dim,):
        raise ValueError("dimension mismatch")
    if method not in ("wolfe", "gilbert"):
        raise ValueError(f"unknown method {method!r}")
    _, s0 = oracle.support(v)
    S = s0[None].copy()
    lam = np.ones(1)
    scale = max(1.0, float(np.abs(s0).max()), float(np.abs(v).max()))
    gap_tol = max(tol * tol, (64 * np.finfo(float).eps * scale) ** 2 * 1e3)
    converged = False
    lower = 0.0
    it = 0
    x = s0.copy()
    for it in range(1, max_iter + 1):
        x = lam @ S
        d = v - x
        dn = float(np.linalg.norm(d))
        if dn <= 1e-3 * tol:
            converged = True
            lower = 0.0
            break
        h, s = oracle.support(d)
        gap = h - float(d @ x)
        lower = max(lower, (float(d @ v) - h) / dn)
        if gap <= gap_tol:
            converged = True
            break
        if method == "gilbert":
            sx = s - x
            denom = float(sx @ sx)
            gamma = min(1.0, max(0.0, float(d @ sx) / denom)) if denom > 0 else 0.0
            S = np.vstack([S, s])
            lam = np.append(lam * (1.0 - gamma), gamma)
            keep = lam > 0
            S, lam = S[keep], lam[keep]
            S, inv = np.unique(S, axis=0, return_inverse=True)
            lam = np.bincount(inv.ravel(), weights=lam, minlength=len(S))
            continue
        if np.min(np.linalg.norm(S - s, axis=1)) <= 1e-14 * scale:
            converged = True  # oracle returned an active vertex: optimum up to rounding
            break
        S = np.vstack([S, s])
        lam = np.append(lam, 0.0)
        for _minor in range(len(S) + 5):
            mu = _affine_minimizer(S, v)
            if np.all(mu > 1e-14):
                lam = mu
                break
            moving = (mu <= 1e-14) & (lam - mu > 0)
            theta = float(np.min(lam[moving] / (lam[moving] - mu[moving]))) if moving.any() else 0.0
            lam = lam + theta * (mu - lam)
            keep = lam > 1e-14
            S, lam = S[keep], lam[keep]
            lam = lam / lam.sum()
    x = lam @ S
    d = v - x
    dist = float(np.linalg.norm(d))
    lower = min(max(lower, 0.0), dist)
    inside = dist <= tol
    if inside:
        cert = {"kind": "convex", "weights": lam.tolist(), "points": S.tolist()}
    else:
        u = d / dist
        h, _ = oracle.support(u)
        cert = {"kind": "separator", "direction": u.tolist(), "margin": float(u @ v - h)}
    return MembershipResult(inside, dist, x, cert, converged, lower, dist, it)


# ---------------------------------------------------------------------------
# polars


@dataclass
class PolarSupport:
    status: str  # "bounded" | "unbounded"
    value: float
    argmax: np.ndarray | None = None
    ray: np.ndarray | None = None


def _cloud_points(cloud) -> np.ndarray:
    if hasattr(cloud, "points"):
        return np.atleast_2d(np.asarray(cloud.points, dtype=float))
    return np.atleast_2d(np.asarray(cloud, dtype=float))


def polar_support(cloud, u, check_origin: bool = True) -> PolarSupport:
    """``h(A°, u)``: maximize ``<u, x>`` subject to ``<a, x> <= 1`` for all ``a`` in the cloud."""
    A = _cloud_points(cloud)
    u = np.asarray(u, dtype=float)
    if u.shape != (A.shape[1],):
        raise ValueError("dimension mismatch")
    if check_origin:
        mem = conv_membership(SupportOracle(A), np.zeros(A.shape[1]))
        if not mem.inside:
            raise ValueError(f"origin is not in the hull (distance {mem.distance:.3g})")
    res = maximize(u, A, np.ones(len(A)))
    if res.status == "unbounded":
        return PolarSupport("unbounded", float("inf"), None, res.ray)
    return PolarSupport("bounded", res.value, res.x, None)


class BipolarOracle:
    """Support function of ``A°°`` from polar points, generated by cutting planes.

    The outer LP runs over a finite set of points of ``A°`` (rhs 1) and
    recession directions of ``A°`` (rhs 0). Violated cuts are found by
    solving the inner polar LP at the current optimum, so the returned value
    is exact up to the feasibility tolerance.
    """

    def __init__(self, cloud, seed: int = DEFAULT_SEED, initial_directions: int | None = None,
                 feas_tol: float = 1e-10):
        self.A = _cloud_points(cloud)
        self.feas_tol = feas_tol
        self.rows: list[np.ndarray] = []
        self.rhs: list[float] = []
        self.rounds = 0
        n = self.A.shape[1]
        rng = rng_for(seed, 11)
        m = 2 * n if initial_directions is None else initial_directions
        for w in rng.standard_normal((m, n)):
            self._add_cut_from(w)

    @property
    def dim(self) -> int:
        return self.A.shape[1]

    @property
    def polar_samples(self) -> int:
        return len(self.rows)

    def _add_cut_from(self, w) -> bool:
        """Add the polar point (or recession direction) maximizing ``<w, .>`` over ``A°``."""
        ps = polar_support(self.A, w, check_origin=False)
        if ps.status == "unbounded":
            self.rows.append(ps.ray)
            self.rhs.append(0.0)
            return True
        if ps.value <= 0:
            return False
        self.rows.append(ps.argmax)
        self.rhs.append(1.0)
        return True

    def support(self, u, max_rounds: int = 500) -> tuple[float, np.ndarray]:
        u = np.asarray(u, dtype=float)
        for _ in range(max_rounds):
            self.rounds += 1
            C = np.array(self.rows).reshape(-1, self.dim)
            res = maximize(u, C, np.array(self.rhs))
            if res.status == "unbounded":
                if not self._add_cut_from(res.ray):
                    raise RuntimeError("bipolar is unbounded: hull of the cloud is not compact")
                continue
            x = res.x
            ps = polar_support(self.A, x, check_origin=False)
            if ps.status == "unbounded":
                self.rows.append(ps.ray)
                self.rhs.append(0.0)
                continue
            if ps.value > 1.0 + self.feas_tol:
                self.rows.append(ps.argmax)
                self.rhs.append(1.0)
                continue
            return res.value, x
        raise RuntimeError("cutting-plane loop did not converge")

    def support_many(self, U) -> tuple[np.ndarray, np.ndarray]:
        out = [self.support(u) for u in np.atleast_2d(U)]
        return np.array([o[0] for o in out]), np.array([o[1] for o in out])


def bipolar_check(cloud, direction_budget: int = 200, tol: float = 1e-6,
                  seed: int = DEFAULT_SEED) -> VerificationReport:
    """Compare ``h(A°°, u)`` with ``h(conv A, u)`` along sampled directions."""
    A = _cloud_points(cloud)
    rep = VerificationReport("bipolar")
    rep.budgets.update(directions=direction_budget, seed=seed)
    origin = conv_membership(SupportOracle(A), np.zeros(A.shape[1]))
    rep.record("origin_distance", origin.distance)
    if not origin.inside:
        rep.status = "fail"
        rep.verdict = "origin-not-in-hull"
        return rep
    U = sample_directions(A.shape[1], direction_budget, seed)
    direct, _ = SupportOracle(A).support_many(U)
    bip = BipolarOracle(A, seed=seed)
    via_polar, _ = bip.support_many(U)
    gap = float(np.max(np.abs(via_polar - direct)))
    rep.check("max_support_gap", gap, "<=", tol)
    rep.record("polar_samples", bip.polar_samples)
    rep.verdict = "bipolar-identity-holds" if rep.passed else "bipolar-gap"
    return rep


def projection_polar_check(cloud, sigma: Subspace, direction_budget: int = 200,
                           tol: float = 1e-6, seed: int = DEFAULT_SEED) -> VerificationReport:
    """Compare ``h(pi_sigma A, u)`` with ``h((sigma ∩ A°)°, u)`` for unit ``u`` in ``sigma``.

    The left side is the ambient support of the cloud. The right side runs
    cutting planes over polar points constrained to ``sigma``: with
    ``x = B^T c`` (rows of ``B`` span ``sigma``) the constraints
    ``<a, x> <= 1`` become ``<B a, c> <= 1``.
    """
    A = _cloud_points(cloud)
    rep = VerificationReport("projection-polar")
    rep.budgets.update(directions=direction_budget, seed=seed)
    origin = conv_membership(SupportOracle(A), np.zeros(A.shape[1]))
    rep.record("origin_distance", origin.distance)
    if not origin.inside:
        rep.status = "fail"
        rep.verdict = "origin-not-in-hull"
        return rep
    B = sigma.basis
    C = sample_directions(sigma.dim, direction_budget, seed)
    direct, _ = SupportOracle(A).support_many(C @ B)
    bip = BipolarOracle(A @ B.T, seed=seed)
    via_polar, _ = bip.support_many(C)
    rep.check("max_support_gap", float(np.max(np.abs(via_polar - direct))), "<=", tol)
    rep.record("section_dim", sigma.dim)
    rep.verdict = "projection-polar-identity-holds" if rep.passed else "projection-polar-gap"
    return rep


# ---------------------------------------------------------------------------
# comparisons and projections


def sample_directions(dim: int, budget: int, seed: int = DEFAULT_SEED) -> np.ndarray:
    """Unit directions: axes and pairwise diagonals first, then normalised Gaussians."""
    fixed = list(np.eye(dim)) + list(-np.eye(dim))
    if dim <= 12:
        r2 = 1 / np.sqrt(2.0)
        for i in range(dim):
            for j in range(i + 1, dim):
                for si in (1, -1):
                    for sj in (1, -1):
                        e = np.zeros(dim)
                        e[i], e[j] = si * r2, sj * r2
                        fixed.append(e)
    fixed = np.array(fixed[: max(0, budget // 2)]).reshape(-1, dim)
    rest = budget - len(fixed)
    g = rng_for(seed, 7).standard_normal((rest, dim))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    return np.vstack([fixed, g])


def hull_hausdorff(a, b, direction_budget: int = 500, seed: int = DEFAULT_SEED,
                   directions: np.ndarray | None = None) -> float:
    """``max_u |h(A,u) - h(B,u)|`` over sampled unit directions."""
    oa, ob = as_oracle(a), as_oracle(b)
    if oa.dim != ob.dim:
        raise ValueError("dimension mismatch")
    U = directions if directions is not None else sample_directions(oa.dim, direction_budget, seed)
    ha, _ = oa.support_many(U)
    hb, _ = ob.support_many(U)
    return float(np.max(np.abs(ha - hb)))


def affine_dimension(cloud, rel_tol: float = 1e-9) -> int:
    """Rank of the centred point matrix (singular values above ``rel_tol * max``)."""
    P = _cloud_points(cloud)
    if len(P) == 0:
        raise ValueError("affine dimension of an empty cloud")
    if len(P) == 1:
        return 0
    C = P - P.mean(axis=0)
    s = np.linalg.svd(C, compute_uv=False)
    if s[0] <= TOL.degenerate:
        return 0
    return int(np.sum(s > rel_tol * s[0]))


def project_cloud(sigma: Subspace, cloud, dedup: bool = True) -> PointCloud:
    """Pointwise orthogonal projection onto ``sigma`` (ambient coordinates)."""
    P = project(sigma, _cloud_points(cloud))
    if dedup:
        P = dedup_rows(P, tol=1e-12)
    label = getattr(cloud, "label", "")
    return PointCloud(P, label=f"proj({label})" if label else "projection")
