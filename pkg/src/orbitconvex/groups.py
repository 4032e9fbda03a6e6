"""Orthogonal group actions and orbit machinery.

Finite groups are enumerated exactly; compact groups O(n) and SO(n) are
Haar-sampled and, where a minimum or maximum over the group is needed,
refined by a Newton-type ascent on the group.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .config import DEFAULT_SEED, TOL
from .geomcore import PointCloud, Subspace, as_point, dedup_rows, null_space, project
from .report import VerificationReport

logger = logging.getLogger(__name__)

CONTINUOUS_FAMILIES = ("O", "SO")
FINITE_FAMILIES = ("S", "dihedral")

_REP_ALIASES = {
    "standard": "standard",
    "diagonal": "diagonal",
    "diagonal-k-copies": "diagonal",
    "conjugation": "conjugation",
    "conjugation-symmetric": "conjugation",
    "conjugation-on-symmetric-matrices": "conjugation",
    "permutation": "standard",
    "permutation-of-coordinates": "standard",
}


class GroupOrderOverflow(ValueError):
    pass


def rng_for(seed: int, *stream: int) -> np.random.Generator:
    """Independent generator keyed by ``(seed, *stream)``."""
    return np.random.default_rng([int(seed) & 0xFFFFFFFFFFFFFFFF, *map(int, stream)])


# ---------------------------------------------------------------------------
# finite groups


@dataclass(frozen=True, eq=False)
class FiniteOrthogonalGroup:
    dim: int
    generators: np.ndarray
    elements: np.ndarray
    max_order: int
    name: str = ""

    @property
    def order(self) -> int:
        return len(self.elements)


def _check_orthogonal(mats: np.ndarray, tol: float = TOL.group_orthogonal):
    mats = np.asarray(mats, dtype=float)
    n = mats.shape[-1]
    err = np.abs(np.swapaxes(mats, -1, -2) @ mats - np.eye(n)).max(initial=0.0)
    if err >= tol:
        raise ValueError(f"matrix is not orthogonal (|M^T M - I| = {err:.3g})")


def enumerate_group(generators, max_order: int = 10_000, dedup_tol: float = 1e-8,
                    name: str = "") -> FiniteOrthogonalGroup:
    """Close ``generators`` under multiplication.

    Matrices within ``dedup_tol`` (Frobenius) are identified; a rounded-key
    hash narrows the comparison to a handful of candidates.
    """
    gens = np.asarray(generators, dtype=float)
    if gens.ndim == 2:
        gens = gens[None]
    _check_orthogonal(gens)
    n = gens.shape[-1]
    scale = 1e-6

    def key(m):
        return tuple(np.round(m.ravel() / scale).astype(np.int64))

    buckets: dict[tuple, list[int]] = {}
    elements: list[np.ndarray] = []

    def add(m) -> bool:
        k = key(m)
        for j in buckets.get(k, ()):
            if np.linalg.norm(elements[j] - m) <= dedup_tol:
                return False
        # neighbouring keys can hold the same matrix when rounding straddles
        for j in range(len(elements)) if len(elements) < 64 else ():
            if np.linalg.norm(elements[j] - m) <= dedup_tol:
                return False
        buckets.setdefault(k, []).append(len(elements))
        elements.append(m)
        return True

    add(np.eye(n))
    frontier = [0]
    while frontier:
        nxt = []
        for i in frontier:
            for g in gens:
                m = g @ elements[i]
                if add(m):
                    if len(elements) > max_order:
                        raise GroupOrderOverflow(
                            f"group order exceeds max_order={max_order}"
                        )
                    nxt.append(len(elements) - 1)
        frontier = nxt
    return FiniteOrthogonalGroup(n, gens, np.asarray(elements), max_order, name)


def rotation2(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def cyclic_group(m: int) -> FiniteOrthogonalGroup:
    return enumerate_group([rotation2(2 * math.pi / m)], name=f"C{m}")


def dihedral_group(m: int) -> FiniteOrthogonalGroup:
    """Symmetries of the regular m-gon; order 2m."""
    refl = np.array([[1.0, 0.0], [0.0, -1.0]])
    return enumerate_group([rotation2(2 * math.pi / m), refl], name=f"D{m}")


def sign_group(n: int) -> FiniteOrthogonalGroup:
    return enumerate_group([-np.eye(n)], name=f"pm{n}")


def permutation_matrix(perm: Sequence[int]) -> np.ndarray:
    n = len(perm)
    p = np.zeros((n, n))
    p[list(perm), np.arange(n)] = 1.0  # sends e_j to e_perm[j]
    return p


def symmetric_group(n: int) -> FiniteOrthogonalGroup:
    if n == 1:
        return enumerate_group([np.eye(1)], name="S1")
    gens = [permutation_matrix([1, 0] + list(range(2, n))),
            permutation_matrix(list(range(1, n)) + [0])]
    return enumerate_group(gens, max_order=math.factorial(n), name=f"S{n}")


# ---------------------------------------------------------------------------
# compact groups


def haar_orthogonal(n: int, count: int, rng: np.random.Generator, special: bool = False) -> np.ndarray:
    """Haar samples from O(n) (or SO(n)) by sign-corrected QR of Gaussian matrices."""
    z = rng.standard_normal((count, n, n))
    q, r = np.linalg.qr(z)
    d = np.sign(np.diagonal(r, axis1=1, axis2=2))
    d[d == 0] = 1.0
    q = q * d[:, None, :]
    if special:
        neg = np.linalg.det(q) < 0
        q[neg, :, 0] *= -1.0
    return q


@dataclass(frozen=True, eq=False)
class CompactGroupSampler:
    family: str
    n: int
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        if self.family not in CONTINUOUS_FAMILIES + FINITE_FAMILIES:
            raise ValueError(f"unknown group family {self.family!r}")
        if self.n < 1:
            raise ValueError("n must be positive")

    @property
    def dim(self) -> int:
        """Dimension of the defining representation."""
        return 2 if self.family == "dihedral" else self.n

    @property
    def is_finite(self) -> bool:
        return self.family in FINITE_FAMILIES

    @cached_property
    def finite(self) -> FiniteOrthogonalGroup:
        if self.family == "S":
            return symmetric_group(self.n)
        if self.family == "dihedral":
            return dihedral_group(self.n)
        raise ValueError(f"{self.family}({self.n}) is not finite")

    def sample(self, count: int, rng: np.random.Generator | None = None) -> np.ndarray:
        rng = rng if rng is not None else rng_for(self.seed)
        if self.family in CONTINUOUS_FAMILIES:
            return haar_orthogonal(self.n, count, rng, special=self.family == "SO")
        els = self.finite.elements
        return els[rng.integers(0, len(els), size=count)]


def so_basis(n: int) -> np.ndarray:
    """Basis E_ij = e_i e_j^T - e_j e_i^T (i < j) of the skew-symmetric matrices."""
    out = []
    for i, j in itertools.combinations(range(n), 2):
        e = np.zeros((n, n))
        e[i, j], e[j, i] = 1.0, -1.0
        out.append(e)
    return np.asarray(out).reshape(-1, n, n)


# ---------------------------------------------------------------------------
# symmetric matrices with the Frobenius inner product


def svec(a: np.ndarray) -> np.ndarray:
    """Symmetric matrix (or stack) to R^{n(n+1)/2}: diagonal first, then sqrt(2)*upper."""
    a = np.asarray(a, dtype=float)
    n = a.shape[-1]
    iu = np.triu_indices(n, 1)
    return np.concatenate([np.diagonal(a, axis1=-2, axis2=-1), math.sqrt(2) * a[..., iu[0], iu[1]]], axis=-1)


def smat(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    d = x.shape[-1]
    n = int(round((math.sqrt(8 * d + 1) - 1) / 2))
    if n * (n + 1) // 2 != d:
        raise ValueError(f"{d} is not a triangular number")
    out = np.zeros(x.shape[:-1] + (n, n))
    idx = np.arange(n)
    out[..., idx, idx] = x[..., :n]
    iu = np.triu_indices(n, 1)
    off = x[..., n:] / math.sqrt(2)
    out[..., iu[0], iu[1]] = off
    out[..., iu[1], iu[0]] = off
    return out


# ---------------------------------------------------------------------------
# actions


@dataclass(frozen=True, eq=False)
class GroupAction:
    group: FiniteOrthogonalGroup | CompactGroupSampler
    rep: str = "standard"
    copies: int = 1

    def __post_init__(self):
        rep = _REP_ALIASES.get(self.rep)
        if rep is None:
            raise ValueError(f"unknown representation {self.rep!r}")
        object.__setattr__(self, "rep", rep)
        if rep != "diagonal" and self.copies != 1:
            raise ValueError("copies > 1 requires the diagonal representation")
        if self.copies < 1:
            raise ValueError("copies must be positive")

    # -- basic shape -------------------------------------------------------
    @property
    def n(self) -> int:
        return self.group.dim

    @property
    def ambient_dim(self) -> int:
        n = self.n
        if self.rep == "diagonal":
            return n * self.copies
        if self.rep == "conjugation":
            return n * (n + 1) // 2
        return n

    @property
    def family(self) -> str:
        return self.group.family if isinstance(self.group, CompactGroupSampler) else "finite"

    @property
    def is_exact(self) -> bool:
        return isinstance(self.group, FiniteOrthogonalGroup) or self.group.is_finite

    @property
    def finite_group(self) -> FiniteOrthogonalGroup:
        if isinstance(self.group, FiniteOrthogonalGroup):
            return self.group
        return self.group.finite

    @property
    def seed(self) -> int:
        return getattr(self.group, "seed", DEFAULT_SEED)

    def describe(self) -> dict:
        if isinstance(self.group, CompactGroupSampler):
            d = {"family": self.group.family, "n": self.group.n}
        else:
            d = {"family": "finite", "name": self.group.name, "order": self.group.order,
                 "generators": self.group.generators.tolist()}
        d["rep"] = self.rep
        if self.rep == "diagonal":
            d["copies"] = self.copies
        return d

    # -- applying group elements --------------------------------------------
    def act(self, gs: np.ndarray, v) -> np.ndarray:
        """Images ``rho(g) v`` for a stack of group matrices ``gs`` (shape (m, n, n))."""
        gs = np.asarray(gs, dtype=float)
        single = gs.ndim == 2
        if single:
            gs = gs[None]
        v = np.asarray(v, dtype=float)
        if v.shape[-1] != self.ambient_dim:
            raise ValueError(f"dimension mismatch: expected {self.ambient_dim}, got {v.shape[-1]}")
        if self.rep == "standard":
            out = gs @ v
        elif self.rep == "diagonal":
            blocks = v.reshape(self.copies, self.n)
            out = (blocks @ np.swapaxes(gs, 1, 2)).reshape(len(gs), -1)
        else:
            a = smat(v)
            out = svec(gs @ a @ np.swapaxes(gs, 1, 2))
        return out[0] if single else out

    def act_many(self, g: np.ndarray, points: np.ndarray) -> np.ndarray:
        """One group element applied to each row of ``points``."""
        return np.asarray(points, dtype=float) @ self.rep_matrix(g).T

    def rep_matrix(self, g: np.ndarray) -> np.ndarray:
        return self.rep_matrices(np.asarray(g)[None])[0]

    def rep_matrices(self, gs: np.ndarray) -> np.ndarray:
        d = self.ambient_dim
        cols = [self.act(gs, e) for e in np.eye(d)]
        return np.stack(cols, axis=-1)

    def lie_matrices(self) -> np.ndarray:
        """Derived representation of the so(n) basis, as (p, D, D) ambient matrices."""
        basis = so_basis(self.n)
        d = self.ambient_dim
        out = np.zeros((len(basis), d, d))
        for i, e in enumerate(basis):
            if self.rep == "standard":
                out[i] = e
            elif self.rep == "diagonal":
                out[i] = np.kron(np.eye(self.copies), e)
            else:
                for j, col in enumerate(np.eye(d)):
                    a = smat(col)
                    out[i][:, j] = svec(e @ a - a @ e)
        return out

    def elements(self) -> np.ndarray:
        return self.finite_group.elements

    def generators(self) -> np.ndarray:
        return self.finite_group.generators

    def sample_elements(self, count: int, rng: np.random.Generator) -> np.ndarray:
        if isinstance(self.group, FiniteOrthogonalGroup):
            els = self.group.elements
            return els[rng.integers(0, len(els), size=count)]
        return self.group.sample(count, rng)

    def to_config(self) -> dict:
        return self.describe()


def make_action(family: str, n: int, rep: str = "standard", copies: int = 1,
                seed: int = DEFAULT_SEED) -> GroupAction:
    """Build an action from a descriptor; finite families are enumerated exactly."""
    if family in ("O", "SO", "S", "dihedral"):
        grp: FiniteOrthogonalGroup | CompactGroupSampler = CompactGroupSampler(family, n, seed)
        if family == "O" and n == 1:
            grp = sign_group(1)
    elif family == "cyclic":
        grp = cyclic_group(n)
    elif family == "sign":
        grp = sign_group(n)
    else:
        raise ValueError(f"unknown group family {family!r}")
    return GroupAction(grp, rep=rep, copies=copies)


# ---------------------------------------------------------------------------
# orbits


@dataclass(eq=False)
class OrbitCloud:
    base: PointCloud
    action: GroupAction
    seed_point: np.ndarray
    exact: bool

    @property
    def points(self) -> np.ndarray:
        return self.base.points

    def to_json(self) -> dict:
        d = self.base.to_json()
        d["meta"] = dict(d["meta"], action=self.action.describe(), exact=self.exact,
                         seed_point=self.seed_point.tolist())
        return d


def orbit(action: GroupAction, v, budget: int = 1000, seed: int = DEFAULT_SEED) -> OrbitCloud:
    """Exact orbit for finite groups, ``budget`` Haar images otherwise."""
    if budget <= 0:
        raise ValueError("budget must be positive")
    v = as_point(v, action.ambient_dim)
    meta = {"seed": int(seed), "budget": int(budget)}
    if np.linalg.norm(v) <= TOL.degenerate:
        pts = np.zeros((1, action.ambient_dim))
        return OrbitCloud(PointCloud(pts, label="orbit", meta=meta), action, v, True)
    if action.is_exact:
        pts = dedup_rows(action.act(action.elements(), v))
        return OrbitCloud(PointCloud(pts, label="orbit", meta=meta), action, v, True)
    gs = action.group.sample(budget, rng_for(seed, 1))
    pts = action.act(gs, v)
    return OrbitCloud(PointCloud(pts, label="orbit", meta=meta), action, v, False)


# ---------------------------------------------------------------------------
# optimisation over the group


def _polar_factor(m: np.ndarray, special: bool) -> np.ndarray:
    """Orthogonal (or special orthogonal) maximizer of <g, m> for a stack of matrices."""
    u, s, vt = np.linalg.svd(m)
    g = u @ vt
    if special:
        neg = np.linalg.det(g) < 0
        if np.any(neg):
            u = u.copy()
            u[neg, :, -1] *= -1.0
            g = u @ vt
    return g


def _cayley(A: np.ndarray) -> np.ndarray:
    """Cayley retraction ``(I - A/2)^{-1} (I + A/2)``: orthogonal with det 1 for skew ``A``."""
    eye = np.eye(A.shape[-1])
    return np.linalg.solve(eye - 0.5 * A, eye + 0.5 * A)


def maximize_pairing(action: GroupAction, v, targets, budget: int = 2000, refine_budget: int = 4,
                     seed: int = DEFAULT_SEED, max_iter: int = 100, gtol: float = 1e-11):
    """Maximize ``<w, rho(g) v>`` over the group for each target ``w``.

    Best-of-``budget`` Haar samples, followed by a shifted Newton ascent
    (Cayley-retracted, Armijo backtracking) restarted from the
    ``refine_budget`` best samples. Returns ``(values, points)`` where
    ``points[j] = rho(g_j) v`` attains ``values[j]``.
    """
    v = np.asarray(v, dtype=float)
    W = np.atleast_2d(np.asarray(targets, dtype=float))
    T = len(W)
    if action.is_exact:
        pts = action.act(action.elements(), v)
        vals = W @ pts.T
        idx = vals.argmax(axis=1)
        return vals[np.arange(T), idx], pts[idx]
    gs = action.group.sample(budget, rng_for(seed, 2))
    pts = action.act(gs, v)
    vals = W @ pts.T
    R = max(1, min(refine_budget, budget))
    top = np.argsort(-vals, axis=1, kind="stable")[:, :R]
    owner = np.repeat(np.arange(T), R)
    g = gs[top.ravel()].copy()
    Wr = W[owner]
    lie = action.lie_matrices()
    basis = so_basis(action.n)
    x = action.act(g, v)
    f = np.einsum("bd,bd->b", Wr, x)
    scale = np.linalg.norm(Wr, axis=1) * np.linalg.norm(v) + 1e-300
    eye = np.eye(len(basis))
    active = np.ones(len(g), dtype=bool)
    for _ in range(max_iter):
        if not active.any():
            break
        ia = np.flatnonzero(active)
        # gradient and Hessian of t -> <w, rho(exp(t A) g) v> in so(n) coordinates
        Lx = np.einsum("pde,be->bpd", lie, x[ia])
        Lw = np.einsum("pde,be->bpd", lie, Wr[ia])
        grad = np.einsum("bpd,bd->bp", Lx, Wr[ia])
        gn = np.linalg.norm(grad, axis=1)
        done = gn <= gtol * scale[ia]
        active[ia[done]] = False
        keep = ~done
        ia, grad, Lx, Lw = ia[keep], grad[keep], Lx[keep], Lw[keep]
        if ia.size == 0:
            break
        H = -np.einsum("bpd,bqd->bpq", Lw, Lx)
        H = 0.5 * (H + np.swapaxes(H, 1, 2))
        top = np.linalg.eigvalsh(H)[:, -1]
        # shift so the model is concave; near a maximum this is a plain Newton step
        mu = np.maximum(top, 0.0) + 1e-8 * scale[ia]
        d = np.linalg.solve(mu[:, None, None] * eye - H, grad[:, :, None])[:, :, 0]
        slope = np.einsum("bp,bp->b", grad, d)
        A = np.einsum("bp,pij->bij", d, basis)
        t = np.ones(len(ia))
        accepted = np.zeros(len(ia), dtype=bool)
        g_acc, x_acc, f_acc = g[ia].copy(), x[ia].copy(), f[ia].copy()
        for _ls in range(50):
            pending = ~accepted
            if not pending.any():
                break
            g_new = _cayley(t[pending, None, None] * A[pending]) @ g[ia[pending]]
            x_new = action.act(g_new, v).reshape(int(pending.sum()), -1)
            f_new = np.einsum("bd,bd->b", Wr[ia[pending]], x_new)
            ok = f_new >= f[ia[pending]] + 1e-4 * t[pending] * slope[pending]
            sel = np.flatnonzero(pending)[ok]
            g_acc[sel], x_acc[sel], f_acc[sel] = g_new[ok], x_new[ok], f_new[ok]
            accepted[sel] = True
            t[pending & ~accepted] *= 0.5
        stuck = ~accepted | (f_acc - f[ia] <= 1e-15 * scale[ia])
        g[ia], x[ia], f[ia] = g_acc, x_acc, np.maximum(f_acc, f[ia])
        active[ia[stuck]] = False
    # the Haar samples themselves remain candidates
    best_sample = vals.max(axis=1)
    best_sample_idx = vals.argmax(axis=1)
    fr = f.reshape(T, R)
    jr = fr.argmax(axis=1)
    refined = fr[np.arange(T), jr]
    xr = x.reshape(T, R, -1)[np.arange(T), jr]
    use_sample = best_sample > refined
    out_pts = np.where(use_sample[:, None], pts[best_sample_idx], xr)
    out_vals = np.where(use_sample, best_sample, refined)
    return out_vals, out_pts


def _nearest_exact(action: GroupAction, v: np.ndarray, w: np.ndarray) -> np.ndarray | None:
    """Closed-form nearest point of the orbit of ``v`` to ``w``, when one is known."""
    fam = action.family
    if fam == "S" and action.rep == "standard":
        out = np.empty_like(v)
        out[np.argsort(w, kind="stable")] = np.sort(v)
        return out
    if action.is_exact:
        pts = action.act(action.elements(), v)
        return pts[np.argmin(np.linalg.norm(pts - w, axis=1))]
    if fam not in CONTINUOUS_FAMILIES:
        return None
    n = action.n
    special = fam == "SO"
    if action.rep == "standard":
        if special and n == 1:
            return v.copy()
        nw = np.linalg.norm(w)
        if nw <= TOL.degenerate:
            return v.copy()
        return np.linalg.norm(v) * w / nw
    if action.rep == "diagonal":
        V = v.reshape(action.copies, n)
        W = w.reshape(action.copies, n)
        g = _polar_factor((W.T @ V)[None], special)[0]
        return (V @ g.T).ravel()
    # conjugation: align eigenvalues with the eigenbasis of w
    lv = np.linalg.eigvalsh(smat(v))
    lw, qw = np.linalg.eigh(smat(w))
    return svec(qw @ np.diag(np.sort(lv)) @ qw.T)


def nearest_orbit_point(action: GroupAction, v, w, method: str = "auto", budget: int = 2000,
                        refine_budget: int = 4, seed: int = DEFAULT_SEED) -> np.ndarray:
    """Point of the orbit of ``v`` closest to ``w``."""
    v = as_point(v, action.ambient_dim)
    w = as_point(w, action.ambient_dim)
    if method not in ("auto", "exact", "sampled"):
        raise ValueError(f"unknown method {method!r}")
    if method != "sampled" or action.is_exact:
        p = _nearest_exact(action, v, w)
        if p is not None:
            return p
        if method == "exact":
            raise ValueError("no exact orbit-distance route for this action")
    _, pts = maximize_pairing(action, v, w[None], budget=budget, refine_budget=refine_budget, seed=seed)
    return pts[0]


def orbit_distance(action: GroupAction, v, w, refine_budget: int = 4, seed: int = DEFAULT_SEED,
                   method: str = "auto", budget: int = 2000) -> float:
    """Quotient distance ``min_g |g v - w|``.

    ``method="auto"`` uses enumeration for finite groups, sorting for
    coordinate permutations, and closed forms (norms, Procrustes, sorted
    eigenvalues) for O(n)/SO(n); ``"sampled"`` forces Haar sampling plus
    refinement for compact groups.
    """
    v = as_point(v, action.ambient_dim)
    w = as_point(w, action.ambient_dim)
    p = nearest_orbit_point(action, v, w, method, budget, refine_budget, seed)
    d = float(np.linalg.norm(p - w))
    return max(d, abs(float(np.linalg.norm(v) - np.linalg.norm(w))))


def orbit_distances(action: GroupAction, points, w) -> np.ndarray:
    """Quotient distances from each row of ``points`` to ``w`` (exact routes only)."""
    P = np.atleast_2d(np.asarray(points, dtype=float))
    w = np.asarray(w, dtype=float)
    fam = action.family
    n = action.n
    if fam == "S" and action.rep == "standard":
        return np.linalg.norm(np.sort(P, axis=1) - np.sort(w)[None], axis=1)
    if action.is_exact:
        ow = action.act(action.elements(), w)
        d = np.linalg.norm(P[:, None, :] - ow[None, :, :], axis=2)
        return d.min(axis=1)
    if fam in CONTINUOUS_FAMILIES:
        special = fam == "SO"
        if action.rep == "standard" and not (special and n == 1):
            return np.abs(np.linalg.norm(P, axis=1) - np.linalg.norm(w))
        if action.rep == "diagonal":
            V = P.reshape(len(P), action.copies, n)
            W = w.reshape(action.copies, n)
            M = np.einsum("ki,bkj->bij", W, V)
            g = _polar_factor(M, special)
            best = np.einsum("bij,bij->b", g, M)
            d2 = (V**2).sum(axis=(1, 2)) + (W**2).sum() - 2 * best
            return np.sqrt(np.maximum(d2, 0.0))
        if action.rep == "conjugation":
            lp = np.linalg.eigvalsh(smat(P))
            lw = np.linalg.eigvalsh(smat(w))
            return np.linalg.norm(lp - lw[None], axis=1)
    return np.array([orbit_distance(action, p, w) for p in P])


class OrbitSupport:
    """Support function of a whole orbit ``G v``, not just of a sample of it.

    Finite groups are handled by enumeration. For compact groups each query
    starts from the best Haar sample and is refined by ascent on the group,
    so values approach ``max_g <u, rho(g) v>`` from below.
    """

    def __init__(self, action: GroupAction, v, budget: int = 2000, refine_budget: int = 4,
                 seed: int = DEFAULT_SEED):
        self.action = action
        self.v = as_point(v, action.ambient_dim)
        self.budget = budget
        self.refine_budget = refine_budget
        self.seed = seed

    @property
    def dim(self) -> int:
        return self.action.ambient_dim

    def support_many(self, U) -> tuple[np.ndarray, np.ndarray]:
        U = np.atleast_2d(np.asarray(U, dtype=float))
        return maximize_pairing(self.action, self.v, U, self.budget, self.refine_budget, self.seed)

    def support(self, u) -> tuple[float, np.ndarray]:
        vals, pts = self.support_many(np.asarray(u, dtype=float)[None])
        return float(vals[0]), pts[0]


# ---------------------------------------------------------------------------
# fixed points, homothety, slices


def fixed_point_subspace(action: GroupAction, sample_budget: int = 10,
                         seed: int = DEFAULT_SEED) -> Subspace:
    """Common fixed vectors: null space of the stacked ``rho(g) - I``."""
    d = action.ambient_dim
    if action.is_exact:
        gs = action.generators()
    else:
        gs = action.group.sample(max(1, sample_budget), rng_for(seed, 3))
    mats = action.rep_matrices(gs) - np.eye(d)[None]
    return null_space(mats.reshape(-1, d), TOL.fixed_singular_value)


def homothety_check(action: GroupAction, v, w, lambdas: Sequence[float], tol: float = 1e-8,
                    seed: int = DEFAULT_SEED) -> VerificationReport:
    """Same-fiber pairs stay in a common fiber after scaling by every ``lambda >= 0``."""
    rep = VerificationReport("homothety")
    rep.budgets["lambdas"] = [float(x) for x in lambdas]
    d0 = orbit_distance(action, v, w, seed=seed)
    rep.record("base_distance", d0)
    if d0 >= tol:
        rep.status = "fail"
        rep.verdict = "not-same-fiber"
        rep.notes.append(f"orbit distance {d0:.3g} >= tol {tol:.3g}")
        return rep
    v = np.asarray(v, dtype=float)
    w = np.asarray(w, dtype=float)
    worst, worst_excess = 0.0, -math.inf
    for lam in lambdas:
        if lam < 0:
            raise ValueError("lambdas must be non-negative")
        d = orbit_distance(action, lam * v, lam * w, seed=seed)
        worst = max(worst, d)
        worst_excess = max(worst_excess, d - (lam * tol + tol))
    rep.check("max_scaled_distance_excess", worst_excess, "<", 0.0)
    rep.record("max_scaled_distance", worst)
    rep.verdict = "homothety-holds" if rep.passed else "homothety-violated"
    return rep


def diagonal_section(n: int) -> Subspace:
    """Diagonal matrices inside the svec coordinates of symmetric n x n matrices."""
    return Subspace.coordinate(n * (n + 1) // 2, range(n))


def block_section(n: int, k: int, copies: int | None = None) -> Subspace:
    """(R^k)^copies inside (R^n)^copies: first k coordinates of each copy."""
    copies = k if copies is None else copies
    idx = [j * n + i for j in range(copies) for i in range(k)]
    return Subspace.coordinate(n * copies, idx)


def section_slice(orb: OrbitCloud, sigma: Subspace, slice_tol: float | None = None,
                  budget: int = 2000, seed: int = DEFAULT_SEED) -> PointCloud:
    """``F cap Sigma`` for the orbit ``F``.

    Exact for conjugation orbits against the diagonal section (eigenvalue
    permutations), for finite groups, and for spheres meeting a line. Block
    sections of diagonal O(n) actions are sampled through the reduced O(k)
    action; anything else falls back to filtering the orbit samples.
    """
    action = orb.action
    v = orb.seed_point
    if sigma.ambient_dim != action.ambient_dim:
        raise ValueError("dimension mismatch between orbit and subspace")
    rv = float(np.linalg.norm(v))
    label = "slice"
    if rv <= TOL.degenerate:
        return PointCloud(project(sigma, np.zeros((1, sigma.ambient_dim))), label=label,
                          meta={"method": "origin"})
    fam = action.family
    if action.rep == "conjugation" and sigma.same_as(diagonal_section(action.n)):
        lam = np.linalg.eigvalsh(smat(v))
        perms = dedup_rows(np.array(list(itertools.permutations(lam))))
        pts = np.hstack([perms, np.zeros((len(perms), sigma.ambient_dim - action.n))])
        return PointCloud(pts, label=label, meta={"method": "weyl-permutations"})
    if fam in CONTINUOUS_FAMILIES and action.rep == "standard":
        if sigma.dim == 0:
            return PointCloud.empty_cloud(sigma.ambient_dim, label, min_distance=rv)
        if sigma.dim == 1:
            b = sigma.basis[0]
            if fam == "SO" and action.n == 1:
                pts = project(sigma, v[None])
                if np.linalg.norm(pts - v) > TOL.exact:
                    return PointCloud.empty_cloud(sigma.ambient_dim, label,
                                                  min_distance=float(np.linalg.norm(pts - v)))
                return PointCloud(pts, label=label, meta={"method": "trivial"})
            return PointCloud(np.array([rv * b, -rv * b]), label=label, meta={"method": "sphere-line"})
        pr = project(sigma, orb.points)
        norms = np.linalg.norm(pr, axis=1)
        keep = norms > TOL.degenerate
        pts = rv * pr[keep] / norms[keep, None]
        return PointCloud(pts, label=label, meta={"method": "sphere-section-samples"})
    if (fam in CONTINUOUS_FAMILIES and action.rep == "diagonal"):
        n, c = action.n, action.copies
        for k in range(1, n + 1):
            if sigma.same_as(block_section(n, k, c)):
                if sigma.distance(v) > TOL.exact:
                    break
                red = make_action("O" if fam == "O" or k < n else fam, k, "diagonal", copies=c,
                                  seed=seed)
                vr = sigma.coords(v)
                ro = orbit(red, vr, budget=budget, seed=seed)
                pts = sigma.embed(ro.points)
                return PointCloud(pts, label=label, meta={"method": "reduced-action-samples",
                                                          "reduced_exact": ro.exact})
    dist = sigma.distance(orb.points)
    tol = slice_tol if slice_tol is not None else (TOL.exact if orb.exact else 1e-6 * rv)
    keep = dist < tol
    if not keep.any():
        return PointCloud.empty_cloud(sigma.ambient_dim, label, min_distance=float(dist.min()))
    pts = dedup_rows(project(sigma, orb.points[keep]))
    return PointCloud(pts, label=label, meta={"method": "filter", "slice_tol": tol})
