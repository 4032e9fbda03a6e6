"""Euclidean primitives: points, subspaces, point clouds and projections.

Points are plain read-only 1-D float arrays; clouds are ``(m, n)`` arrays
wrapped with a label and metadata.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

import numpy as np

from .config import TOL


def as_point(coords, dim: int | None = None) -> np.ndarray:
    """Validate ``coords`` and return an immutable float vector."""
    p = np.array(coords, dtype=float).reshape(-1)
    if p.size == 0:
        raise ValueError("a point needs at least one coordinate")
    if dim is not None and p.size != dim:
        raise ValueError(f"dimension mismatch: expected {dim}, got {p.size}")
    if not np.all(np.isfinite(p)):
        raise ValueError("point has non-finite coordinates")
    p.setflags(write=False)
    return p


def point_to_json(p) -> dict:
    p = np.asarray(p, dtype=float)
    return {"dim": int(p.size), "coords": [float(x) for x in p]}


def point_from_json(obj: dict) -> np.ndarray:
    return as_point(obj["coords"], dim=int(obj["dim"]))


@dataclass(frozen=True, eq=False)
class Subspace:
    """Linear subspace given by an orthonormal basis (rows of ``basis``)."""

    ambient_dim: int
    basis: np.ndarray

    def __post_init__(self):
        b = np.array(self.basis, dtype=float).reshape(-1, self.ambient_dim)
        gram = b @ b.T
        if b.shape[0] > self.ambient_dim:
            raise ValueError("more basis vectors than ambient dimensions")
        if np.abs(gram - np.eye(b.shape[0])).max(initial=0.0) > TOL.orthonormal:
            raise ValueError("basis is not orthonormal")
        b.setflags(write=False)
        object.__setattr__(self, "basis", b)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def projector(self) -> np.ndarray:
        return self.basis.T @ self.basis

    @classmethod
    def full(cls, n: int) -> "Subspace":
        return cls(n, np.eye(n))

    @classmethod
    def zero(cls, n: int) -> "Subspace":
        return cls(n, np.zeros((0, n)))

    @classmethod
    def coordinate(cls, n: int, indices: Sequence[int]) -> "Subspace":
        return cls(n, np.eye(n)[list(indices)])

    def coords(self, v) -> np.ndarray:
        """Coordinates of the projection of ``v`` (or rows of ``v``) in the basis."""
        return np.asarray(v, dtype=float) @ self.basis.T

    def embed(self, c) -> np.ndarray:
        return np.asarray(c, dtype=float) @ self.basis

    def distance(self, v) -> np.ndarray | float:
        v = np.asarray(v, dtype=float)
        return np.linalg.norm(v - project(self, v), axis=-1)

    def contains(self, v, tol: float = TOL.exact) -> bool:
        return bool(np.all(self.distance(v) <= tol))

    def orthogonal_complement(self) -> "Subspace":
        if self.dim == 0:
            return Subspace.full(self.ambient_dim)
        _, s, vt = np.linalg.svd(self.basis, full_matrices=True)
        return Subspace(self.ambient_dim, vt[self.dim:])

    def intersect(self, other: "Subspace", tol: float = 1e-8) -> "Subspace":
        """Intersection via the null space of the stacked complement projectors."""
        n = self.ambient_dim
        if other.ambient_dim != n:
            raise ValueError("dimension mismatch")
        m = np.vstack([np.eye(n) - self.projector, np.eye(n) - other.projector])
        return null_space(m, tol)

    def same_as(self, other: "Subspace", tol: float = 1e-9) -> bool:
        return (
            self.ambient_dim == other.ambient_dim
            and self.dim == other.dim
            and np.abs(self.projector - other.projector).max(initial=0.0) <= tol
        )

    def to_json(self) -> dict:
        return {"ambient_dim": self.ambient_dim, "basis": self.basis.tolist()}

    @classmethod
    def from_json(cls, obj: dict) -> "Subspace":
        n = int(obj["ambient_dim"])
        return cls(n, np.array(obj["basis"], dtype=float).reshape(-1, n))


@dataclass(eq=False)
class PointCloud:
    points: np.ndarray
    label: str = ""
    empty: bool = False
    meta: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts.reshape(1, -1) if pts.size else pts.reshape(0, 0)
        if pts.shape[0] == 0 and not self.empty:
            raise ValueError("empty point cloud must be flagged with empty=True")
        if pts.size and not np.all(np.isfinite(pts)):
            raise ValueError("point cloud has non-finite coordinates")
        pts.setflags(write=False)
        self.points = pts

    @classmethod
    def empty_cloud(cls, dim: int, label: str = "", **meta) -> "PointCloud":
        return cls(np.zeros((0, dim)), label=label, empty=True, meta=dict(meta))

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def __len__(self) -> int:
        return self.points.shape[0]

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "dim": self.dim,
            "empty": self.empty,
            "meta": self.meta,
            "points": self.points.tolist(),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "PointCloud":
        pts = np.array(obj["points"], dtype=float).reshape(-1, int(obj["dim"]))
        return cls(pts, label=obj.get("label", ""), empty=bool(obj.get("empty", False)),
                   meta=dict(obj.get("meta", {})))


def null_space(m: np.ndarray, tol: float = 1e-8) -> Subspace:
    """Null space of ``m`` from singular values below ``tol``."""
    m = np.atleast_2d(np.asarray(m, dtype=float))
    n = m.shape[1]
    if m.shape[0] == 0:
        return Subspace.full(n)
    _, s, vt = np.linalg.svd(m, full_matrices=True)
    rank = int(np.sum(s > tol))
    return Subspace(n, vt[rank:])


def orthonormalize(vectors: Iterable, tol: float = TOL.orthonormal) -> Subspace:
    """Two-pass Gram-Schmidt; vectors whose residual falls below ``tol`` are dropped.

    The residual threshold is relative to the input vector's norm when that
    norm exceeds one.
    """
    vecs = [np.asarray(v, dtype=float).reshape(-1) for v in vectors]
    if not vecs:
        raise ValueError("orthonormalize needs at least one vector")
    n = vecs[0].size
    if any(v.size != n for v in vecs):
        raise ValueError("dimension mismatch among input vectors")
    basis: list[np.ndarray] = []
    for v in vecs:
        r = v.copy()
        for _ in range(2):
            for b in basis:
                r -= (b @ r) * b
        nr = np.linalg.norm(r)
        if nr < tol * max(1.0, np.linalg.norm(v)):
            continue
        basis.append(r / nr)
    return Subspace(n, np.array(basis).reshape(len(basis), n))


def project(sigma: Subspace, v) -> np.ndarray:
    """Orthogonal projection onto ``sigma``; accepts a point or an ``(m, n)`` stack."""
    v = np.asarray(v, dtype=float)
    if v.shape[-1] != sigma.ambient_dim:
        raise ValueError(
            f"dimension mismatch: point has {v.shape[-1]} coords, subspace lives in {sigma.ambient_dim}"
        )
    return (v @ sigma.basis.T) @ sigma.basis


def busemann_pairing(v, u, t_grid) -> float:
    """Largest value of ``t - |v - t u|`` over ``t_grid``.

    Tends to ``<v, u>`` from below as the grid extends to infinity. Evaluated
    as ``(2t<v,u> - |v|^2) / (t + |v - t u|)`` to avoid cancellation at large t.
    """
    v = np.asarray(v, dtype=float)
    u = np.asarray(u, dtype=float)
    if v.shape != u.shape:
        raise ValueError("dimension mismatch")
    if abs(np.linalg.norm(u) - 1.0) > TOL.orthonormal:
        raise ValueError("u must have unit norm")
    t = np.asarray(t_grid, dtype=float).reshape(-1)
    if t.size == 0 or np.any(t <= 0):
        raise ValueError("t_grid must be a nonempty list of positive reals")
    if np.any(np.diff(t) <= 0):
        raise ValueError("t_grid must be increasing")
    d = np.linalg.norm(v[None, :] - t[:, None] * u[None, :], axis=1)
    vals = (2.0 * t * (v @ u) - v @ v) / (t + d)
    return float(vals.max())


def busemann_gap_bound(v_norm: float, t_max: float) -> float:
    """Upper bound on ``<v,u> - (t - |v - t u|)`` at ``t = t_max > 2|v|``."""
    if t_max <= v_norm:
        return float("inf")
    return v_norm**2 / (2.0 * (t_max - v_norm))


def dedup_rows(points: np.ndarray, tol: float = TOL.dedup) -> np.ndarray:
    """Drop rows within ``tol`` of an earlier row (rounded-key prefilter)."""
    pts = np.asarray(points, dtype=float)
    if len(pts) <= 1:
        return pts.copy()
    scale = max(tol, 1e-15)
    keys = np.round(pts / scale).astype(np.int64)
    _, first = np.unique(keys, axis=0, return_index=True)
    cand = pts[np.sort(first)]
    if len(cand) > 4000:
        # pairwise pass is quadratic; large sampled clouds rely on the key pass
        return cand
    keep: list[np.ndarray] = []
    for p in cand:
        if keep and np.min(np.linalg.norm(np.asarray(keep) - p, axis=1)) <= tol:
            continue
        keep.append(p)
    return np.asarray(keep)
