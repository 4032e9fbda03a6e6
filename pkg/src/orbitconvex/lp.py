"""Dense simplex for small-variable LPs of the form max <c,x> s.t. A x <= b, b >= 0.

Polar supports have few variables (<= 12) and possibly many constraints, so the
solver runs a revised simplex on the dual problem

    min <b, y>  s.t.  A^T y = c,  y >= 0

whose basis is only ``n x n``. Bland's rule is used throughout. The primal
optimum is read off the simplex multipliers; an infeasible dual yields a
recession direction of the primal.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import TOL

MAX_VARIABLES = 12
MAX_CONSTRAINTS = 100_000


class LPError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class LPProblem:
    objective: np.ndarray
    A: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.objective, dtype=float).reshape(-1)
        n = c.size
        A = np.asarray(self.A, dtype=float).reshape(-1, n)
        b = np.asarray(self.b, dtype=float).reshape(-1)
        if b.size != A.shape[0]:
            raise ValueError("A and b disagree on the number of constraints")
        if n > MAX_VARIABLES:
            raise ValueError(f"at most {MAX_VARIABLES} variables supported, got {n}")
        if A.shape[0] > MAX_CONSTRAINTS:
            raise ValueError(f"at most {MAX_CONSTRAINTS} constraints supported")
        if np.any(b < 0):
            raise ValueError("right-hand sides must be non-negative (origin feasible)")
        object.__setattr__(self, "objective", c)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)


@dataclass
class LPResult:
    status: str  # "optimal" | "unbounded"
    value: float
    x: np.ndarray | None
    ray: np.ndarray | None
    iterations: int


class _RevisedSimplex:
    def __init__(self, M: np.ndarray, rhs: np.ndarray, eps: float):
        self.M = M  # n x (m + n), last n columns artificial identity
        self.rhs = rhs
        self.n, self.ncols = M.shape
        self.m = self.ncols - self.n
        self.eps = eps
        self.basis = list(range(self.m, self.m + self.n))
        self.Binv = np.eye(self.n)
        self.iterations = 0

    def refactor(self):
        self.Binv = np.linalg.inv(self.M[:, self.basis])

    def xb(self):
        return self.Binv @ self.rhs

    def run(self, cost: np.ndarray, allow_artificial: bool, max_iter: int = 50_000):
        m = self.m
        since_refactor = 0
        while True:
            if self.iterations > max_iter:
                raise LPError("simplex iteration limit reached")
            cb = cost[self.basis]
            pi = self.Binv.T @ cb
            ncand = self.ncols if allow_artificial else m
            reduced = cost[:ncand] - pi @ self.M[:, :ncand]
            scale = 1.0 + np.abs(cost[:ncand])
            neg = np.flatnonzero(reduced < -self.eps * scale)
            if neg.size:
                inb = np.zeros(self.ncols, dtype=bool)
                inb[self.basis] = True
                neg = neg[~inb[neg]]
            if neg.size == 0:
                return pi
            q = int(neg[0])  # Bland: lowest index
            d = self.Binv @ self.M[:, q]
            xb = self.xb()
            pos = np.flatnonzero(d > self.eps)
            if pos.size == 0:
                return None  # unbounded direction in the dual
            ratios = np.maximum(xb[pos], 0.0) / d[pos]
            best = ratios.min()
            ties = pos[ratios <= best + self.eps * (1.0 + best)]
            r = int(min(ties, key=lambda i: self.basis[i]))  # Bland tie-break
            piv = d[r]
            row = self.Binv[r] / piv
            self.Binv -= np.outer(d, row)
            self.Binv[r] = row
            self.basis[r] = q
            self.iterations += 1
            since_refactor += 1
            if since_refactor >= 64:
                self.refactor()
                since_refactor = 0

    def drive_out_artificials(self):
        """Pivot zero-level artificials out of the basis where a structural column allows."""
        m = self.m
        for r in range(self.n):
            if self.basis[r] < m:
                continue
            row = self.Binv[r] @ self.M[:, :m]
            inb = np.zeros(m, dtype=bool)
            inb[[j for j in self.basis if j < m]] = True
            cand = np.flatnonzero((np.abs(row) > 1e-9) & ~inb)
            if cand.size == 0:
                continue  # redundant row; artificial stays at zero
            q = int(cand[0])
            d = self.Binv @ self.M[:, q]
            piv = d[r]
            newrow = self.Binv[r] / piv
            self.Binv -= np.outer(d, newrow)
            self.Binv[r] = newrow
            self.basis[r] = q
        self.refactor()


def solve_lp(problem: LPProblem, eps: float = 1e-11) -> LPResult:
    """Maximize ``<c, x>`` subject to ``A x <= b``; ``x`` is free."""
    c, A, b = problem.objective, problem.A, problem.b
    n = c.size
    m = A.shape[0]
    sign = np.where(c < 0, -1.0, 1.0)
    rhs = sign * c
    M = np.hstack([(A * sign[None, :]).T, np.eye(n)]) if m else np.eye(n)
    solver = _RevisedSimplex(M, rhs, eps)

    phase1 = np.concatenate([np.zeros(m), np.ones(n)])
    pi = solver.run(phase1, allow_artificial=True)
    if pi is None:
        raise LPError("phase 1 unbounded; should not happen")
    infeas = float(phase1[solver.basis] @ solver.xb())
    if infeas > TOL.lp_feasibility * (1.0 + np.abs(c).sum()):
        ray = sign * pi
        nr = np.linalg.norm(ray)
        ray = ray / nr if nr > 0 else ray
        return LPResult("unbounded", float("inf"), None, ray, solver.iterations)

    solver.drive_out_artificials()
    phase2 = np.concatenate([b, np.zeros(n)])
    pi = solver.run(phase2, allow_artificial=False)
    if pi is None:
        raise LPError("dual unbounded: primal infeasible, impossible with b >= 0")
    x = sign * pi
    return LPResult("optimal", float(c @ x), x, None, solver.iterations)


def maximize(c, A, b) -> LPResult:
    return solve_lp(LPProblem(np.asarray(c, float), np.asarray(A, float), np.asarray(b, float)))
