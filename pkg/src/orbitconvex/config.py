"""Numerical tolerances and defaults shared by every module."""

from __future__ import annotations

from dataclasses import dataclass

DEFAULT_SEED = 1729


@dataclass(frozen=True)
class Tolerances:
    orthonormal: float = 1e-10
    group_orthogonal: float = 1e-9
    orbit_sphere: float = 2e-9
    dedup: float = 1e-8
    fixed_singular_value: float = 1e-8
    lp_feasibility: float = 1e-9
    exact: float = 1e-8
    degenerate: float = 1e-12
    lipschitz_slack: float = 1e-9


TOL = Tolerances()
