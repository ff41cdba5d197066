"""The virtual player: scalarized worst case, Pareto fronts and Pareto checks.

After substituting the followers' reaction, each leader payoff is a scalar
quadratic in ``w``::

    f_i(w) = base_i(x) + slope_i * w + c_i (d_i - w)^2

so the weighted-sum worst case is a 1-D quadratic and is minimized exactly.
Grid evaluation is only used for the Pareto front and the Pareto checks.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal, Optional, Sequence

import numpy as np

from .followers import ReactionMap
from .model import (
    INTERVAL_TOL,
    EmptyUncertaintySetError,
    LqGameSpec,
    as_profile,
    uncertainty_interval,
)

QUAD_TOL = 1e-14
DOMINANCE_TOL = 1e-9
DEFAULT_GRID_W = 4001
DEFAULT_PARETO_TOL = 1e-6

Boundary = Literal["interior", "at_lo", "at_hi"]


@dataclass(frozen=True, eq=False)
class WPayoffs:
    """Per-leader payoff coefficients in ``w`` at a batch of profiles.

    ``base`` has shape ``(K, n)``; ``slope``, ``c`` and ``d`` have shape ``(n,)``.
    """

    base: np.ndarray
    slope: np.ndarray
    c: np.ndarray
    d: np.ndarray

    def __call__(self, w) -> np.ndarray:
        """Payoffs at ``w``; broadcasts ``w`` of shape ``(K,)`` or ``(K, G)`` to ``(K, [G,] n)``."""
        w = np.asarray(w, dtype=float)[..., None]
        base = self.base.reshape(self.base.shape[:1] + (1,) * (w.ndim - 2) + self.base.shape[1:])
        return base + self.slope * w + self.c * (self.d - w) ** 2


def w_payoffs(spec: LqGameSpec, rmap: ReactionMap, x_flat: np.ndarray) -> WPayoffs:
    x_flat = np.atleast_2d(np.asarray(x_flat, dtype=float))
    y0 = x_flat @ rmap.A.T + rmap.c0
    base = np.empty((x_flat.shape[0], spec.n))
    for i, (leader, sl) in enumerate(zip(spec.leaders, spec.slices)):
        base[:, i] = x_flat[:, sl] @ leader.a + y0 @ leader.b
    slope = np.array([leader.b @ rmap.b for leader in spec.leaders])
    c = np.array([leader.c for leader in spec.leaders])
    d = np.array([leader.d for leader in spec.leaders])
    return WPayoffs(base, slope, c, d)


def intervals(spec: LqGameSpec, x_flat: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Batch version of :func:`uncertainty_interval`: ``(lo, hi, ok)`` per row."""
    x_flat = np.atleast_2d(np.asarray(x_flat, dtype=float))
    k = x_flat.shape[0]
    if not spec.ddu_enabled:
        return (
            np.full(k, spec.w_base_lo),
            np.full(k, spec.w_base_hi),
            np.ones(k, dtype=bool),
        )
    r = x_flat @ spec.sigma_flat
    lo = spec.w_base_lo + r
    hi = spec.w_base_hi - r
    ok = lo <= hi + INTERVAL_TOL
    pinch = ok & (lo > hi)
    mid = 0.5 * (lo + hi)
    lo = np.where(pinch, mid, lo)
    hi = np.where(pinch, mid, hi)
    return lo, hi, ok


def check_weights(weights: Sequence[float], n: int) -> np.ndarray:
    lam = np.asarray(weights, dtype=float).reshape(-1)
    if lam.size != n:
        raise ValueError(f"expected {n} weights, got {lam.size}")
    if np.any(lam < 0) or not np.isclose(lam.sum(), 1.0, atol=1e-9):
        raise ValueError(f"weights must be nonnegative and sum to 1, got {lam.tolist()}")
    return lam


def lambda_weights(lam: float) -> np.ndarray:
    """Two-leader weighting ``(lam, 1 - lam)``."""
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"lambda must lie in [0, 1], got {lam!r}")
    return np.array([lam, 1.0 - lam])


def minimize_weighted(pay: WPayoffs, lam: np.ndarray, lo: np.ndarray, hi: np.ndarray):
    """Exact minimizer of ``sum_i lam_i f_i(w)`` over ``[lo, hi]`` for each row.

    Returns ``(w, degenerate)``; the degenerate flag marks a constant objective.
    """
    q = float(lam @ pay.c)
    lin = float(lam @ (pay.slope - 2.0 * pay.c * pay.d))
    if q > QUAD_TOL:
        return np.clip(-lin / (2.0 * q), lo, hi), np.zeros(lo.shape, dtype=bool)
    if q < -QUAD_TOL:
        j_lo = (pay(lo) * lam).sum(axis=-1)
        j_hi = (pay(hi) * lam).sum(axis=-1)
        return np.where(j_hi < j_lo, hi, lo), np.zeros(lo.shape, dtype=bool)
    if lin > QUAD_TOL:
        return lo.copy(), np.zeros(lo.shape, dtype=bool)
    if lin < -QUAD_TOL:
        return hi.copy(), np.zeros(lo.shape, dtype=bool)
    return lo.copy(), np.ones(lo.shape, dtype=bool)


@dataclass(frozen=True, eq=False)
class WorstCaseResult:
    w_star: float
    y_star: np.ndarray
    objective: float
    payoffs: np.ndarray
    boundary: Boundary
    lo: float
    hi: float
    degenerate: bool = False


def scalarized_worst_case(
    spec: LqGameSpec, rmap: ReactionMap, x, weights: Sequence[float]
) -> WorstCaseResult:
    x = as_profile(spec, x)
    lam = check_weights(weights, spec.n)
    lo, hi = uncertainty_interval(spec, x)
    x_flat = x.flat()[None, :]
    pay = w_payoffs(spec, rmap, x_flat)
    w_arr, degenerate = minimize_weighted(pay, lam, np.array([lo]), np.array([hi]))
    w = float(w_arr[0])
    payoffs = pay(w_arr)[0]
    if w <= lo:
        boundary = "at_lo"
    elif w >= hi:
        boundary = "at_hi"
    else:
        boundary = "interior"
    return WorstCaseResult(
        w_star=w,
        y_star=rmap(x_flat[0], w),
        objective=float(lam @ payoffs),
        payoffs=payoffs,
        boundary=boundary,
        lo=lo,
        hi=hi,
        degenerate=bool(degenerate[0]),
    )


# ---------------------------------------------------------------------------
# Pareto front


@dataclass(frozen=True, eq=False)
class ParetoPoint:
    w: float
    f: np.ndarray
    nondominated: bool


def nondominated_mask(F: np.ndarray, tol: float = DOMINANCE_TOL, chunk: int = 512) -> np.ndarray:
    """Minimization sense: row ``k`` is dominated if some row is ``<=`` everywhere and ``<`` somewhere."""
    F = np.asarray(F, dtype=float)
    mask = np.ones(F.shape[0], dtype=bool)
    for start in range(0, F.shape[0], chunk):
        block = F[start : start + chunk]
        le = np.all(F[None, :, :] <= block[:, None, :] + tol, axis=2)
        lt = np.any(F[None, :, :] < block[:, None, :] - tol, axis=2)
        mask[start : start + chunk] = ~np.any(le & lt, axis=1)
    return mask


def _w_grid(spec: LqGameSpec, x, grid_n: int) -> tuple[np.ndarray, float, float]:
    if grid_n < 2:
        raise ValueError(f"grid_n must be >= 2, got {grid_n}")
    lo, hi = uncertainty_interval(spec, x)
    return np.linspace(lo, hi, grid_n), lo, hi


def pareto_front(spec: LqGameSpec, rmap: ReactionMap, x, grid_n: int = 401) -> list[ParetoPoint]:
    x = as_profile(spec, x)
    grid, _, _ = _w_grid(spec, x, grid_n)
    F = w_payoffs(spec, rmap, x.flat())(grid[None, :])[0]
    mask = nondominated_mask(F)
    return [ParetoPoint(float(w), f, bool(nd)) for w, f, nd in zip(grid, F, mask)]


# ---------------------------------------------------------------------------
# Pareto membership checks


@dataclass(frozen=True, eq=False)
class ParetoCheck:
    """Outcome of a grid Pareto check; ``margins`` is ``f(candidate) - f(witness)``."""

    passed: bool
    witness_w: Optional[float] = None
    margins: Optional[np.ndarray] = None
    grid_n: int = 0
    tol: float = 0.0
    notes: list[str] = field(default_factory=list)


def _diffs(spec, rmap, x, w_star, y_star, grid_n):
    x = as_profile(spec, x)
    grid, _, _ = _w_grid(spec, x, grid_n)
    y_star = np.asarray(y_star, dtype=float)
    f_star = np.array(
        [
            leader.a @ xi + leader.b @ y_star + leader.c * (leader.d - w_star) ** 2
            for leader, xi in zip(spec.leaders, x.x)
        ]
    )
    F = w_payoffs(spec, rmap, x.flat())(grid[None, :])[0]
    return grid, f_star[None, :] - F


def check_weak_pareto(
    spec: LqGameSpec,
    rmap: ReactionMap,
    x,
    w_star: float,
    y_star,
    grid_n: int = DEFAULT_GRID_W,
    tol: float = DEFAULT_PARETO_TOL,
) -> ParetoCheck:
    """Fails iff some sampled ``w`` lowers every leader's payoff by more than ``tol``.

    The witness is the sample whose smallest margin is largest.
    """
    grid, diff = _diffs(spec, rmap, x, w_star, y_star, grid_n)
    bad = np.all(diff > tol, axis=1)
    if not bad.any():
        return ParetoCheck(True, grid_n=grid_n, tol=tol)
    worst = diff.min(axis=1)
    k = int(np.argmax(np.where(bad, worst, -np.inf)))
    return ParetoCheck(False, float(grid[k]), diff[k].copy(), grid_n, tol)


def check_strong_pareto(
    spec: LqGameSpec,
    rmap: ReactionMap,
    x,
    w_star: float,
    y_star,
    grid_n: int = DEFAULT_GRID_W,
    tol: float = DEFAULT_PARETO_TOL,
) -> ParetoCheck:
    """Fails iff some sampled ``w`` gives margins in ``R^n_+ minus {0}``.

    A margin counts as zero when ``|diff| <= tol`` and positive when
    ``diff > tol``. The witness maximizes the total margin.
    """
    grid, diff = _diffs(spec, rmap, x, w_star, y_star, grid_n)
    bad = np.all(diff >= -tol, axis=1) & np.any(diff > tol, axis=1)
    if not bad.any():
        return ParetoCheck(True, grid_n=grid_n, tol=tol)
    k = int(np.argmax(np.where(bad, diff.sum(axis=1), -np.inf)))
    return ParetoCheck(False, float(grid[k]), diff[k].copy(), grid_n, tol)


__all__ = [
    "EmptyUncertaintySetError",
    "ParetoCheck",
    "ParetoPoint",
    "WorstCaseResult",
    "check_strong_pareto",
    "check_weak_pareto",
    "lambda_weights",
    "nondominated_mask",
    "pareto_front",
    "scalarized_worst_case",
]
