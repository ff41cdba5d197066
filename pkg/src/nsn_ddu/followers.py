"""Followers' generalized-Nash reaction map for the LP follower family.

Follower ``j`` solves ``max e_j.v`` subject to ``v_1 >= 0`` and the equality
``h_j.v = w + sum_l alpha_jl y_l - gamma_j(x)``. Eliminating ``v_2`` turns the
objective into ``theta_j * rhs + slope_j * v_1`` with ``theta_j = e_j2 / h_j2``
and ``slope_j = e_j1 - e_j2 h_j1 / h_j2``, so the LP is bounded iff
``slope_j <= 0`` and its optimal value is ``theta_j * rhs`` (attained at
``v_1 = 0``). Stacking the optimal values gives the linear system
``(I - T) y = theta * (w - gamma(x))`` which is solved once, symbolically in
``(x, w)``.

Jacobi iteration on the followers' best responses is deliberately not
offered: for the bundled instance its gain matrix has spectral radius 2.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .model import LeaderProfile, LqGameSpec, as_profile

SLOPE_TOL = 1e-12
COND_LIMIT = 1e12


class FollowerEquilibriumError(ValueError):
    pass


class FollowerUnboundedError(FollowerEquilibriumError):
    pass


class FollowerIndeterminateError(FollowerEquilibriumError):
    pass


@dataclass(frozen=True, eq=False)
class ReactionMap:
    """Affine follower equilibrium ``y(x, w) = A @ x_flat + b * w + c0``."""

    A: np.ndarray
    b: np.ndarray
    c0: np.ndarray
    theta: np.ndarray
    provenance: Literal["analytic", "verified"] = "analytic"

    def __call__(self, x_flat: np.ndarray, w) -> np.ndarray:
        """Vectorized evaluation: ``x_flat`` is ``(P,)`` or ``(K, P)``; ``w`` scalar or ``(K,)``."""
        x_flat = np.asarray(x_flat, dtype=float)
        w = np.asarray(w, dtype=float)
        return x_flat @ self.A.T + np.multiply.outer(w, self.b) + self.c0


def _other_followers(m: int, j: int) -> list[int]:
    return [l for l in range(m) if l != j]


def follower_coefficients(spec: LqGameSpec):
    """Per-follower ``theta``, LP slope on ``v_1``, coupling matrix ``T`` and ``gamma`` rows.

    ``gamma`` is an ``m x P`` matrix with ``gamma(x) = G @ x_flat``.
    """
    m = spec.m
    theta = np.empty(m)
    slope = np.empty(m)
    alpha_full = np.zeros((m, m))
    gamma = np.zeros((m, sum(spec.dims)))
    for j, f in enumerate(spec.followers):
        if f.h[1] == 0.0:
            raise FollowerIndeterminateError(
                f"follower {j}: h[1] must be nonzero for a closed-form reaction"
            )
        theta[j] = f.e[1] / f.h[1]
        slope[j] = f.e[0] - f.e[1] * f.h[0] / f.h[1]
        for k, l in enumerate(_other_followers(m, j)):
            alpha_full[j, l] = f.alpha[k]
        gamma[j] = np.concatenate(f.g)
    return theta, slope, alpha_full, gamma


def _check_bounded(slope: np.ndarray):
    unbounded = np.flatnonzero(slope > SLOPE_TOL)
    if unbounded.size:
        j = int(unbounded[0])
        raise FollowerUnboundedError(
            f"follower problem unbounded: follower {j} gains {slope[j]!r} per unit of v_1"
        )


def build_reaction_map(spec: LqGameSpec) -> ReactionMap:
    theta, slope, alpha_full, gamma = follower_coefficients(spec)
    _check_bounded(slope)
    T = theta[:, None] * alpha_full
    M = np.eye(spec.m) - T
    if not np.all(np.isfinite(M)) or np.linalg.cond(M) > COND_LIMIT:
        raise FollowerIndeterminateError(
            "follower equilibrium indeterminate: I - T is singular"
        )
    rhs = np.column_stack([theta, -theta[:, None] * gamma])
    sol = np.linalg.solve(M, rhs)
    b = sol[:, 0]
    A = sol[:, 1:]
    c0 = np.zeros(spec.m)
    for arr in (A, b, c0, theta):
        arr.setflags(write=False)
    return ReactionMap(A=A, b=b, c0=c0, theta=theta)


def follower_reaction(rmap: ReactionMap, x, w: float) -> np.ndarray:
    if isinstance(x, LeaderProfile):
        x_flat = x.flat()
    else:
        x_flat = np.concatenate([np.asarray(xi, dtype=float).reshape(-1) for xi in x])
    return rmap(x_flat, float(w))


def verify_follower_gne(spec: LqGameSpec, x, w: float, y, tol: float = 1e-9):
    """Re-solve each follower's LP with the others fixed; return ``(margins, ok)``.

    ``margins[j] = |y_j - theta_j (w + sum_l alpha_jl y_l - gamma_j(x))|``.
    """
    x = as_profile(spec, x)
    y = np.asarray(y, dtype=float)
    theta, slope, alpha_full, gamma = follower_coefficients(spec)
    _check_bounded(slope)
    best = theta * (w + alpha_full @ y - gamma @ x.flat())
    margins = np.abs(y - best)
    return margins, bool(np.all(margins <= tol))
