"""Leader best responses and the grid check of unilateral leader optimality.

Two best-response modes are offered:

``myopic``
    ``w`` is held fixed. After substituting the reaction map the payoff is
    affine in ``x_i``, so each coordinate goes to the box end picked by the
    sign of its reduced coefficient.

``anticipating``
    Every candidate ``x_i`` is scored after re-solving the virtual player's
    scalarized worst case on ``W((x_i, x_-i))``. This captures the payoff
    effect of shrinking the uncertainty interval, which the myopic mode
    cannot see. The search enumerates the box-corner lattice and then runs a
    coarse scan plus golden-section refinement along each coordinate.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Literal, Optional, Sequence

import numpy as np

from .followers import ReactionMap
from .model import EmptyUncertaintySetError, LqGameSpec, as_profile, check_profile_feasible
from .worst_case import check_weights, intervals, minimize_weighted, w_payoffs

Mode = Literal["myopic", "anticipating"]
Tiebreak = Literal["lex-low", "prefer-restrict", "prefer-relax"]
Search = Literal["lattice", "grid"]

MODES = ("myopic", "anticipating")
TIEBREAKS = ("lex-low", "prefer-restrict", "prefer-relax")
FLAT_TOL = 1e-12
FEAS_TOL = 1e-9
SCAN_POINTS = 41
GOLDEN_ITERS = 80
MAX_SWEEPS = 5
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True, eq=False)
class BestResponseResult:
    x_i: np.ndarray
    y_anticipated: np.ndarray
    value: float
    tie_coordinates: frozenset[int]
    mode: Mode
    w_used: float
    tiebreak: Tiebreak = "lex-low"


def _tied(a: float, b: float) -> bool:
    return abs(a - b) <= FLAT_TOL * max(1.0, abs(a), abs(b))


def _myopic_coefficients(spec: LqGameSpec, rmap: ReactionMap, i: int) -> np.ndarray:
    leader = spec.leaders[i]
    return leader.a + (leader.b @ rmap.A)[spec.slices[i]]


def _check_others(spec: LqGameSpec, x, i: int):
    for rep in check_profile_feasible(spec, x, tol=FEAS_TOL):
        if rep.leader != i and not rep.feasible:
            raise ValueError(
                f"x_-{i} infeasible: leader {rep.leader} violates its box by {rep.violation!r}"
            )


def _myopic(spec, rmap, i, x, w, tiebreak):
    leader = spec.leaders[i]
    if spec.ddu_enabled:
        others = sum(
            spec.leaders[k].sigma @ x[k] for k in range(spec.n) if k != i
        )
        own = np.minimum(leader.sigma * leader.box_lo, leader.sigma * leader.box_hi).sum()
        widest = (spec.w_base_lo + others + own, spec.w_base_hi - others - own)
        if not widest[0] - FEAS_TOL <= w <= widest[1] + FEAS_TOL:
            raise ValueError(
                f"w={w!r} lies outside W((x_{i}, x_-{i})) for every x_{i} in the box"
            )
    coef = _myopic_coefficients(spec, rmap, i)
    flat = np.abs(coef) <= FLAT_TOL
    xi = np.where(coef > 0, leader.box_hi, leader.box_lo)
    for k in np.flatnonzero(flat):
        s = leader.sigma[k]
        if tiebreak == "prefer-restrict" and s != 0:
            xi[k] = leader.box_hi[k] if s > 0 else leader.box_lo[k]
        elif tiebreak == "prefer-relax" and s != 0:
            xi[k] = leader.box_lo[k] if s > 0 else leader.box_hi[k]
        else:
            xi[k] = leader.box_lo[k]
    ties = frozenset(
        int(k) for k in np.flatnonzero(flat) if leader.box_lo[k] < leader.box_hi[k]
    )
    full = x.with_leader(i, xi)
    y = rmap(full.flat(), w)
    value = float(leader.a @ xi + leader.b @ y + leader.c * (leader.d - w) ** 2)
    return BestResponseResult(xi, y, value, ties, "myopic", float(w), tiebreak)


class AnticipatedPayoff:
    """Leader ``i``'s payoff as a function of its own strategy, with ``w`` re-solved.

    Candidates whose uncertainty interval is empty score ``-inf``.
    """

    def __init__(self, spec: LqGameSpec, rmap: ReactionMap, i: int, x, weights):
        self.spec = spec
        self.rmap = rmap
        self.i = i
        self.lam = check_weights(weights, spec.n)
        self.base = x.flat()
        self.sl = spec.slices[i]

    def profiles(self, candidates: np.ndarray) -> np.ndarray:
        X = np.tile(self.base, (candidates.shape[0], 1))
        X[:, self.sl] = candidates
        return X

    def evaluate(self, candidates) -> tuple[np.ndarray, np.ndarray]:
        candidates = np.atleast_2d(np.asarray(candidates, dtype=float))
        X = self.profiles(candidates)
        lo, hi, ok = intervals(self.spec, X)
        pay = w_payoffs(self.spec, self.rmap, X)
        w, _ = minimize_weighted(pay, self.lam, lo, hi)
        values = pay(w)[:, self.i]
        return np.where(ok, values, -np.inf), w

    def __call__(self, candidates) -> np.ndarray:
        return self.evaluate(candidates)[0]


def _select(values: np.ndarray, points: np.ndarray, sigma: np.ndarray, tiebreak: Tiebreak) -> int:
    best = float(np.max(values))
    tied = [k for k, v in enumerate(values) if np.isfinite(v) and _tied(float(v), best)]
    if tiebreak == "prefer-restrict":
        return max(tied, key=lambda k: (points[k] @ sigma, -k))
    if tiebreak == "prefer-relax":
        return min(tied, key=lambda k: (points[k] @ sigma, k))
    return tied[0]


def _golden_max(fn, a: float, b: float) -> tuple[float, float]:
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = fn(c), fn(d)
    for _ in range(GOLDEN_ITERS):
        if b - a <= 1e-13 * max(1.0, abs(a), abs(b)):
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = fn(d)
    return (c, fc) if fc >= fd else (d, fd)


def _refine(payoff: AnticipatedPayoff, xi: np.ndarray, value: float, lo: np.ndarray, hi: np.ndarray):
    """Coordinate sweeps: coarse scan, then golden section around the best scan bracket."""
    xi = xi.copy()
    for _ in range(MAX_SWEEPS):
        moved = False
        for k in range(xi.size):
            if lo[k] == hi[k]:
                continue
            ts = np.linspace(lo[k], hi[k], SCAN_POINTS)
            cand = np.tile(xi, (SCAN_POINTS, 1))
            cand[:, k] = ts
            vals = payoff(cand)
            j = int(np.argmax(vals))
            if vals[j] <= value or _tied(float(vals[j]), value):
                continue

            def line(t, k=k):
                c = xi.copy()
                c[k] = t
                return float(payoff(c)[0])

            t_best, v_best = float(ts[j]), float(vals[j])
            a, b = ts[max(j - 1, 0)], ts[min(j + 1, SCAN_POINTS - 1)]
            t_g, v_g = _golden_max(line, float(a), float(b))
            if v_g > v_best:
                t_best, v_best = t_g, v_g
            xi[k] = t_best
            value = v_best
            moved = True
        if not moved:
            break
    return xi, value


def _anticipating(spec, rmap, i, x, weights, tiebreak, search, grid_n):
    leader = spec.leaders[i]
    payoff = AnticipatedPayoff(spec, rmap, i, x, weights)
    lo, hi = leader.box_lo, leader.box_hi
    if search == "grid":
        axes = [np.linspace(l, h, grid_n) if l < h else np.array([l]) for l, h in zip(lo, hi)]
    else:
        axes = [np.array([l, h]) if l < h else np.array([l]) for l, h in zip(lo, hi)]
    points = np.array(list(itertools.product(*axes)), dtype=float)
    values = payoff(points)
    if not np.any(np.isfinite(values)):
        lo_w, hi_w, _ = intervals(spec, payoff.profiles(points[:1]))
        raise EmptyUncertaintySetError(float(lo_w[0]), float(hi_w[0]), x)
    k = _select(values, points, leader.sigma, tiebreak)
    xi, value = points[k].copy(), float(values[k])
    lattice_xi = xi.copy()
    if search == "lattice":
        xi, value = _refine(payoff, xi, value, lo, hi)

    ties = set()
    if search == "lattice" and np.array_equal(xi, lattice_xi):
        for c in range(xi.size):
            if lo[c] == hi[c]:
                continue
            flipped = xi.copy()
            flipped[c] = hi[c] if xi[c] == lo[c] else lo[c]
            if _tied(float(payoff(flipped)[0]), value):
                ties.add(c)
    else:
        for c in range(xi.size):
            if lo[c] == hi[c]:
                continue
            probe = np.tile(xi, (2, 1))
            probe[:, c] = [lo[c], hi[c]]
            if all(_tied(float(v), value) for v in payoff(probe)):
                ties.add(c)

    vals, w = payoff.evaluate(xi)
    full = x.with_leader(i, xi)
    y = rmap(full.flat(), float(w[0]))
    return BestResponseResult(
        xi, y, float(vals[0]), frozenset(ties), "anticipating", float(w[0]), tiebreak
    )


def leader_best_response(
    spec: LqGameSpec,
    rmap: ReactionMap,
    i: int,
    x,
    w: Optional[float] = None,
    mode: Mode = "anticipating",
    weights: Optional[Sequence[float]] = None,
    tiebreak: Tiebreak = "lex-low",
    search: Search = "lattice",
    grid_n: int = 101,
) -> BestResponseResult:
    """Best response of leader ``i`` (0-based) against the other leaders' strategies in ``x``.

    ``x`` is a full profile; its ``i``-th entry is ignored. ``w`` is required
    for the myopic mode and ``weights`` for the anticipating one.
    """
    if not 0 <= i < spec.n:
        raise IndexError(f"leader index {i} out of range for {spec.n} leaders")
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    if tiebreak not in TIEBREAKS:
        raise ValueError(f"unknown tiebreak {tiebreak!r}")
    x = as_profile(spec, x)
    _check_others(spec, x, i)
    if mode == "myopic":
        if w is None:
            raise ValueError("myopic best response needs a fixed w")
        return _myopic(spec, rmap, i, x, float(w), tiebreak)
    if weights is None:
        raise ValueError("anticipating best response needs virtual-player weights")
    return _anticipating(spec, rmap, i, x, weights, tiebreak, search, grid_n)


@dataclass(frozen=True, eq=False)
class LeaderCheck:
    leader: int
    passed: bool
    value: float
    best_value: float
    margin: float
    witness_x: Optional[np.ndarray] = None


def check_leader_optimality(
    spec: LqGameSpec,
    rmap: ReactionMap,
    i: int,
    x,
    w: float,
    grid_n: int = 101,
    tol: float = 1e-6,
) -> LeaderCheck:
    """Grid-search leader ``i``'s box with ``w`` fixed; fail if some point gains more than ``tol``."""
    x = as_profile(spec, x)
    leader = spec.leaders[i]
    axes = [np.linspace(l, h, grid_n) for l, h in zip(leader.box_lo, leader.box_hi)]
    grid = np.array(list(itertools.product(*axes)), dtype=float)
    X = np.tile(x.flat(), (grid.shape[0], 1))
    X[:, spec.slices[i]] = grid
    Y = rmap(X, np.full(grid.shape[0], w))
    values = grid @ leader.a + Y @ leader.b + leader.c * (leader.d - w) ** 2
    y_cur = rmap(x.flat(), w)
    current = float(leader.a @ x[i] + leader.b @ y_cur + leader.c * (leader.d - w) ** 2)
    k = int(np.argmax(values))
    margin = float(values[k] - current)
    if margin <= tol:
        return LeaderCheck(i, True, current, float(values[k]), margin)
    return LeaderCheck(i, False, current, float(values[k]), margin, grid[k].copy())
