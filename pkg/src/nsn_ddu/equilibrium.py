"""Best-response-of-best-response Jacobi iteration and the equilibrium certifier."""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Literal, Optional, Sequence

import numpy as np

from .followers import ReactionMap, build_reaction_map, verify_follower_gne
from .leaders import LeaderCheck, Mode, Tiebreak, check_leader_optimality, leader_best_response
from .model import (
    EmptyUncertaintySetError,
    LeaderProfile,
    LqGameSpec,
    as_profile,
    check_profile_feasible,
    payoff_vector,
    uncertainty_interval,
)
from .worst_case import (
    DEFAULT_GRID_W,
    DEFAULT_PARETO_TOL,
    ParetoCheck,
    check_strong_pareto,
    check_weak_pareto,
    check_weights,
    lambda_weights,
    scalarized_worst_case,
)

Verdict = Literal["not_equilibrium", "weak", "strong"]

DEFAULT_MAX_ITER = 200
DEFAULT_CONV_TOL = 1e-8
CYCLE_QUANTUM = 1e-10


class SolverError(RuntimeError):
    def __init__(self, message: str, trace=None, last=None):
        super().__init__(message)
        self.trace = trace or []
        self.last = last


class NonConvergenceError(SolverError):
    pass


class CyclingError(SolverError):
    pass


@dataclass(frozen=True, eq=False)
class EquilibriumCandidate:
    x: LeaderProfile
    w: float
    y_anticipations: tuple[np.ndarray, ...]
    weights: np.ndarray
    mode: Mode = "anticipating"
    tiebreak: Tiebreak = "lex-low"
    iterations: int = 0
    converged: bool = False

    @property
    def y(self) -> np.ndarray:
        """The virtual player's anticipation ``y^[w]``."""
        return self.y_anticipations[-1]

    def to_dict(self) -> dict:
        return {
            "x": self.x.tolist(),
            "w": self.w,
            "y": self.y.tolist(),
            "y_anticipations": [y.tolist() for y in self.y_anticipations],
            "weights": self.weights.tolist(),
            "mode": self.mode,
            "tiebreak": self.tiebreak,
            "iterations": self.iterations,
            "converged": self.converged,
        }

    @classmethod
    def from_dict(cls, spec: LqGameSpec, doc: dict, rmap: Optional[ReactionMap] = None):
        """Accepts the solver's own output or a bare ``{"x": ..., "w": ...}`` candidate."""
        x = as_profile(spec, doc["x"])
        w = float(doc["w"])
        if "y_anticipations" in doc:
            ys = tuple(np.asarray(y, dtype=float) for y in doc["y_anticipations"])
        elif "y" in doc:
            ys = (np.asarray(doc["y"], dtype=float),) * (spec.n + 1)
        else:
            rmap = rmap or build_reaction_map(spec)
            ys = (rmap(x.flat(), w),) * (spec.n + 1)
        if len(ys) != spec.n + 1:
            raise ValueError(f"expected {spec.n + 1} anticipations, got {len(ys)}")
        weights = doc.get("weights")
        weights = np.full(spec.n, 1.0 / spec.n) if weights is None else np.asarray(weights, float)
        return cls(
            x=x,
            w=w,
            y_anticipations=ys,
            weights=weights,
            mode=doc.get("mode", "anticipating"),
            tiebreak=doc.get("tiebreak", "lex-low"),
            iterations=int(doc.get("iterations", 0)),
            converged=bool(doc.get("converged", False)),
        )


@dataclass(frozen=True)
class TraceRow:
    iteration: int
    x: tuple[float, ...]
    w: float
    displacement: float


def _key(x_flat: np.ndarray, w: float) -> tuple[int, ...]:
    return tuple(np.round(np.append(x_flat, w) / CYCLE_QUANTUM).astype(np.int64).tolist())


def _feasible_zeros(spec: LqGameSpec) -> LeaderProfile:
    return LeaderProfile(
        tuple(np.clip(np.zeros(l.dim), l.box_lo, l.box_hi) for l in spec.leaders)
    )


def jacobi_solve(
    spec: LqGameSpec,
    rmap: ReactionMap,
    weights: Sequence[float],
    init=None,
    mode: Mode = "anticipating",
    tiebreak: Tiebreak = "lex-low",
    max_iter: int = DEFAULT_MAX_ITER,
    conv_tol: float = DEFAULT_CONV_TOL,
) -> tuple[EquilibriumCandidate, list[TraceRow]]:
    """Simultaneous leader best responses, then a virtual-player update, until ``(x, w)`` settles.

    Raises :class:`NonConvergenceError` after ``max_iter`` rounds and
    :class:`CyclingError` when a (quantized) iterate repeats without
    converging. An empty uncertainty interval propagates with ``trace`` and
    ``last`` attached to the exception.
    """
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    lam = check_weights(weights, spec.n)
    x = _feasible_zeros(spec) if init is None else as_profile(spec, init)
    for rep in check_profile_feasible(spec, x, tol=1e-9):
        if not rep.feasible:
            raise ValueError(f"initial profile infeasible for leader {rep.leader}")

    trace: list[TraceRow] = []

    def worst(profile):
        try:
            return scalarized_worst_case(spec, rmap, profile, lam)
        except EmptyUncertaintySetError as err:
            err.trace = trace
            err.last = profile
            raise

    wc = worst(x)
    w = wc.w_star
    trace.append(TraceRow(0, tuple(x.flat().tolist()), w, float("nan")))
    seen = {_key(x.flat(), w)}

    for it in range(1, max_iter + 1):
        parts = []
        for i in range(spec.n):
            try:
                br = leader_best_response(
                    spec, rmap, i, x, w=w, mode=mode, weights=lam, tiebreak=tiebreak
                )
            except EmptyUncertaintySetError as err:
                err.trace = trace
                err.last = x
                raise
            parts.append(br.x_i)
        x_new = LeaderProfile(tuple(parts))
        wc = worst(x_new)
        disp = float(
            np.max(np.abs(np.append(x_new.flat() - x.flat(), wc.w_star - w)))
        )
        x, w = x_new, wc.w_star
        trace.append(TraceRow(it, tuple(x.flat().tolist()), w, disp))
        if disp < conv_tol:
            cand = EquilibriumCandidate(
                x=x,
                w=w,
                y_anticipations=(wc.y_star,) * (spec.n + 1),
                weights=lam,
                mode=mode,
                tiebreak=tiebreak,
                iterations=it,
                converged=True,
            )
            return cand, trace
        key = _key(x.flat(), w)
        if key in seen:
            raise CyclingError(
                f"best-response dynamics revisited an iterate at round {it} without converging",
                trace,
                x,
            )
        seen.add(key)
    raise NonConvergenceError(
        f"no convergence within {max_iter} rounds (last displacement {disp!r})", trace, x
    )


def corner_starts(spec: LqGameSpec) -> list[LeaderProfile]:
    """All box-corner profiles, for multistart runs."""
    axes = []
    for leader in spec.leaders:
        axes.extend(
            [(l, h) if l < h else (l,) for l, h in zip(leader.box_lo, leader.box_hi)]
        )
    return [LeaderProfile.from_flat(spec, c) for c in itertools.product(*axes)]


# ---------------------------------------------------------------------------
# certification


@dataclass(frozen=True)
class ConditionResult:
    passed: bool
    margin: float
    detail: str = ""


@dataclass(frozen=True, eq=False)
class EquilibriumCertificate:
    candidate: EquilibriumCandidate
    cond_a: ConditionResult
    cond_b: ConditionResult
    cond_c: tuple[LeaderCheck, ...]
    cond_d1: ParetoCheck
    cond_d2: ParetoCheck
    followers: ConditionResult
    verdict: Verdict
    reduced_outcome: bool
    payoffs: np.ndarray
    grid_n_x: int
    grid_n_w: int
    tol: float

    @property
    def cond_c_passed(self) -> bool:
        return all(c.passed for c in self.cond_c)

    def to_dict(self) -> dict:
        def pareto(p: ParetoCheck):
            return {
                "passed": p.passed,
                "witness_w": p.witness_w,
                "margins": None if p.margins is None else p.margins.tolist(),
                "notes": list(p.notes),
            }

        return {
            "candidate": self.candidate.to_dict(),
            "verdict": self.verdict,
            "reduced_outcome": self.reduced_outcome,
            "payoffs": self.payoffs.tolist(),
            "cond_a": vars(self.cond_a),
            "cond_b": vars(self.cond_b),
            "cond_c": [
                {
                    "leader": c.leader,
                    "passed": c.passed,
                    "margin": c.margin,
                    "witness_x": None if c.witness_x is None else c.witness_x.tolist(),
                }
                for c in self.cond_c
            ],
            "cond_d1": pareto(self.cond_d1),
            "cond_d2": pareto(self.cond_d2),
            "followers": vars(self.followers),
            "config": {"grid_n_x": self.grid_n_x, "grid_n_w": self.grid_n_w, "tol": self.tol},
        }


def verify_equilibrium(
    spec: LqGameSpec,
    rmap: ReactionMap,
    candidate: EquilibriumCandidate,
    grid_n_x: int = 101,
    grid_n_w: int = DEFAULT_GRID_W,
    tol: float = DEFAULT_PARETO_TOL,
) -> EquilibriumCertificate:
    """Check every clause of the equilibrium conditions independently of the solver."""
    x, w = candidate.x, candidate.w

    feas = check_profile_feasible(spec, x)
    worst_violation = max(r.violation for r in feas)
    cond_a = ConditionResult(worst_violation <= tol, worst_violation)

    interval_ok = True
    try:
        lo, hi = uncertainty_interval(spec, x)
        gap = max(lo - w, w - hi, 0.0)
        cond_b = ConditionResult(gap <= tol, gap, f"W(x)=[{lo!r}, {hi!r}]")
    except EmptyUncertaintySetError as err:
        interval_ok = False
        cond_b = ConditionResult(False, err.lo - err.hi, "W(x) is empty")

    y_margin = max(
        float(np.max(verify_follower_gne(spec, x, w, y)[0])) for y in candidate.y_anticipations
    )
    followers = ConditionResult(y_margin <= tol, y_margin)

    cond_c = tuple(
        check_leader_optimality(spec, rmap, i, x, w, grid_n=grid_n_x, tol=tol)
        for i in range(spec.n)
    )

    if interval_ok:
        d1 = check_weak_pareto(spec, rmap, x, w, candidate.y, grid_n_w, tol)
        d2 = check_strong_pareto(spec, rmap, x, w, candidate.y, grid_n_w, tol)
    else:
        d1 = ParetoCheck(False, grid_n=grid_n_w, tol=tol, notes=["W(x) is empty"])
        d2 = ParetoCheck(False, grid_n=grid_n_w, tol=tol, notes=["W(x) is empty"])

    base = cond_a.passed and cond_b.passed and followers.passed and all(c.passed for c in cond_c)
    if base and d2.passed:
        verdict = "strong"
    elif base and d1.passed:
        verdict = "weak"
    else:
        verdict = "not_equilibrium"

    ys = candidate.y_anticipations
    reduced = all(np.allclose(y, ys[-1], rtol=0.0, atol=tol) for y in ys)
    return EquilibriumCertificate(
        candidate=candidate,
        cond_a=cond_a,
        cond_b=cond_b,
        cond_c=cond_c,
        cond_d1=d1,
        cond_d2=d2,
        followers=followers,
        verdict=verdict,
        reduced_outcome=reduced,
        payoffs=payoff_vector(spec, x, candidate.y, w),
        grid_n_x=grid_n_x,
        grid_n_w=grid_n_w,
        tol=tol,
    )


# ---------------------------------------------------------------------------
# lambda sweep


@dataclass(frozen=True)
class SweepRow:
    lam: float
    regime: str
    x: tuple[float, ...] = ()
    w: float = float("nan")
    y: tuple[float, ...] = ()
    f: tuple[float, ...] = ()
    weighted: float = float("nan")
    verdict: str = ""
    iterations: int = 0
    error: str = ""

    def profile(self, spec: LqGameSpec) -> LeaderProfile:
        return LeaderProfile.from_flat(spec, self.x)


@dataclass(frozen=True)
class SolveConfig:
    mode: Mode = "anticipating"
    tiebreak: Tiebreak = "lex-low"
    max_iter: int = DEFAULT_MAX_ITER
    conv_tol: float = DEFAULT_CONV_TOL
    grid_n_x: int = 101
    grid_n_w: int = DEFAULT_GRID_W
    tol: float = DEFAULT_PARETO_TOL
    init: Optional[tuple[float, ...]] = field(default=None)


def _sweep_row(spec: LqGameSpec, lam: float, regime: str, config: SolveConfig) -> SweepRow:
    try:
        rmap = build_reaction_map(spec)
        weights = lambda_weights(lam)
        init = None if config.init is None else LeaderProfile.from_flat(spec, config.init)
        cand, _ = jacobi_solve(
            spec, rmap, weights, init, config.mode, config.tiebreak, config.max_iter, config.conv_tol
        )
        cert = verify_equilibrium(spec, rmap, cand, config.grid_n_x, config.grid_n_w, config.tol)
    except (SolverError, ValueError) as err:
        return SweepRow(lam, regime, error=f"{type(err).__name__}: {err}")
    return SweepRow(
        lam=lam,
        regime=regime,
        x=tuple(cand.x.flat().tolist()),
        w=cand.w,
        y=tuple(cand.y.tolist()),
        f=tuple(cert.payoffs.tolist()),
        weighted=float(weights @ cert.payoffs),
        verdict=cert.verdict,
        iterations=cand.iterations,
    )


def _sweep_task(args):
    return _sweep_row(*args)


def lambda_sweep(
    spec: LqGameSpec,
    lambdas: Sequence[float],
    both_regimes: bool = True,
    config: SolveConfig = SolveConfig(),
    jobs: int = 1,
) -> list[SweepRow]:
    """Solve and certify at each ``lam`` with weights ``(lam, 1 - lam)``.

    Rows are ordered by ``lam`` and, with ``both_regimes``, DDU before DIU.
    Solver failures are recorded in the row's ``error`` field.
    """
    if spec.n != 2:
        raise ValueError("lambda sweeps need exactly two leaders")
    regimes = [("ddu", spec.with_ddu(True)), ("diu", spec.with_ddu(False))]
    if not both_regimes:
        regimes = [("ddu" if spec.ddu_enabled else "diu", spec)]
    tasks = [(s, float(lam), name, config) for lam in lambdas for name, s in regimes]
    for _, lam, _, _ in tasks:
        if not 0.0 <= lam <= 1.0:
            raise ValueError(f"lambda must lie in [0, 1], got {lam!r}")
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_sweep_task, tasks, chunksize=4))
    return [_sweep_row(*t) for t in tasks]


def ddu_dominance(rows: Sequence[SweepRow], tol: float = 1e-9) -> dict[float, bool]:
    """Per ``lam``: is the DDU weighted payoff at least the DIU one (up to ``tol``)?"""
    by = {(r.lam, r.regime): r for r in rows}
    out = {}
    for lam in sorted({r.lam for r in rows}):
        ddu, diu = by.get((lam, "ddu")), by.get((lam, "diu"))
        if ddu is None or diu is None or ddu.error or diu.error:
            continue
        out[lam] = ddu.weighted >= diu.weighted - tol
    return out
