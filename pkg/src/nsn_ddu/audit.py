"""Sampling audit of the existence assumptions and the resulting existence verdict.

Checked by random midpoint tests (all checked functions are polynomials of
degree at most two, so a violation is exact when found):

* the reaction map's graph is convex,
* the uncertainty interval is nonempty over the leaders' boxes,
* each payoff is quasi-concave in the leader's own strategy and ``y``,
* each payoff is convex in ``(y, w)`` (its negative is concave),
* each payoff is quasi-convex in ``(y, w)`` (the weaker variant).

Compactness and continuity of the boxes, the interval map and the reaction
map hold structurally for this family and are reported as such.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal, Optional

import numpy as np

from .followers import ReactionMap
from .model import LqGameSpec
from .worst_case import intervals

AuditVerdict = Literal["strong_exists", "weak_exists", "inconclusive"]

DEFAULT_SAMPLES = 10_000
DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class Check:
    passed: bool
    worst_violation: float = 0.0
    structural: bool = False
    note: str = ""


@dataclass(frozen=True)
class AuditReport:
    a1a_box: Check
    a1b_graph_convex: Check
    a1c_w_interval: Check
    a2a_quasiconcave: tuple[Check, ...]
    a2b_concave_set: frozenset[int]
    a2b_violations: tuple[float, ...]
    a3_quasiconcave_set: frozenset[int]
    a3_violations: tuple[float, ...]
    verdict: AuditVerdict
    basis: Optional[str]
    sample_count: int
    seed: int
    tol: float
    structural_notes: tuple[str, ...] = field(default=())

    @property
    def common_passed(self) -> bool:
        return (
            self.a1a_box.passed
            and self.a1b_graph_convex.passed
            and self.a1c_w_interval.passed
            and all(c.passed for c in self.a2a_quasiconcave)
        )

    def to_dict(self) -> dict:
        return {
            "a1a_box": vars(self.a1a_box),
            "a1b_graph_convex": vars(self.a1b_graph_convex),
            "a1c_w_interval": vars(self.a1c_w_interval),
            "a2a_quasiconcave": [vars(c) for c in self.a2a_quasiconcave],
            "a2b_concave_set": sorted(self.a2b_concave_set),
            "a2b_violations": list(self.a2b_violations),
            "a3_quasiconcave_set": sorted(self.a3_quasiconcave_set),
            "a3_violations": list(self.a3_violations),
            "verdict": self.verdict,
            "basis": self.basis,
            "sample_count": self.sample_count,
            "seed": self.seed,
            "tol": self.tol,
            "structural_notes": list(self.structural_notes),
        }


def _sample_boxes(spec: LqGameSpec, rng: np.random.Generator, k: int) -> np.ndarray:
    lo = np.concatenate([l.box_lo for l in spec.leaders])
    hi = np.concatenate([l.box_hi for l in spec.leaders])
    return lo + rng.random((k, lo.size)) * (hi - lo)


def _most_restrictive(spec: LqGameSpec) -> np.ndarray:
    parts = []
    for leader in spec.leaders:
        parts.append(np.where(leader.sigma >= 0, leader.box_hi, leader.box_lo))
    return np.concatenate(parts)


def _payoff(spec: LqGameSpec, i: int, xi: np.ndarray, y: np.ndarray, w: np.ndarray) -> np.ndarray:
    leader = spec.leaders[i]
    return xi @ leader.a + y @ leader.b + leader.c * (leader.d - w) ** 2


def audit_assumptions(
    spec: LqGameSpec,
    rmap: ReactionMap,
    sample_count: int = DEFAULT_SAMPLES,
    tol: float = DEFAULT_TOL,
    seed: int = 0,
) -> AuditReport:
    if sample_count < 1:
        raise ValueError("sample_count must be >= 1")
    rng = np.random.default_rng(seed)
    k = sample_count
    w_lo, w_hi = spec.w_base_lo, spec.w_base_hi

    def sample_w(size):
        return w_lo + rng.random(size) * (w_hi - w_lo)

    # uncertainty interval: random profiles plus the exact most restrictive corner
    X = np.vstack([_sample_boxes(spec, rng, k), _most_restrictive(spec)])
    lo, hi, ok = intervals(spec, X)
    gap = float(np.max(lo - hi))
    a1c = Check(bool(ok.all()), max(gap, 0.0), note="worst lo - hi over sampled profiles")

    # graph convexity of the reaction map
    X1, X2 = _sample_boxes(spec, rng, k), _sample_boxes(spec, rng, k)
    W1, W2 = sample_w(k), sample_w(k)
    Y1, Y2 = rmap(X1, W1), rmap(X2, W2)
    g = rng.random(k)[:, None]
    Ym = rmap(g * X1 + (1 - g) * X2, g[:, 0] * W1 + (1 - g[:, 0]) * W2)
    scale = 1.0 + np.maximum(np.abs(Y1).max(axis=1), np.abs(Y2).max(axis=1))
    graph_dev = float(np.max(np.abs(Ym - (g * Y1 + (1 - g) * Y2)).max(axis=1) / scale))
    a1b = Check(graph_dev <= tol, graph_dev)

    # followers' strategy range used for segments in y
    y_bound = 1.0 + float(max(np.abs(Y1).max(), np.abs(Y2).max()))

    def sample_y(size):
        return (2.0 * rng.random((size, spec.m)) - 1.0) * y_bound

    a2a, a2b_viol, a3_viol = [], [], []
    for i, sl in enumerate(spec.slices):
        # quasi-concavity in (x_i, y) at fixed (x_-i, w)
        Xa, Xb = _sample_boxes(spec, rng, k)[:, sl], _sample_boxes(spec, rng, k)[:, sl]
        Ya, Yb, Wf = sample_y(k), sample_y(k), sample_w(k)
        fa = _payoff(spec, i, Xa, Ya, Wf)
        fb = _payoff(spec, i, Xb, Yb, Wf)
        fm = _payoff(spec, i, 0.5 * (Xa + Xb), 0.5 * (Ya + Yb), Wf)
        viol = float(np.max(np.minimum(fa, fb) - fm))
        a2a.append(Check(viol <= tol, max(viol, 0.0)))

        # convexity / quasi-convexity in (y, w) at fixed x
        Xf = _sample_boxes(spec, rng, k)[:, sl]
        Ya, Yb, Wa, Wb = sample_y(k), sample_y(k), sample_w(k), sample_w(k)
        fa = _payoff(spec, i, Xf, Ya, Wa)
        fb = _payoff(spec, i, Xf, Yb, Wb)
        fm = _payoff(spec, i, Xf, 0.5 * (Ya + Yb), 0.5 * (Wa + Wb))
        a2b_viol.append(max(float(np.max(fm - 0.5 * (fa + fb))), 0.0))
        a3_viol.append(max(float(np.max(fm - np.maximum(fa, fb))), 0.0))

    concave_set = frozenset(i for i, v in enumerate(a2b_viol) if v <= tol)
    quasi_set = frozenset(i for i, v in enumerate(a3_viol) if v <= tol)
    a1a = Check(True, structural=True, note="boxes are nonempty, compact and convex")
    common = a1a.passed and a1b.passed and a1c.passed and all(c.passed for c in a2a)

    verdict: AuditVerdict = "inconclusive"
    basis = None
    if common and concave_set == frozenset(range(spec.n)):
        verdict, basis = "strong_exists", "strong"
    elif common and concave_set:
        verdict, basis = "weak_exists", "weak"
    elif common and quasi_set:
        verdict, basis = "weak_exists", "weak-quasiconvex"

    notes = (
        "leader strategy boxes do not depend on other leaders (continuous, constant map)",
        "the uncertainty interval endpoints are affine in x (continuous map)",
        "the reaction map is affine and single-valued (continuous, compact values)",
        "payoffs are polynomials (continuous)",
    )
    return AuditReport(
        a1a_box=a1a,
        a1b_graph_convex=a1b,
        a1c_w_interval=a1c,
        a2a_quasiconcave=tuple(a2a),
        a2b_concave_set=concave_set,
        a2b_violations=tuple(a2b_viol),
        a3_quasiconcave_set=quasi_set,
        a3_violations=tuple(a3_viol),
        verdict=verdict,
        basis=basis,
        sample_count=sample_count,
        seed=seed,
        tol=tol,
        structural_notes=notes,
    )


def _leaders(indices) -> str:
    return "{" + ", ".join(str(i + 1) for i in sorted(indices)) + "}"


def existence_statement(report: AuditReport) -> str:
    """Human-readable existence claim backed by the audited assumptions (leaders 1-based)."""
    checked = (
        "strategy boxes, convex reaction-map graph, nonempty uncertainty interval, "
        "payoffs quasi-concave in (x_i, y)"
    )
    if report.basis == "strong":
        return (
            "At least one strong equilibrium point exists (strong existence clause): "
            f"{checked}; every leader's payoff is convex in (y, w), "
            f"S = {_leaders(report.a2b_concave_set)} = N."
        )
    if report.basis == "weak":
        return (
            "At least one weak equilibrium point exists (weak existence clause): "
            f"{checked}; payoffs convex in (y, w) for S = {_leaders(report.a2b_concave_set)}."
        )
    if report.basis == "weak-quasiconvex":
        return (
            "At least one weak equilibrium point exists (quasi-convex relaxation): "
            f"{checked}; payoffs quasi-convex in (y, w) for "
            f"S = {_leaders(report.a3_quasiconcave_set)}."
        )
    failed = []
    if not report.a1b_graph_convex.passed:
        failed.append("reaction-map graph convexity")
    if not report.a1c_w_interval.passed:
        failed.append("nonempty uncertainty interval")
    if not all(c.passed for c in report.a2a_quasiconcave):
        failed.append("quasi-concavity in (x_i, y)")
    if not report.a2b_concave_set and not report.a3_quasiconcave_set:
        failed.append("(quasi-)convexity in (y, w) for some leader")
    return "Inconclusive: the sufficient conditions fail for " + ", ".join(failed) + "."
