"""Game instance data model for the linear-quadratic leader family.

Leader ``i`` picks ``x_i`` in a box and maximizes

    f_i(x, y, w) = a_i . x_i + b_i . y + c_i (d_i - w)^2

where ``y`` is the followers' reaction and ``w`` the uncertain scalar. When
decision dependence is on, the uncertainty interval shrinks symmetrically by
``sum_i sigma_i . x_i`` from each end of the base interval.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

INTERVAL_TOL = 1e-12


class ScenarioError(ValueError):
    """Invalid scenario document or inconsistent game data."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class EmptyUncertaintySetError(ValueError):
    """The leaders' strategies restrict the uncertainty interval to nothing."""

    def __init__(self, lo: float, hi: float, x: "LeaderProfile | None" = None):
        self.lo = lo
        self.hi = hi
        self.x = x
        super().__init__(f"empty uncertainty interval: lo={lo!r} > hi={hi!r}")


def _frozen(values: Iterable[float]) -> np.ndarray:
    arr = np.array(values, dtype=float).reshape(-1)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class LeaderSpec:
    box_lo: np.ndarray
    box_hi: np.ndarray
    a: np.ndarray
    b: np.ndarray
    c: float
    d: float
    sigma: np.ndarray

    def __post_init__(self):
        for name in ("box_lo", "box_hi", "a", "b", "sigma"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))
        object.__setattr__(self, "c", float(self.c))
        object.__setattr__(self, "d", float(self.d))
        p = self.box_lo.size
        for name in ("box_hi", "a", "sigma"):
            if getattr(self, name).size != p:
                raise ScenarioError(
                    name, f"expected length {p}, got {getattr(self, name).size}"
                )
        if p == 0:
            raise ScenarioError("box_lo", "leader strategy must have dimension >= 1")
        bad = np.flatnonzero(self.box_lo > self.box_hi)
        if bad.size:
            k = int(bad[0])
            raise ScenarioError(
                f"box_lo[{k}]",
                f"box_lo={self.box_lo[k]!r} exceeds box_hi={self.box_hi[k]!r}",
            )

    @property
    def dim(self) -> int:
        return self.box_lo.size


@dataclass(frozen=True, eq=False)
class FollowerSpec:
    """Inner LP ``max e.v  s.t. v_1 >= 0,  sum_i g_i.x_i + h.v = w + sum_l alpha_l y_l``.

    ``g`` holds one coupling vector per leader and ``alpha`` one coefficient
    per *other* follower, in follower index order.
    """

    e: np.ndarray
    h: np.ndarray
    g: tuple[np.ndarray, ...]
    alpha: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "e", _frozen(self.e))
        object.__setattr__(self, "h", _frozen(self.h))
        object.__setattr__(self, "g", tuple(_frozen(gi) for gi in self.g))
        object.__setattr__(self, "alpha", _frozen(self.alpha))
        for name in ("e", "h"):
            if getattr(self, name).size != 2:
                raise ScenarioError(
                    name, f"expected length 2, got {getattr(self, name).size}"
                )


@dataclass(frozen=True, eq=False)
class LqGameSpec:
    leaders: tuple[LeaderSpec, ...]
    followers: tuple[FollowerSpec, ...]
    w_base_lo: float
    w_base_hi: float
    ddu_enabled: bool = True
    solver: Mapping[str, Any] = field(default_factory=dict)
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "leaders", tuple(self.leaders))
        object.__setattr__(self, "followers", tuple(self.followers))
        object.__setattr__(self, "w_base_lo", float(self.w_base_lo))
        object.__setattr__(self, "w_base_hi", float(self.w_base_hi))
        object.__setattr__(self, "ddu_enabled", bool(self.ddu_enabled))
        if not self.leaders:
            raise ScenarioError("leaders", "at least one leader is required")
        if not self.followers:
            raise ScenarioError("followers", "at least one follower is required")
        if self.w_base_lo > self.w_base_hi:
            raise ScenarioError(
                "uncertainty.lo",
                f"lo={self.w_base_lo!r} exceeds hi={self.w_base_hi!r}",
            )
        n, m = self.n, self.m
        for i, leader in enumerate(self.leaders):
            if leader.b.size != m:
                raise ScenarioError(
                    f"leaders[{i}].b", f"expected length {m} (followers), got {leader.b.size}"
                )
        for j, follower in enumerate(self.followers):
            if len(follower.g) != n:
                raise ScenarioError(
                    f"followers[{j}].g", f"expected {n} entries (one per leader), got {len(follower.g)}"
                )
            for i, gi in enumerate(follower.g):
                if gi.size != self.leaders[i].dim:
                    raise ScenarioError(
                        f"followers[{j}].g[{i}]",
                        f"expected length {self.leaders[i].dim}, got {gi.size}",
                    )
            if follower.alpha.size != m - 1:
                raise ScenarioError(
                    f"followers[{j}].alpha", f"expected length {m - 1}, got {follower.alpha.size}"
                )

    @property
    def n(self) -> int:
        return len(self.leaders)

    @property
    def m(self) -> int:
        return len(self.followers)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(leader.dim for leader in self.leaders)

    @property
    def slices(self) -> tuple[slice, ...]:
        offsets = np.concatenate([[0], np.cumsum(self.dims)])
        return tuple(slice(int(s), int(e)) for s, e in zip(offsets[:-1], offsets[1:]))

    @property
    def sigma_flat(self) -> np.ndarray:
        return np.concatenate([leader.sigma for leader in self.leaders])

    def with_ddu(self, enabled: bool) -> "LqGameSpec":
        return replace(self, ddu_enabled=enabled)

    def to_document(self) -> dict:
        """Inverse of :func:`parse_scenario`."""
        doc = {
            "leaders": [
                {
                    "box_lo": leader.box_lo.tolist(),
                    "box_hi": leader.box_hi.tolist(),
                    "a": leader.a.tolist(),
                    "b": leader.b.tolist(),
                    "c": leader.c,
                    "d": leader.d,
                    "sigma": leader.sigma.tolist(),
                }
                for leader in self.leaders
            ],
            "followers": [
                {
                    "e": f.e.tolist(),
                    "h": f.h.tolist(),
                    "g": [gi.tolist() for gi in f.g],
                    "alpha": f.alpha.tolist(),
                }
                for f in self.followers
            ],
            "uncertainty": {
                "lo": self.w_base_lo,
                "hi": self.w_base_hi,
                "ddu_enabled": self.ddu_enabled,
            },
        }
        if self.name:
            doc["name"] = self.name
        if self.solver:
            doc["solver"] = dict(self.solver)
        return doc


@dataclass(frozen=True, eq=False)
class LeaderProfile:
    """Strategies of all leaders. May be infeasible; see :func:`check_profile_feasible`."""

    x: tuple[np.ndarray, ...]

    def __post_init__(self):
        object.__setattr__(self, "x", tuple(_frozen(xi) for xi in self.x))

    def __len__(self):
        return len(self.x)

    def __getitem__(self, i: int) -> np.ndarray:
        return self.x[i]

    def __eq__(self, other):
        if not isinstance(other, LeaderProfile) or len(other) != len(self):
            return NotImplemented
        return all(np.array_equal(u, v) for u, v in zip(self.x, other.x))

    def __hash__(self):
        return hash(tuple(tuple(xi.tolist()) for xi in self.x))

    def flat(self) -> np.ndarray:
        return np.concatenate(self.x)

    def with_leader(self, i: int, xi: Sequence[float]) -> "LeaderProfile":
        parts = list(self.x)
        parts[i] = np.asarray(xi, dtype=float)
        return LeaderProfile(tuple(parts))

    def tolist(self) -> list[list[float]]:
        return [xi.tolist() for xi in self.x]

    @classmethod
    def from_flat(cls, spec: LqGameSpec, flat: Sequence[float]) -> "LeaderProfile":
        flat = np.asarray(flat, dtype=float)
        return cls(tuple(flat[s] for s in spec.slices))

    @classmethod
    def zeros(cls, spec: LqGameSpec) -> "LeaderProfile":
        return cls(tuple(np.zeros(p) for p in spec.dims))


def as_profile(spec: LqGameSpec, x) -> LeaderProfile:
    """Coerce nested sequences into a dimension-checked :class:`LeaderProfile`."""
    if not isinstance(x, LeaderProfile):
        x = LeaderProfile(tuple(x))
    if len(x) != spec.n:
        raise ValueError(f"profile has {len(x)} leaders, game has {spec.n}")
    for i, (xi, p) in enumerate(zip(x.x, spec.dims)):
        if xi.size != p:
            raise ValueError(f"x[{i}] has length {xi.size}, leader {i} has dimension {p}")
    return x


# ---------------------------------------------------------------------------
# scenario documents


def _vector(doc: Mapping, key: str, path: str) -> list[float]:
    if key not in doc:
        raise ScenarioError(f"{path}.{key}", "missing required field")
    value = doc[key]
    if not isinstance(value, list) or not all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in value
    ):
        raise ScenarioError(f"{path}.{key}", "expected an array of numbers")
    return [float(v) for v in value]


def _scalar(doc: Mapping, key: str, path: str) -> float:
    if key not in doc:
        raise ScenarioError(f"{path}.{key}", "missing required field")
    value = doc[key]
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise ScenarioError(f"{path}.{key}", "expected a number")
    return float(value)


def _prefixed(err: ScenarioError, prefix: str) -> ScenarioError:
    return ScenarioError(f"{prefix}.{err.path}", str(err).split(": ", 1)[-1])


def parse_scenario(doc: Mapping[str, Any]) -> LqGameSpec:
    if not isinstance(doc, Mapping):
        raise ScenarioError("", "scenario document must be a JSON object")
    for key in ("leaders", "followers", "uncertainty"):
        if key not in doc:
            raise ScenarioError(key, "missing required field")
    if not isinstance(doc["leaders"], list) or not doc["leaders"]:
        raise ScenarioError("leaders", "expected a non-empty array")
    if not isinstance(doc["followers"], list) or not doc["followers"]:
        raise ScenarioError("followers", "expected a non-empty array")

    leaders = []
    for i, ld in enumerate(doc["leaders"]):
        path = f"leaders[{i}]"
        if not isinstance(ld, Mapping):
            raise ScenarioError(path, "expected an object")
        try:
            leaders.append(
                LeaderSpec(
                    box_lo=_vector(ld, "box_lo", path),
                    box_hi=_vector(ld, "box_hi", path),
                    a=_vector(ld, "a", path),
                    b=_vector(ld, "b", path),
                    c=_scalar(ld, "c", path),
                    d=_scalar(ld, "d", path),
                    sigma=_vector(ld, "sigma", path),
                )
            )
        except ScenarioError as err:
            if err.path.startswith(path):
                raise
            raise _prefixed(err, path) from None

    followers = []
    for j, fd in enumerate(doc["followers"]):
        path = f"followers[{j}]"
        if not isinstance(fd, Mapping):
            raise ScenarioError(path, "expected an object")
        g = fd.get("g")
        if not isinstance(g, list):
            raise ScenarioError(f"{path}.g", "expected an array of arrays, one per leader")
        g_vectors = [_vector({"g": gi}, "g", f"{path}.g[{k}]") for k, gi in enumerate(g)]
        try:
            followers.append(
                FollowerSpec(
                    e=_vector(fd, "e", path),
                    h=_vector(fd, "h", path),
                    g=tuple(g_vectors),
                    alpha=_vector(fd, "alpha", path),
                )
            )
        except ScenarioError as err:
            if err.path.startswith(path):
                raise
            raise _prefixed(err, path) from None

    unc = doc["uncertainty"]
    if not isinstance(unc, Mapping):
        raise ScenarioError("uncertainty", "expected an object")
    ddu = unc.get("ddu_enabled", True)
    if not isinstance(ddu, bool):
        raise ScenarioError("uncertainty.ddu_enabled", "expected a boolean")
    solver = doc.get("solver", {})
    if not isinstance(solver, Mapping):
        raise ScenarioError("solver", "expected an object")

    return LqGameSpec(
        leaders=tuple(leaders),
        followers=tuple(followers),
        w_base_lo=_scalar(unc, "lo", "uncertainty"),
        w_base_hi=_scalar(unc, "hi", "uncertainty"),
        ddu_enabled=ddu,
        solver=dict(solver),
        name=str(doc.get("name", "")),
    )


def load_scenario(text: str) -> LqGameSpec:
    """Parse a JSON scenario document into a validated :class:`LqGameSpec`."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as err:
        raise ScenarioError("", f"invalid JSON: {err}") from None
    return parse_scenario(doc)


BUNDLED_DIR = Path(__file__).parent / "data"


def bundled_scenario_path(name: str = "paper_sec5.json") -> Path:
    """Path of a packaged scenario; the ``.json`` suffix may be omitted."""
    if not name.endswith(".json"):
        name += ".json"
    return BUNDLED_DIR / name


def load_bundled(name: str = "paper_sec5.json") -> LqGameSpec:
    return load_scenario(bundled_scenario_path(name).read_text(encoding="utf-8"))


# ---------------------------------------------------------------------------
# evaluation


def eval_payoff(spec: LqGameSpec, i: int, x, y: Sequence[float], w: float) -> float:
    if not 0 <= i < spec.n:
        raise IndexError(f"leader index {i} out of range for {spec.n} leaders")
    x = as_profile(spec, x)
    leader = spec.leaders[i]
    y = np.asarray(y, dtype=float)
    if y.size != spec.m:
        raise ValueError(f"y has length {y.size}, game has {spec.m} followers")
    return float(leader.a @ x[i] + leader.b @ y + leader.c * (leader.d - w) ** 2)


def payoff_vector(spec: LqGameSpec, x, y: Sequence[float], w: float) -> np.ndarray:
    return np.array([eval_payoff(spec, i, x, y, w) for i in range(spec.n)])


def restriction(spec: LqGameSpec, x) -> float:
    """Total shrink ``sum_i sigma_i . x_i`` applied to each end of the base interval."""
    x = as_profile(spec, x)
    return float(sum(leader.sigma @ xi for leader, xi in zip(spec.leaders, x.x)))


def uncertainty_interval(spec: LqGameSpec, x) -> tuple[float, float]:
    if not spec.ddu_enabled:
        return spec.w_base_lo, spec.w_base_hi
    r = restriction(spec, x)
    lo, hi = spec.w_base_lo + r, spec.w_base_hi - r
    if lo > hi + INTERVAL_TOL:
        raise EmptyUncertaintySetError(lo, hi, as_profile(spec, x))
    if lo > hi:
        lo = hi = 0.5 * (lo + hi)
    return lo, hi


@dataclass(frozen=True)
class LeaderFeasibility:
    leader: int
    feasible: bool
    violation: float


def check_profile_feasible(spec: LqGameSpec, x, tol: float = 0.0) -> list[LeaderFeasibility]:
    """Per-leader box membership with the worst componentwise violation."""
    x = as_profile(spec, x)
    report = []
    for i, (leader, xi) in enumerate(zip(spec.leaders, x.x)):
        below = np.max(leader.box_lo - xi, initial=0.0)
        above = np.max(xi - leader.box_hi, initial=0.0)
        violation = float(max(below, above, 0.0))
        report.append(LeaderFeasibility(i, violation <= tol, violation))
    return report
