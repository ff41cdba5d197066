import numpy as np
import pytest

from nsn_ddu import build_reaction_map, load_bundled
from nsn_ddu.model import FollowerSpec, LeaderSpec, LqGameSpec

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def spec():
    return load_bundled()


@pytest.fixture(scope="session")
def rmap(spec):
    return build_reaction_map(spec)


@pytest.fixture(scope="session")
def diu_spec(spec):
    return spec.with_ddu(False)


def variant(spec, leaders=None, followers=None, **top):
    """Copy of ``spec`` with per-leader / per-follower field overrides."""
    doc = spec.to_document()
    for i, fields in (leaders or {}).items():
        doc["leaders"][i].update(fields)
    for j, fields in (followers or {}).items():
        doc["followers"][j].update(fields)
    doc["uncertainty"].update(top)
    from nsn_ddu import parse_scenario

    return parse_scenario(doc)


def random_spec(rng, n=None, m=None, c_sign="nonneg", ddu=True):
    """Random well-posed instance: bounded follower LPs and a nonsingular coupling system."""
    n = n or int(rng.integers(1, 4))
    m = m or int(rng.integers(1, 3))
    dims = [int(rng.integers(1, 3)) for _ in range(n)]
    leaders = []
    for p in dims:
        lo = rng.uniform(-1.0, 0.5, p)
        hi = lo + rng.uniform(0.1, 1.5, p)
        if c_sign == "nonneg":
            c = float(rng.choice([0.0, rng.uniform(0.0, 1.0)]))
        else:
            c = float(rng.choice([-1.0, 0.0, 1.0]) * rng.uniform(0.05, 1.0))
        leaders.append(
            LeaderSpec(
                box_lo=lo,
                box_hi=hi,
                a=rng.normal(size=p),
                b=rng.normal(size=m),
                c=c,
                d=float(rng.normal()),
                sigma=rng.uniform(0.0, 0.5, p) * rng.integers(0, 2, p),
            )
        )
    followers = []
    for _ in range(m):
        h = np.array([rng.uniform(0.5, 2.0), rng.choice([-1, 1]) * rng.uniform(0.5, 2.0)])
        e2 = rng.uniform(-2.0, 2.0)
        # keep the v_1 coefficient e1 - e2 h1 / h2 nonpositive
        e1 = e2 * h[0] / h[1] - rng.uniform(0.0, 1.0)
        followers.append(
            FollowerSpec(
                e=[e1, e2],
                h=h,
                g=tuple(rng.normal(size=p) for p in dims),
                alpha=rng.uniform(-0.3, 0.3, m - 1),
            )
        )
    r_max = sum(np.maximum(l.sigma * l.box_lo, l.sigma * l.box_hi).sum() for l in leaders)
    w_lo = float(rng.uniform(-5.0, -1.0)) - max(r_max, 0.0)
    w_hi = float(rng.uniform(1.0, 5.0)) + max(r_max, 0.0)
    spec = LqGameSpec(tuple(leaders), tuple(followers), w_lo, w_hi, ddu)
    build_reaction_map(spec)
    return spec


def random_profile(spec, rng):
    from nsn_ddu import LeaderProfile

    return LeaderProfile(
        tuple(l.box_lo + rng.random(l.dim) * (l.box_hi - l.box_lo) for l in spec.leaders)
    )


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
