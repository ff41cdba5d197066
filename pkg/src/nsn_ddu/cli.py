"""Command-line interface.

Exit codes: 0 when the result is certified, 1 for input errors (missing
files, bad scenarios, bad flags), 2 for solver or verification failures.
Leader indices and strategy coordinates are 1-based on the command line.
"""

from __future__ import annotations

import csv
import datetime as _dt
import io
import json
import logging
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

import click
import numpy as np

from . import __version__
from .audit import audit_assumptions, existence_statement
from .equilibrium import (
    EquilibriumCandidate,
    SolveConfig,
    SolverError,
    corner_starts,
    ddu_dominance,
    jacobi_solve,
    lambda_sweep,
    verify_equilibrium,
)
from .followers import (
    FollowerEquilibriumError,
    build_reaction_map,
    follower_reaction,
    verify_follower_gne,
)
from .leaders import MODES, TIEBREAKS, leader_best_response
from .model import (
    EmptyUncertaintySetError,
    LeaderProfile,
    ScenarioError,
    bundled_scenario_path,
    check_profile_feasible,
    load_scenario,
    uncertainty_interval,
)
from .worst_case import lambda_weights, pareto_front, scalarized_worst_case

log = logging.getLogger("nsn_ddu")

EXIT_OK, EXIT_INPUT, EXIT_FAIL = 0, 1, 2
OUT_ENV = "NSN_DDU_OUT"


class InputError(click.ClickException):
    exit_code = EXIT_INPUT


# ---------------------------------------------------------------------------
# helpers


def read_scenario(path: str):
    """Load a scenario file; bare names of bundled scenarios resolve to the packaged copy."""
    p = Path(path)
    if not p.exists():
        bundled = bundled_scenario_path(p.name)
        if p.parent == Path(".") and bundled.exists():
            p = bundled
        else:
            raise InputError(f"scenario file not found: {path}")
    text = p.read_text(encoding="utf-8")
    try:
        spec = load_scenario(text)
    except ScenarioError as err:
        raise InputError(f"invalid scenario {path}: {err}") from None
    return spec, json.loads(text)


def _fmt(v) -> str:
    if isinstance(v, (list, tuple, np.ndarray)):
        return "(" + ", ".join(_fmt(u) for u in v) + ")"
    v = float(v)
    r = round(v, 10)
    return repr(0.0 if r == 0 else r)


def _parse_profile(text: str, spec) -> LeaderProfile:
    try:
        parts = [[float(t) for t in chunk.split(",")] for chunk in text.split(";")]
        return LeaderProfile(tuple(np.array(p) for p in parts)) if len(parts) == spec.n else None
    except ValueError:
        return None


def _profile_option(text: Optional[str], spec) -> Optional[LeaderProfile]:
    if text is None:
        return None
    prof = _parse_profile(text, spec)
    if prof is None or [len(p) for p in prof.x] != list(spec.dims):
        raise InputError(f"profile {text!r} must look like '0,0;1,1' with dimensions {spec.dims}")
    bad = [r.leader + 1 for r in check_profile_feasible(spec, prof, tol=1e-9) if not r.feasible]
    if bad:
        raise InputError(f"profile {text!r} leaves the strategy box of leader(s) {bad}")
    return prof


def _weights(spec, lam: Optional[float], weights: Optional[str]) -> np.ndarray:
    if weights is not None:
        try:
            w = np.array([float(t) for t in weights.split(",")])
        except ValueError:
            raise InputError(f"--weights must be comma separated numbers, got {weights!r}") from None
        if w.size != spec.n or np.any(w < 0) or not np.isclose(w.sum(), 1.0, atol=1e-9):
            raise InputError(f"--weights needs {spec.n} nonnegative numbers summing to 1")
        return w
    if lam is None:
        lam = float(spec.solver.get("lambda", 0.5)) if spec.n == 2 else None
    if lam is None:
        return np.full(spec.n, 1.0 / spec.n)
    if spec.n != 2:
        raise InputError("--lambda needs exactly two leaders; use --weights")
    if not 0.0 <= lam <= 1.0:
        raise InputError(f"--lambda must lie in [0, 1], got {lam}")
    return lambda_weights(lam)


def _out_root(out: Optional[str]) -> Path:
    return Path(out or os.environ.get(OUT_ENV) or "runs")


class RunDir:
    """One self-contained output directory per invocation."""

    def __init__(self, root: Path, command: str, scenario_doc: dict, config: dict):
        self.started = _dt.datetime.now()
        stamp = self.started.strftime("%Y%m%d-%H%M%S-%f")
        path = root / f"{command}-{stamp}"
        n = 1
        while path.exists():
            path = root / f"{command}-{stamp}-{n}"
            n += 1
        path.mkdir(parents=True)
        self.path = path
        self.command = command
        self.scenario_doc = scenario_doc
        self.config = config
        self.outputs: list[str] = []

    def write_text(self, name: str, text: str):
        (self.path / name).write_text(text, encoding="utf-8")
        self.outputs.append(name)

    def write_json(self, name: str, obj):
        self.write_text(name, json.dumps(obj, indent=2, sort_keys=False) + "\n")

    def write_csv(self, name: str, header: Sequence[str], rows):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
        self.write_text(name, buf.getvalue())

    def finish(self, status: int):
        record = {
            "artifact_version": __version__,
            "command": self.command,
            "scenario": self.scenario_doc,
            "config": self.config,
            "outputs": self.outputs,
            "exit_status": status,
            "started": self.started.isoformat(),
            "finished": _dt.datetime.now().isoformat(),
        }
        (self.path / "run.json").write_text(json.dumps(record, indent=2) + "\n", encoding="utf-8")
        click.echo(f"run directory: {self.path}")
        return status


def _cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _x_header(spec) -> list[str]:
    return [f"x{i + 1}_{k + 1}" for i, p in enumerate(spec.dims) for k in range(p)]


def _trace_rows(trace):
    return [
        [t.iteration, *[_cell(v) for v in t.x], _cell(t.w), _cell(t.displacement)] for t in trace
    ]


def _echo_certificate(cert):
    cand = cert.candidate
    ok = lambda c: "pass" if c else "FAIL"  # noqa: E731
    click.echo(f"x* = {_fmt([list(v) for v in cand.x.x])}")
    click.echo(f"w* = {_fmt(cand.w)}")
    click.echo(f"y* = {_fmt(cand.y)}")
    click.echo(f"payoffs = {_fmt(cert.payoffs)}")
    click.echo(f"iterations = {cand.iterations}  converged = {cand.converged}")
    click.echo(f"(a) leader feasibility: {ok(cert.cond_a.passed)} (violation {cert.cond_a.margin:.3g})")
    click.echo(f"(b) w in W(x): {ok(cert.cond_b.passed)} (gap {cert.cond_b.margin:.3g}) {cert.cond_b.detail}")
    click.echo(f"    followers' reaction: {ok(cert.followers.passed)} (margin {cert.followers.margin:.3g})")
    for c in cert.cond_c:
        extra = "" if c.passed else f" witness x_{c.leader + 1}={_fmt(c.witness_x)}"
        click.echo(f"(c) leader {c.leader + 1} optimality: {ok(c.passed)} (gain {c.margin:.3g}){extra}")
    for label, d in (("(d1) weak Pareto", cert.cond_d1), ("(d2) Pareto", cert.cond_d2)):
        extra = "" if d.passed else f" witness w={_fmt(d.witness_w)} margins={_fmt(d.margins)}"
        click.echo(f"{label}: {ok(d.passed)}{extra}")
    click.echo(f"verdict: {cert.verdict}")


def _spec_for_regime(spec, diu: bool):
    return spec.with_ddu(False) if diu else spec


def _certificate_doc(cert, regime: str) -> dict:
    doc = cert.to_dict()
    doc["regime"] = regime
    return doc


# ---------------------------------------------------------------------------
# commands

common_solver = [
    click.option("--mode", type=click.Choice(MODES), default=None, help="Leader best-response mode."),
    click.option("--tiebreak", type=click.Choice(TIEBREAKS), default=None),
    click.option("--grid-x", type=int, default=None, help="Grid points per strategy coordinate."),
    click.option("--grid-w", type=int, default=None, help="Grid points on W(x)."),
    click.option("--tol", type=float, default=None, help="Verification tolerance."),
    click.option("--max-iter", type=int, default=None),
    click.option("--conv-tol", type=float, default=None),
    click.option("--out", type=click.Path(file_okay=False), default=None, help="Output root."),
]


def with_options(options):
    def deco(fn):
        for opt in reversed(options):
            fn = opt(fn)
        return fn

    return deco


def _config(spec, mode, tiebreak, grid_x, grid_w, tol, max_iter, conv_tol, init=None) -> SolveConfig:
    d = spec.solver
    return SolveConfig(
        mode=mode or d.get("mode", "anticipating"),
        tiebreak=tiebreak or d.get("tiebreak", "lex-low"),
        max_iter=max_iter or int(d.get("max_iter", 200)),
        conv_tol=conv_tol or float(d.get("conv_tol", 1e-8)),
        grid_n_x=grid_x or int(d.get("grid_x", 101)),
        grid_n_w=grid_w or int(d.get("grid_w", 4001)),
        tol=tol if tol is not None else float(d.get("tol", 1e-6)),
        init=None if init is None else tuple(init.flat().tolist()),
    )


def _reaction_map(spec):
    try:
        return build_reaction_map(spec)
    except FollowerEquilibriumError as err:
        raise InputError(str(err)) from None


@click.group()
@click.version_option(__version__)
@click.option("-v", "--verbose", is_flag=True, help="Log solver progress.")
def cli(verbose):
    """Solve, verify and audit Nash-Stackelberg-Nash games with decision-dependent uncertainty."""
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING, format="%(message)s")


@cli.command()
@click.argument("scenario")
@click.option("--lambda", "lam", type=float, default=None, help="Weight on leader 1 (two leaders).")
@click.option("--weights", default=None, help="Comma separated virtual-player weights.")
@click.option("--diu", is_flag=True, help="Ignore decision dependence (static interval).")
@click.option("--init", default=None, help="Initial profile, e.g. '0,0;1,1'.")
@click.option("--multistart", is_flag=True, help="Also solve from every box-corner profile.")
@with_options(common_solver)
def solve(scenario, lam, weights, diu, init, multistart, mode, tiebreak, grid_x, grid_w, tol,
          max_iter, conv_tol, out):
    """Solve for an equilibrium and certify it."""
    spec, doc = read_scenario(scenario)
    spec = _spec_for_regime(spec, diu)
    w = _weights(spec, lam, weights)
    cfg = _config(spec, mode, tiebreak, grid_x, grid_w, tol, max_iter, conv_tol,
                  _profile_option(init, spec))
    rmap = _reaction_map(spec)
    regime = "diu" if not spec.ddu_enabled else "ddu"
    run = RunDir(_out_root(out), "solve", doc,
                 {"weights": w.tolist(), "regime": regime, **vars(cfg)})
    header = ["iter", *_x_header(spec), "w", "displacement"]
    init_prof = None if cfg.init is None else LeaderProfile.from_flat(spec, cfg.init)
    try:
        cand, trace = jacobi_solve(spec, rmap, w, init_prof, cfg.mode, cfg.tiebreak,
                                   cfg.max_iter, cfg.conv_tol)
    except (SolverError, EmptyUncertaintySetError) as err:
        run.write_csv("trace.csv", header, _trace_rows(getattr(err, "trace", [])))
        click.echo(f"solver failed: {type(err).__name__}: {err}", err=True)
        return run.finish(EXIT_FAIL)
    run.write_csv("trace.csv", header, _trace_rows(trace))
    cert = verify_equilibrium(spec, rmap, cand, cfg.grid_n_x, cfg.grid_n_w, cfg.tol)
    run.write_json("certificate.json", _certificate_doc(cert, regime))
    _echo_certificate(cert)

    if multistart:
        rows = []
        for start in corner_starts(spec):
            try:
                c, _ = jacobi_solve(spec, rmap, w, start, cfg.mode, cfg.tiebreak,
                                    cfg.max_iter, cfg.conv_tol)
                v = verify_equilibrium(spec, rmap, c, cfg.grid_n_x, cfg.grid_n_w, cfg.tol)
                rows.append([*map(_cell, start.flat().tolist()), *map(_cell, c.x.flat().tolist()),
                             _cell(c.w), v.verdict, ""])
            except (SolverError, EmptyUncertaintySetError) as err:
                rows.append([*map(_cell, start.flat().tolist()), *[""] * (len(_x_header(spec)) + 2),
                             f"{type(err).__name__}: {err}"])
        run.write_csv("multistart.csv",
                      [*(f"init_{h}" for h in _x_header(spec)), *_x_header(spec), "w", "verdict", "error"],
                      rows)
        distinct = {tuple(r[len(_x_header(spec)):-1]) for r in rows if not r[-1]}
        click.echo(f"multistart: {len(rows)} starts, {len(distinct)} distinct outcomes")
    return run.finish(EXIT_OK if cert.verdict in ("weak", "strong") else EXIT_FAIL)


@cli.command()
@click.argument("scenario")
@click.argument("certificate", type=click.Path())
@click.option("--diu", is_flag=True, default=None, help="Verify against the static interval.")
@click.option("--grid-x", type=int, default=None)
@click.option("--grid-w", type=int, default=None)
@click.option("--tol", type=float, default=None)
@click.option("--out", type=click.Path(file_okay=False), default=None)
def verify(scenario, certificate, diu, grid_x, grid_w, tol, out):
    """Re-certify a candidate equilibrium read from CERTIFICATE (JSON)."""
    spec, doc = read_scenario(scenario)
    try:
        cdoc = json.loads(Path(certificate).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise InputError(f"certificate file not found: {certificate}") from None
    except json.JSONDecodeError as err:
        raise InputError(f"invalid certificate JSON: {err}") from None
    regime = cdoc.get("regime", "ddu")
    if diu:
        regime = "diu"
    spec = _spec_for_regime(spec, regime == "diu")
    cfg = cdoc.get("config", {})
    grid_x = grid_x or int(cfg.get("grid_n_x", spec.solver.get("grid_x", 101)))
    grid_w = grid_w or int(cfg.get("grid_n_w", spec.solver.get("grid_w", 4001)))
    tol = tol if tol is not None else float(cfg.get("tol", spec.solver.get("tol", 1e-6)))
    rmap = _reaction_map(spec)
    try:
        cand = EquilibriumCandidate.from_dict(spec, cdoc.get("candidate", cdoc), rmap)
    except (KeyError, ValueError, TypeError) as err:
        raise InputError(f"invalid candidate in {certificate}: {err}") from None
    run = RunDir(_out_root(out), "verify", doc,
                 {"regime": regime, "grid_n_x": grid_x, "grid_n_w": grid_w, "tol": tol,
                  "certificate": cdoc})
    cert = verify_equilibrium(spec, rmap, cand, grid_x, grid_w, tol)
    run.write_json("certificate.json", _certificate_doc(cert, regime))
    _echo_certificate(cert)
    return run.finish(EXIT_OK if cert.verdict in ("weak", "strong") else EXIT_FAIL)


def _lambda_grid(lam_from: float, lam_to: float, step: float) -> list[float]:
    if step <= 0:
        raise click.BadParameter("step must be positive", param_hint="--step")
    if lam_to < lam_from:
        raise click.BadParameter("--to must not be below --from", param_hint="--to")
    count = int(np.floor((lam_to - lam_from) / step + 1e-9)) + 1
    return [round(lam_from + k * step, 12) for k in range(count)]


@cli.command()
@click.argument("scenario")
@click.option("--from", "lam_from", type=float, default=0.0, show_default=True)
@click.option("--to", "lam_to", type=float, default=1.0, show_default=True)
@click.option("--step", type=float, default=0.01, show_default=True)
@click.option("--both/--single", default=True, show_default=True,
              help="Sweep both the decision-dependent and the static regime.")
@click.option("--jobs", type=int, default=1, show_default=True)
@click.option("--plot", is_flag=True, help="Also write SVG figures.")
@with_options(common_solver)
def sweep(scenario, lam_from, lam_to, step, both, jobs, plot, mode, tiebreak, grid_x, grid_w, tol,
          max_iter, conv_tol, out):
    """Solve and certify over a grid of lambda values."""
    lambdas = _lambda_grid(lam_from, lam_to, step)
    spec, doc = read_scenario(scenario)
    if spec.n != 2:
        raise InputError("sweep needs exactly two leaders")
    _reaction_map(spec)
    cfg = _config(spec, mode, tiebreak, grid_x, grid_w, tol, max_iter, conv_tol)
    run = RunDir(_out_root(out), "sweep", doc,
                 {"lambdas": lambdas, "both": both, **vars(cfg)})
    rows = lambda_sweep(spec, lambdas, both, cfg, jobs=jobs)
    dominance = ddu_dominance(rows) if both else {}
    header = ["lambda", "regime", *_x_header(spec), "w",
              *(f"y{j + 1}" for j in range(spec.m)), *(f"f{i + 1}" for i in range(spec.n)),
              "weighted", "verdict"]
    if both:
        header.append("ddu_ge_diu")
    header.append("error")
    out_rows = []
    for r in rows:
        if r.error:
            cells = [_cell(r.lam), r.regime, *[""] * (len(header) - 3)]
        else:
            cells = [_cell(r.lam), r.regime, *map(_cell, r.x), _cell(r.w), *map(_cell, r.y),
                     *map(_cell, r.f), _cell(r.weighted), r.verdict]
            if both:
                cells.append(_cell(dominance[r.lam]) if r.lam in dominance else "")
        cells.append(r.error)
        out_rows.append(cells)
    run.write_csv("sweep.csv", header, out_rows)
    if plot:
        from .plots import sweep_figures

        for name, svg in sweep_figures(rows).items():
            run.write_text(name, svg)
    failures = [r for r in rows if r.error or r.verdict not in ("weak", "strong")]
    click.echo(f"{len(rows)} rows, {len(failures)} uncertified")
    if both:
        click.echo(f"ddu_ge_diu for all lambda: {all(dominance.values())}")
    return run.finish(EXIT_FAIL if failures else EXIT_OK)


@cli.command()
@click.argument("scenario")
@click.option("--lambda", "lam", type=float, default=None)
@click.option("--at", "regime", type=click.Choice(["ddu", "diu", "both"]), default="ddu",
              show_default=True)
@click.option("--grid-n", type=int, default=401, show_default=True)
@click.option("--plot", is_flag=True, help="Also write an SVG figure.")
@with_options(common_solver)
def pareto(scenario, lam, regime, grid_n, plot, mode, tiebreak, grid_x, grid_w, tol, max_iter,
           conv_tol, out):
    """Pareto front of the virtual player at the equilibrium profile."""
    if grid_n < 2:
        raise click.BadParameter("must be >= 2", param_hint="--grid-n")
    spec, doc = read_scenario(scenario)
    w = _weights(spec, lam, None)
    cfg = _config(spec, mode, tiebreak, grid_x, grid_w, tol, max_iter, conv_tol)
    run = RunDir(_out_root(out), "pareto", doc,
                 {"weights": w.tolist(), "regime": regime, "grid_n": grid_n, **vars(cfg)})
    regimes = ["ddu", "diu"] if regime == "both" else [regime]
    fronts = {}
    for name in regimes:
        s = _spec_for_regime(spec, name == "diu")
        rmap = _reaction_map(s)
        try:
            cand, _ = jacobi_solve(s, rmap, w, None, cfg.mode, cfg.tiebreak, cfg.max_iter,
                                   cfg.conv_tol)
        except (SolverError, EmptyUncertaintySetError) as err:
            click.echo(f"solver failed ({name}): {err}", err=True)
            return run.finish(EXIT_FAIL)
        wc = scalarized_worst_case(s, rmap, cand.x, w)
        points = pareto_front(s, rmap, cand.x, grid_n)
        grid = np.array([p.w for p in points])
        marked = int(np.argmin(np.abs(grid - wc.w_star)))
        header = ["w", *(f"f{i + 1}" for i in range(s.n)), "nondominated", "scalarized"]
        rows = [[_cell(p.w), *map(_cell, p.f.tolist()), _cell(p.nondominated), _cell(k == marked)]
                for k, p in enumerate(points)]
        fname = "pareto.csv" if len(regimes) == 1 else f"pareto_{name}.csv"
        run.write_csv(fname, header, rows)
        fronts[name] = (points, wc)
        click.echo(f"{name}: x*={_fmt([list(v) for v in cand.x.x])} W(x*)=[{_fmt(wc.lo)}, {_fmt(wc.hi)}] "
                   f"w*={_fmt(wc.w_star)} f*={_fmt(wc.payoffs)} "
                   f"endpoints {_fmt(points[0].f)} / {_fmt(points[-1].f)}")
    if plot:
        from .plots import pareto_figure

        run.write_text("pareto.svg", pareto_figure(fronts))
    return run.finish(EXIT_OK)


@cli.command()
@click.argument("scenario")
@click.option("--samples", type=int, default=10_000, show_default=True)
@click.option("--seed", type=int, default=None)
@click.option("--tol", type=float, default=1e-9, show_default=True)
@click.option("--out", type=click.Path(file_okay=False), default=None)
def audit(scenario, samples, seed, tol, out):
    """Sample-check the existence assumptions and state the existence verdict."""
    spec, doc = read_scenario(scenario)
    seed = int(spec.solver.get("seed", 0)) if seed is None else seed
    rmap = _reaction_map(spec)
    run = RunDir(_out_root(out), "audit", doc, {"samples": samples, "seed": seed, "tol": tol})
    report = audit_assumptions(spec, rmap, samples, tol, seed)
    statement = existence_statement(report)
    out_doc = report.to_dict()
    out_doc["statement"] = statement
    run.write_json("audit.json", out_doc)
    ok = lambda c: "pass" if c.passed else "FAIL"  # noqa: E731
    click.echo(f"boxes: {ok(report.a1a_box)} (structural)")
    click.echo(f"reaction-map graph convex: {ok(report.a1b_graph_convex)} "
               f"(worst {report.a1b_graph_convex.worst_violation:.3g})")
    click.echo(f"uncertainty interval nonempty: {ok(report.a1c_w_interval)}")
    for i, c in enumerate(report.a2a_quasiconcave):
        click.echo(f"leader {i + 1} quasi-concave in (x_i, y): {ok(c)}")
    click.echo("convex in (y, w): S = {" + ", ".join(str(i + 1) for i in sorted(report.a2b_concave_set)) + "}")
    click.echo("quasi-convex in (y, w): {" + ", ".join(str(i + 1) for i in sorted(report.a3_quasiconcave_set)) + "}")
    click.echo(f"verdict: {report.verdict}")
    click.echo(statement)
    return run.finish(EXIT_OK if report.verdict != "inconclusive" else EXIT_FAIL)


@cli.group()
def followers():
    """Follower-level checks."""


@followers.command("check")
@click.argument("scenario")
@click.option("--samples", type=int, default=1000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--tol", type=float, default=1e-9, show_default=True)
def followers_check(scenario, samples, seed, tol):
    """Verify the reaction map against per-follower best responses at random (x, w)."""
    spec, _ = read_scenario(scenario)
    rmap = _reaction_map(spec)
    rng = np.random.default_rng(seed)
    worst = 0.0
    checked = 0
    for _ in range(samples):
        x = LeaderProfile(tuple(l.box_lo + rng.random(l.dim) * (l.box_hi - l.box_lo)
                                for l in spec.leaders))
        try:
            lo, hi = uncertainty_interval(spec, x)
        except EmptyUncertaintySetError:
            continue
        w = lo + rng.random() * (hi - lo)
        margins, _ = verify_follower_gne(spec, x, w, follower_reaction(rmap, x, w), tol)
        worst = max(worst, float(margins.max()))
        checked += 1
    click.echo(f"A =\n{rmap.A}\nb = {_fmt(rmap.b)}  c0 = {_fmt(rmap.c0)}  theta = {_fmt(rmap.theta)}")
    click.echo(f"checked {checked} points, worst margin {worst:.3g}")
    return EXIT_OK if worst <= tol else EXIT_FAIL


@cli.command()
@click.argument("scenario")
@click.option("--leader", type=int, required=True, help="1-based leader index.")
@click.option("--x", "xtext", required=True, help="Full profile, e.g. '0,0;1,1'.")
@click.option("--w", type=float, default=None, help="Fixed w (myopic mode).")
@click.option("--lambda", "lam", type=float, default=None)
@click.option("--weights", default=None)
@click.option("--diu", is_flag=True)
@click.option("--mode", type=click.Choice(MODES), default="anticipating", show_default=True)
@click.option("--tiebreak", type=click.Choice(TIEBREAKS), default="lex-low", show_default=True)
def br(scenario, leader, xtext, w, lam, weights, diu, mode, tiebreak):
    """Single leader best-response query."""
    spec, _ = read_scenario(scenario)
    spec = _spec_for_regime(spec, diu)
    if not 1 <= leader <= spec.n:
        raise InputError(f"--leader must be between 1 and {spec.n}")
    x = _profile_option(xtext, spec)
    rmap = _reaction_map(spec)
    if mode == "myopic" and w is None:
        raise InputError("--w is required in myopic mode")
    try:
        res = leader_best_response(spec, rmap, leader - 1, x, w=w, mode=mode,
                                   weights=_weights(spec, lam, weights), tiebreak=tiebreak)
    except (ValueError, EmptyUncertaintySetError) as err:
        click.echo(f"best response failed: {err}", err=True)
        return EXIT_FAIL
    click.echo(f"mode: {res.mode}  tiebreak: {res.tiebreak}")
    click.echo(f"x_{leader} = {_fmt(res.x_i)}")
    click.echo(f"w = {_fmt(res.w_used)}  y = {_fmt(res.y_anticipated)}")
    click.echo(f"value = {_fmt(res.value)}")
    ties = ", ".join(str(k + 1) for k in sorted(res.tie_coordinates)) or "none"
    click.echo(f"flat coordinates: {ties}")
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        rv = cli.main(args=list(argv) if argv is not None else None,
                      prog_name="nsn-ddu", standalone_mode=False)
    except click.exceptions.Exit as e:
        return e.exit_code
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        return EXIT_INPUT
    except click.ClickException as e:
        e.show()
        return EXIT_INPUT
    return rv if isinstance(rv, int) else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
