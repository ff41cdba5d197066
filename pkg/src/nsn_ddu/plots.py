"""SVG figures from sweep and Pareto results. Never parsed back; CSV is canonical."""

from __future__ import annotations

import io

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

matplotlib.rcParams["svg.hashsalt"] = "nsn-ddu"

_STYLE = {"ddu": "-", "diu": "--"}


def _svg(fig) -> str:
    buf = io.StringIO()
    fig.savefig(buf, format="svg", metadata={"Date": None})
    plt.close(fig)
    return buf.getvalue()


def sweep_figures(rows) -> dict[str, str]:
    """Leader payoffs and weighted payoff against lambda, one line style per regime."""
    ok = [r for r in rows if not r.error]
    payoffs, ax = plt.subplots(figsize=(6, 4))
    for regime in ("ddu", "diu"):
        rs = [r for r in ok if r.regime == regime]
        if not rs:
            continue
        lam = [r.lam for r in rs]
        for i in range(len(rs[0].f)):
            ax.plot(lam, [r.f[i] for r in rs], _STYLE[regime], label=f"f{i + 1} {regime.upper()}")
    ax.set_xlabel("lambda")
    ax.set_ylabel("leader payoff")
    ax.legend()

    weighted, ax2 = plt.subplots(figsize=(6, 4))
    for regime in ("ddu", "diu"):
        rs = [r for r in ok if r.regime == regime]
        if rs:
            ax2.plot([r.lam for r in rs], [r.weighted for r in rs], _STYLE[regime],
                     label=regime.upper())
    ax2.set_xlabel("lambda")
    ax2.set_ylabel("weighted payoff")
    ax2.legend()
    return {"payoffs.svg": _svg(payoffs), "weighted.svg": _svg(weighted)}


def pareto_figure(fronts) -> str:
    """``fronts`` maps regime name to ``(points, worst_case_result)``."""
    fig, ax = plt.subplots(figsize=(5, 5))
    for regime, (points, wc) in fronts.items():
        ax.plot([p.f[0] for p in points], [p.f[1] for p in points], _STYLE.get(regime, "-"),
                label=regime.upper())
        ax.plot([wc.payoffs[0]], [wc.payoffs[1]], "*", markersize=14)
    ax.set_xlabel("f1")
    ax.set_ylabel("f2")
    ax.legend()
    return _svg(fig)
