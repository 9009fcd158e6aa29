"""Figure rendering for bound tables and simulation results.

The CSV outputs are the contract; these helpers draw the standard companion
plots (bound curves over block length, measured WER against the union bound)
next to them.  Rendering is headless (Agg).
"""

from __future__ import annotations

import csv
import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)


def save_bound_curves(reports, path):
    """Plot exact and asymptotic bound values over block length, one curve
    pair per (q, channel parameter)."""
    if not reports:
        raise ValueError("no bound reports to plot")
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    by_key: dict = {}
    for rep in reports:
        by_key.setdefault((rep.channel, rep.q, rep.param), []).append(rep)
    for (channel, q, param), reps in sorted(by_key.items()):
        reps = sorted(reps, key=lambda r: r.n)
        ns = [r.n for r in reps]
        ax.plot(ns, [r.wep_exact for r in reps], "o-",
                label=f"{channel} q={q} param={param:g} (union)")
        ax.plot(ns, [r.wep_asymptotic for r in reps], "s--",
                label=f"{channel} q={q} param={param:g} (asymptotic)")
    ax.axhline(1.0, color="gray", lw=0.8, ls=":")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("block length n")
    ax.set_ylabel("word error probability bound")
    ax.legend(fontsize=7)
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_wer_plot(results_csv, path):
    """Scatter measured WER (with Wilson CI bars) against the channel
    parameter, overlaying the exact union bound where finite."""
    rows = []
    with open(results_csv) as fh:
        for row in csv.DictReader(fh):
            rows.append(row)
    if not rows:
        raise ValueError(f"no rows in {results_csv}")
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    by_code: dict = {}
    for row in rows:
        key = (row["channel"], row["q"], row["k"], row["n"])
        by_code.setdefault(key, []).append(row)
    floor = 1e-12
    for (channel, q, k, n), group in sorted(by_code.items()):
        group = sorted(group, key=lambda r: float(r["param"]))
        params = [float(r["param"]) for r in group]
        wer = [max(float(r["wer"]), floor) for r in group]
        lo = [max(float(r["wer"]) - float(r["ci_lo"]), 0.0) for r in group]
        hi = [max(float(r["ci_hi"]) - float(r["wer"]), 0.0) for r in group]
        ax.errorbar(params, wer, yerr=[lo, hi], fmt="o-", capsize=3,
                    label=f"{channel} q={q} n={n} (measured)")
        bound_pts = [(p, float(r["bound_exact"])) for p, r in zip(params, group)
                     if r["bound_exact"] not in ("nan", "")
                     and not math.isnan(float(r["bound_exact"]))]
        if bound_pts:
            ax.plot([p for p, _ in bound_pts], [b for _, b in bound_pts],
                    "k--", alpha=0.6,
                    label=f"{channel} q={q} n={n} (union bound)")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("channel parameter (p or sigma2)")
    ax.set_ylabel("word error rate")
    ax.legend(fontsize=7)
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
