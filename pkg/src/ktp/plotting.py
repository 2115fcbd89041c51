"""Render density and velocity profiles from the run CSVs.

This file is also copied verbatim into every output directory as
``plot_figures.py`` and runs there on its own (needs only matplotlib):

    python3 plot_figures.py [output_dir]
"""
from __future__ import annotations

import csv
import glob
import os
import sys


def _final_profile(path):
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    t_end = max(float(r["t"]) for r in rows)
    last = [r for r in rows if float(r["t"]) == t_end]
    col = lambda k: [float(r[k]) for r in last]  # noqa: E731
    return t_end, col("x"), col("n1"), col("n2"), col("u")


def _label(path):
    stem = os.path.splitext(os.path.basename(path))[0]
    if stem == "macro_euler":
        return "Euler"
    if stem.startswith("macro_kinetic_eps"):
        return "BGK, eps=" + stem[len("macro_kinetic_eps"):]
    return "BGK"


def render(out_dir: str = ".") -> list[str]:
    """Write ``densities.png`` and ``velocity.png``; returns the written paths."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    files = sorted(glob.glob(os.path.join(out_dir, "macro_kinetic*.csv")))
    ref = os.path.join(out_dir, "macro_euler.csv")
    if os.path.exists(ref):
        files.append(ref)
    if not files:
        return []
    fig_n, ax_n = plt.subplots(figsize=(6, 4))
    fig_u, ax_u = plt.subplots(figsize=(6, 4))
    t_end = None
    for path in files:
        t_end, x, n1, n2, u = _final_profile(path)
        lab = _label(path)
        style = {"color": "k", "lw": 1.0} if lab == "Euler" else {"lw": 1.2, "ls": "--"}
        ax_n.plot(x, n1, label=f"n1 ({lab})", **style)
        ax_n.plot(x, n2, label=f"n2 ({lab})", **style)
        ax_u.plot(x, u, label=lab, **style)
    ax_n.set_xlabel("x")
    ax_n.set_ylabel("number density")
    ax_u.set_xlabel("x")
    ax_u.set_ylabel("bulk velocity")
    for ax in (ax_n, ax_u):
        ax.set_title(f"t = {t_end:g}")
        ax.legend(fontsize=7)
    written = []
    for fig, name in ((fig_n, "densities.png"), (fig_u, "velocity.png")):
        path = os.path.join(out_dir, name)
        fig.tight_layout()
        fig.savefig(path, dpi=120, metadata={"Software": None})
        plt.close(fig)
        written.append(path)
    return written


if __name__ == "__main__":
    render(sys.argv[1] if len(sys.argv) > 1 else os.path.dirname(os.path.abspath(__file__)))
