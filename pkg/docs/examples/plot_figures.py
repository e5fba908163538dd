"""Plot the CSV output of ``jcm theta-sweep`` and ``jcm evolve``.

    jcm theta-sweep --config configs/baseline.json --out sweep.csv
    jcm evolve --config configs/baseline.json --out evolve.csv
    python docs/examples/plot_figures.py sweep.csv evolve.csv

Needs matplotlib, which the package itself does not depend on.
"""

import json
import sys

import matplotlib.pyplot as plt
import numpy as np


def plot_sweep(path, ax):
    d = np.genfromtxt(path, delimiter=",", names=True, dtype=None, encoding="utf-8")
    x = d["value"].astype(float)
    for col, style in (("theta_plus", "-"), ("theta_minus", "--")):
        y = d[col].astype(float).copy()
        y[d["asymptote_flag"] == 1] = np.nan  # break the line across the jump
        ax.plot(x, y, style, label=col)
    ax.set_xlabel(str(d["param"][0]))
    ax.set_ylabel("rotation angle")
    ax.legend()


def plot_evolve(path, ax):
    d = np.genfromtxt(path, delimiter=",", names=True)
    meta = json.loads(open(path + ".json").read())
    t = d["t"]
    for tag in ("full", "eff", "closed"):
        if f"na_{tag}" in d.dtype.names:
            ax.plot(t, d[f"na_{tag}"], label=f"<n_a> {tag}")
            ax.plot(t, d[f"nb_{tag}"], label=f"<n_b> {tag}")
    ax.set_xlabel("t")
    # second axis in units of the slow exchange time
    top = ax.secondary_xaxis("top", functions=(lambda v: v / meta["tau_eff"], lambda v: v * meta["tau_eff"]))
    top.set_xlabel("t / tau_eff")
    ax.legend(fontsize="small")


if __name__ == "__main__":
    sweep_csv, evolve_csv = sys.argv[1:3]
    fig, (left, right) = plt.subplots(1, 2, figsize=(11, 4))
    plot_sweep(sweep_csv, left)
    plot_evolve(evolve_csv, right)
    fig.tight_layout()
    fig.savefig("figures.png", dpi=150)
