"""Equilibrium-count map over (p, c_t) with the cusp vertex annotated.

The vertex marker is an exact echo of the value recorded in the run report;
nothing is recomputed here.

Usage: python fig6.py --in <dir with cusp_grid.csv, cusp_boundary.csv,
report.json> --out fig6.png
"""

import argparse
from pathlib import Path

import matplotlib.pyplot as plt
import numpy as np

import figlib


def render(in_dir, out_path):
    in_dir = Path(in_dir)
    src = in_dir / "cusp_grid.csv"
    cols = figlib.read_csv(src, "calcilab.cusp_grid.v1", ("p", "c_t", "count"))
    p = np.asarray(cols["p"])
    ct = np.asarray(cols["c_t"])
    count = np.asarray(cols["count"])
    ps = np.unique(p)
    cts = np.unique(ct)
    grid = count.reshape(len(cts), len(ps))

    rep_path = in_dir / "report.json"
    rep = figlib.read_report(rep_path)
    vx, vy = rep["results"]["vertex_p"], rep["results"]["vertex_ct"]

    fig, ax = plt.subplots(figsize=(5.4, 4.2))
    pc = ax.pcolormesh(ps, cts, grid, cmap="Blues", vmin=0.5, vmax=3.5,
                       shading="nearest")
    fig.colorbar(pc, ax=ax, ticks=[1, 2, 3], label="number of equilibria")
    bsrc = in_dir / "cusp_boundary.csv"
    inputs = [src, rep_path]
    if bsrc.exists():
        bcols = figlib.read_csv(bsrc, "calcilab.cusp_boundary.v1", ("p", "c_t"))
        ax.plot(bcols["p"], bcols["c_t"], "k.", ms=1.5)
        inputs.append(bsrc)
    ax.plot([vx], [vy], "r*", ms=12)
    ax.annotate(f"cusp ({vx:.3g}, {vy:.3g})", (vx, vy),
                textcoords="offset points", xytext=(8, 6), color="r")
    ax.set_xlabel("p")
    ax.set_ylabel("c_t")
    ax.set_title("equilibrium counts of the reduced flow")
    fig.tight_layout()
    return figlib.finish(fig, out_path, inputs,
                         {"vertex_p": vx, "vertex_ct": vy})


if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--in", dest="in_dir", required=True)
    ap.add_argument("--out", required=True)
    ns = ap.parse_args()
    print(render(ns.in_dir, ns.out))
