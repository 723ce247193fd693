"""Rescaled critical curve with attracting/repelling branches and the fold.

Usage: python fig5.py --in <dir with manifold.csv (+ report.json)> --out fig5.png
"""

import argparse
from pathlib import Path

import matplotlib.pyplot as plt
import numpy as np

import figlib


def render(in_dir, out_path):
    src = Path(in_dir) / "manifold.csv"
    cols = figlib.read_csv(src, "calcilab.manifold.v1",
                           ("C", "zeta", "lambda", "branch"))
    C = np.asarray(cols["C"])
    z = np.asarray(cols["zeta"])
    branch = np.asarray(cols["branch"], dtype=object)
    inputs = [src]
    annotations = {}

    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9.2, 3.4))
    att = branch == "S_a"
    ax1.plot(C[att], z[att], color="tab:blue", lw=1.6, label="attracting branch")
    ax1.plot(C[~att], z[~att], color="tab:red", lw=1.6, ls="--",
             label="repelling branch")
    rep = Path(in_dir) / "report.json"
    if rep.exists():
        r = figlib.read_report(rep)
        C_F, h_F = r["results"]["C_F"], r["results"]["h_F"]
        ax1.plot([C_F], [h_F], "ko", ms=5)
        ax1.annotate("fold", (C_F, h_F), textcoords="offset points", xytext=(6, -10))
        annotations["C_F"] = C_F
        annotations["h_F"] = h_F
        inputs.append(rep)
    ax1.set_xlabel("C")
    ax1.set_ylabel("h = zeta(C)")
    ax1.set_ylim(min(0.0, z[att].min()) - 0.02, max(0.4, 1.2 * z[att].max()))
    ax1.legend(frameon=False, fontsize=8)
    ax1.set_title("critical curve (rescaled chart)")

    lam = np.asarray(cols["lambda"])
    ax2.plot(C, lam, color="k", lw=1.2)
    ax2.axhline(0.0, color="0.6", lw=0.6)
    ax2.set_xlabel("C")
    ax2.set_ylabel("transverse eigenvalue")
    ax2.set_title("normal hyperbolicity along the curve")
    fig.tight_layout()
    return figlib.finish(fig, out_path, inputs, annotations)


if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--in", dest="in_dir", required=True)
    ap.add_argument("--out", required=True)
    ns = ap.parse_args()
    print(render(ns.in_dir, ns.out))
