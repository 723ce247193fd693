"""Bifurcation diagram in c_t (single-valued branch regime): equilibrium
branch with stability, detected gating-balance onset, and oscillation
amplitudes.

Usage: python fig7.py --in <dir with branch.csv, onset.csv, report.json>
       --out fig7.png
"""

import argparse
from pathlib import Path

import matplotlib.pyplot as plt
import numpy as np

import figlib


def render(in_dir, out_path, title="onset of oscillations (single branch)"):
    in_dir = Path(in_dir)
    bsrc = in_dir / "branch.csv"
    cols = figlib.read_csv(bsrc, "calcilab.branch.v1",
                           ("param", "h", "c", "trace", "det", "stability"))
    lam = np.asarray(cols["param"])
    c = np.asarray(cols["c"])
    stab = np.asarray(cols["stability"], dtype=object)
    inputs = [bsrc]
    annotations = {}

    fig, ax = plt.subplots(figsize=(5.6, 4.0))
    stable = stab == "stable"
    ax.plot(lam[stable], c[stable], "b-", lw=1.5, label="stable equilibrium")
    ax.plot(lam[~stable], c[~stable], "r--", lw=1.2, label="unstable/saddle")

    osrc = in_dir / "onset.csv"
    if osrc.exists():
        ocols = figlib.read_csv(osrc, "calcilab.onset.v1",
                                ("c_t", "c_min", "c_max", "amplitude", "oscillating"))
        octs = np.asarray(ocols["c_t"])
        osc = np.asarray(ocols["oscillating"], dtype=bool)
        ax.plot(octs[osc], np.asarray(ocols["c_max"])[osc], "g^", ms=5,
                label="cycle max")
        ax.plot(octs[osc], np.asarray(ocols["c_min"])[osc], "gv", ms=5,
                label="cycle min")
        inputs.append(osrc)

    rep_path = in_dir / "report.json"
    if rep_path.exists():
        rep = figlib.read_report(rep_path)
        hp = rep.get("results", {}).get("hopf_points", [])
        for point in hp:
            ax.plot([point["param_value"]], [point["state"][1]], "ko", ms=6)
            ax.annotate("AH", (point["param_value"], point["state"][1]),
                        textcoords="offset points", xytext=(5, 6))
        if hp:
            annotations["hopf_ct"] = hp[0]["param_value"]
        inputs.append(rep_path)

    ax.set_xlabel("c_t")
    ax.set_ylabel("c")
    ax.set_title(title)
    ax.legend(frameon=False, fontsize=8)
    fig.tight_layout()
    return figlib.finish(fig, out_path, inputs, annotations)


if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--in", dest="in_dir", required=True)
    ap.add_argument("--out", required=True)
    ns = ap.parse_args()
    print(render(ns.in_dir, ns.out))
