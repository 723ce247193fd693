"""Oscillation period against the dimensionless gating time (log-log), with
the Andronov-Hopf onset marker echoed from the run report.

Usage: python fig9.py --in <dir with taumax_scan.csv, report.json> --out fig9.png
"""

import argparse
from pathlib import Path

import matplotlib.pyplot as plt
import numpy as np

import figlib


def render(in_dir, out_path):
    in_dir = Path(in_dir)
    src = in_dir / "taumax_scan.csv"
    cols = figlib.read_csv(src, "calcilab.taumax_scan.v1",
                           ("tau_tilde", "period", "c_max", "c_min"))
    tau = np.asarray(cols["tau_tilde"])
    T = np.asarray(cols["period"])

    rep_path = in_dir / "report.json"
    rep = figlib.read_report(rep_path)
    ah = rep["results"]["ah"]["tau_tilde_ah"]

    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9.0, 3.6))
    ax1.loglog(tau, T, "o-", ms=4, lw=1.0)
    ax1.axvline(ah, color="g", lw=1.0, ls=":")
    ax1.plot([ah], [T.min()], "go", ms=7)
    ax1.annotate(f"AH at {ah:.4g}", (ah, T.min()),
                 textcoords="offset points", xytext=(8, 4), color="g")
    ax1.set_xlabel("gating time (dimensionless)")
    ax1.set_ylabel("period (fast time)")
    ax1.set_title("period growth: sqrt near onset, linear beyond")

    ax2.semilogx(tau, cols["c_max"], "^-", ms=4, lw=0.9, label="c max")
    ax2.semilogx(tau, cols["c_min"], "v-", ms=4, lw=0.9, label="c min")
    ax2.axvline(ah, color="g", lw=1.0, ls=":")
    ax2.set_xlabel("gating time (dimensionless)")
    ax2.set_ylabel("c")
    ax2.legend(frameon=False, fontsize=8)
    ax2.set_title("oscillation envelope")
    fig.tight_layout()
    return figlib.finish(fig, out_path, [src, rep_path],
                         {"tau_tilde_ah": ah})


if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--in", dest="in_dir", required=True)
    ap.add_argument("--out", required=True)
    ns = ap.parse_args()
    print(render(ns.in_dir, ns.out))
