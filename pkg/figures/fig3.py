"""Relaxation-oscillation time series with a zoomed spike (two panels).

Usage: python fig3.py --in <dir with timeseries.csv> --out fig3.png
"""

import argparse
from pathlib import Path

import matplotlib.pyplot as plt
import numpy as np

import figlib


def render(in_dir, out_path):
    src = Path(in_dir) / "timeseries.csv"
    cols = figlib.read_csv(src, "calcilab.timeseries.v1", ("t", "h", "c"))
    t = np.asarray(cols["t"])
    h = np.asarray(cols["h"])
    c = np.asarray(cols["c"])

    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9.2, 3.4))
    ax1.plot(t, c, lw=0.9, color="tab:blue", label="c")
    ax1.plot(t, h, lw=0.9, color="tab:orange", label="h")
    ax1.set_xlabel("t (fast time)")
    ax1.set_ylabel("c, h")
    ax1.legend(frameon=False)
    ax1.set_title("full series")

    # zoom on the sharpest spike
    i_spike = int(np.argmax(c))
    halfwin = max(10, int(0.01 * len(t)))
    lo, hi = max(0, i_spike - halfwin), min(len(t), i_spike + halfwin)
    ax2.plot(t[lo:hi], c[lo:hi], lw=1.1, color="tab:blue")
    ax2.plot(t[lo:hi], h[lo:hi], lw=1.1, color="tab:orange")
    ax2.set_xlabel("t (fast time)")
    ax2.set_title("one spike, enlarged")
    fig.tight_layout()
    return figlib.finish(fig, out_path, [src])


if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--in", dest="in_dir", required=True)
    ap.add_argument("--out", required=True)
    ns = ap.parse_args()
    print(render(ns.in_dir, ns.out))
