"""Bifurcation diagram in c_t in the S-shaped (three-equilibria) regime.

Same inputs and layout as fig7 but rendered for the folded branch; the
script is a thin wrapper so the two regimes keep separate figure ids.

Usage: python fig8.py --in <dir with branch.csv, onset.csv, report.json>
       --out fig8.png
"""

import argparse

import fig7


def render(in_dir, out_path):
    return fig7.render(in_dir, out_path,
                       title="onset of oscillations (S-shaped branch)")


if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--in", dest="in_dir", required=True)
    ap.add_argument("--out", required=True)
    ns = ap.parse_args()
    print(render(ns.in_dir, ns.out))
