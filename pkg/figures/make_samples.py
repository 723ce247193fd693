"""Regenerate the shipped sample CSV/JSON inputs for the figure scripts.

Runs the calcilab CLI into figures/samples/<name>/; slowish (a few minutes)
because the onset and gating-time scans simulate the full system.
"""

import dataclasses
import subprocess
import sys
from pathlib import Path

from calcilab.params import default_scaled, save_params

HERE = Path(__file__).parent
SAMPLES = HERE / "samples"


def cli(*args):
    cmd = [sys.executable, "-m", "calcilab.cli", *args]
    print("+", " ".join(cmd))
    subprocess.run(cmd, check=True)


def main():
    SAMPLES.mkdir(exist_ok=True)
    p015 = SAMPLES / "params_p015.txt"
    save_params(dataclasses.replace(default_scaled(), p=0.015), p015)

    cli("--out-dir", str(SAMPLES / "sim"), "simulate", "--t-span", "0,40000")
    cli("--out-dir", str(SAMPLES / "manifold"), "manifold",
        "--c-min", "0.25", "--c-max", "2.2")
    cli("--convention", "derived", "--out-dir", str(SAMPLES / "cusp"),
        "cusp", "--grid", "45")
    cli("--params", str(p015), "--out-dir", str(SAMPLES / "fig7"),
        "hopf", "--axis", "c_t", "--from", "0.85", "--to", "1.05")
    cli("--params", str(p015), "--out-dir", str(SAMPLES / "fig7-onset"),
        "onset", "--p", "0.015", "--ct-min", "0.9", "--ct-max", "1.02", "--n", "7")
    cli("--out-dir", str(SAMPLES / "fig8"),
        "hopf", "--axis", "c_t", "--from", "0.45", "--to", "0.75")
    cli("--out-dir", str(SAMPLES / "fig8-onset"),
        "onset", "--p", "0.025", "--ct-min", "0.60", "--ct-max", "0.72", "--n", "7")
    cli("--out-dir", str(SAMPLES / "tau"), "taumax-scan",
        "--values", "90,115,160,250,1000,6800,13600,27200,54400")

    # fig7/fig8 read branch + onset + report from one directory: merge onsets in
    for pair in (("fig7", "fig7-onset"), ("fig8", "fig8-onset")):
        dst = SAMPLES / pair[0] / "onset.csv"
        src = SAMPLES / pair[1] / "onset.csv"
        dst.write_bytes(src.read_bytes())
    print("samples regenerated under", SAMPLES)


if __name__ == "__main__":
    main()
