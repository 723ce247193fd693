"""Shared plumbing for the figure scripts.

The scripts never recompute dynamics: they render the CSV/JSON outputs of the
calcilab CLI, check the schema tag of every input, and record a sidecar file
with input fingerprints plus any annotation values echoed from JSON reports.
"""

import hashlib
import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

DPI = 130


class SchemaError(RuntimeError):
    pass


class EmptyDataError(RuntimeError):
    pass


def read_csv(path, expected_schema, columns):
    """Parse a calcilab CSV; abort on schema or column mismatch, or if empty."""
    path = Path(path)
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines or not lines[0].startswith("# schema: "):
        raise SchemaError(f"{path}: missing '# schema:' comment line")
    schema = lines[0].removeprefix("# schema: ")
    if schema != expected_schema:
        raise SchemaError(f"{path}: schema {schema!r}, expected {expected_schema!r}")
    body = [l for l in lines[1:] if not l.startswith("#")]
    header = body[0].split(",")
    if header != list(columns):
        offending = [c for c in header if c not in columns] + \
                    [c for c in columns if c not in header]
        raise SchemaError(f"{path}: column mismatch, offending columns {offending}")
    rows = [l.split(",") for l in body[1:] if l]
    if not rows:
        raise EmptyDataError(f"{path}: no data rows to plot")
    cols = {}
    for j, name in enumerate(header):
        raw = [r[j] for r in rows]
        try:
            cols[name] = [float(v) for v in raw]
        except ValueError:
            cols[name] = [v == "true" if v in ("true", "false") else v for v in raw]
    return cols


def read_report(path):
    return json.loads(Path(path).read_text(encoding="utf-8"))


def sha256(path):
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()[:16]


def finish(fig, out, inputs, annotations=None):
    """Save the figure and its sidecar (input fingerprints + echoed values)."""
    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, dpi=DPI, metadata={"Software": "calcilab-figures"})
    plt.close(fig)
    lines = [f"{Path(p)}  sha256:{sha256(p)}" for p in inputs]
    for key, val in (annotations or {}).items():
        lines.append(f"annotation {key} = {val!r}")
    out.with_suffix(out.suffix + ".inputs.txt").write_text(
        "\n".join(lines) + "\n", encoding="utf-8")
    return out
