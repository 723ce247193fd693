"""Uniform CSV/JSON result emission.

Every CSV starts with a ``# schema:`` comment line and a header row, and
carries the parameter fingerprint and convention flag so that downstream
figures are traceable to the exact inputs.  JSON reports are emitted with
sorted keys and indent 2; apart from the wall-time field they are
byte-deterministic for identical configurations.
"""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

import jsonschema

SCHEMA_VERSION = "1"


def format_value(v) -> str:
    import numpy as np

    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (np.floating, np.integer)):
        v = v.item()
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_csv(path, name: str, columns, rows, fingerprint: str,
              convention: str | None = None) -> Path:
    path = Path(path)
    lines = [f"# schema: calcilab.{name}.v{SCHEMA_VERSION}"]
    tag = f"# params_fingerprint: {fingerprint}"
    if convention is not None:
        tag += f"  convention: {convention}"
    lines.append(tag)
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(format_value(v) for v in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def read_csv_schema(path) -> str:
    """Return the schema tag of a CSV written by write_csv."""
    with open(path, encoding="utf-8") as fh:
        first = fh.readline().strip()
    if not first.startswith("# schema: "):
        raise ValueError(f"{path}: missing '# schema:' comment line")
    return first.removeprefix("# schema: ")


def _jsonable(obj):
    import dataclasses

    import numpy as np

    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return _jsonable(dataclasses.asdict(obj))
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    if isinstance(obj, float) and obj != obj:  # NaN -> null for valid JSON
        return None
    return obj


def write_json(path, payload: dict) -> Path:
    path = Path(path)
    path.write_text(json.dumps(_jsonable(payload), sort_keys=True, indent=2) + "\n",
                    encoding="utf-8")
    return path


def load_report_schema() -> dict:
    text = resources.files("calcilab.data").joinpath("report.schema.json").read_text(
        encoding="utf-8")
    return json.loads(text)


def validate_report(report: dict) -> None:
    jsonschema.validate(instance=_jsonable(report), schema=load_report_schema())
