import json
import shutil
import sys
from pathlib import Path

import pytest

HERE = Path(__file__).parent.parent
sys.path.insert(0, str(HERE))

import fig3, fig5, fig6, fig7, fig8, fig9  # noqa: E402
import figlib  # noqa: E402

SAMPLES = HERE / "samples"

CASES = [
    (fig3, SAMPLES / "sim"),
    (fig5, SAMPLES / "manifold"),
    (fig6, SAMPLES / "cusp"),
    (fig7, SAMPLES / "fig7"),
    (fig8, SAMPLES / "fig8"),
    (fig9, SAMPLES / "tau"),
]


@pytest.mark.parametrize("mod,src", CASES, ids=[m.__name__ for m, _ in CASES])
def test_render_from_samples(mod, src, tmp_path):
    out = mod.render(src, tmp_path / f"{mod.__name__}.png")
    assert Path(out).exists() and Path(out).stat().st_size > 5000
    sidecar = Path(str(out) + ".inputs.txt")
    assert sidecar.exists()
    assert "sha256:" in sidecar.read_text()


def test_rendering_is_deterministic(tmp_path):
    a = fig5.render(SAMPLES / "manifold", tmp_path / "a.png")
    b = fig5.render(SAMPLES / "manifold", tmp_path / "b.png")
    assert Path(a).read_bytes() == Path(b).read_bytes()


def test_fig6_vertex_is_exact_echo(tmp_path):
    out = fig6.render(SAMPLES / "cusp", tmp_path / "f6.png")
    sidecar = Path(str(out) + ".inputs.txt").read_text()
    rep = json.loads((SAMPLES / "cusp" / "report.json").read_text())
    assert f"annotation vertex_p = {rep['results']['vertex_p']!r}" in sidecar
    assert f"annotation vertex_ct = {rep['results']['vertex_ct']!r}" in sidecar


def test_fig9_ah_marker_is_exact_echo(tmp_path):
    out = fig9.render(SAMPLES / "tau", tmp_path / "f9.png")
    sidecar = Path(str(out) + ".inputs.txt").read_text()
    rep = json.loads((SAMPLES / "tau" / "report.json").read_text())
    ah = rep["results"]["ah"]["tau_tilde_ah"]
    assert f"annotation tau_tilde_ah = {ah!r}" in sidecar


def test_schema_mismatch_aborts(tmp_path):
    bad = tmp_path / "in"
    bad.mkdir()
    (bad / "timeseries.csv").write_text(
        "# schema: calcilab.manifold.v1\n# x\nt,h,c\n0,0,0\n")
    with pytest.raises(figlib.SchemaError, match="schema"):
        fig3.render(bad, tmp_path / "x.png")


def test_offending_columns_reported(tmp_path):
    bad = tmp_path / "in"
    bad.mkdir()
    (bad / "timeseries.csv").write_text(
        "# schema: calcilab.timeseries.v1\n# x\nt,h,q\n0,0,0\n")
    with pytest.raises(figlib.SchemaError, match=r"offending columns.*'q'"):
        fig3.render(bad, tmp_path / "x.png")


def test_empty_input_is_explicit_error(tmp_path):
    bad = tmp_path / "in"
    bad.mkdir()
    (bad / "timeseries.csv").write_text(
        "# schema: calcilab.timeseries.v1\n# x\nt,h,c\n")
    with pytest.raises(figlib.EmptyDataError, match="no data rows"):
        fig3.render(bad, tmp_path / "x.png")
    assert not (tmp_path / "x.png").exists()  # no blank image left behind
