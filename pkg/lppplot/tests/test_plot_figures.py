import xml.etree.ElementTree as ET

import pytest

from lppplot import FigureSpec, render_tail, render_variance
from lppplot.cli import main


def svg_ids(path):
    tree = ET.parse(path)
    return {el.get("id") for el in tree.iter() if el.get("id")}


def svg_text(path):
    return path.read_text()


def test_render_tail_semilogy(tail_csv, tmp_path):
    out = tmp_path / "exit.svg"
    render_tail(FigureSpec(inputs=[tail_csv], output=str(out)))
    assert out.exists() and out.stat().st_size > 0
    ids = svg_ids(out)
    assert "ci-whiskers-0" in ids
    assert "fit-curve-0" in ids


def test_render_tail_neglog_with_guides(tail_csv, tmp_path):
    out = tmp_path / "exit-neglog.svg"
    render_tail(FigureSpec(inputs=[tail_csv], output=str(out), mode="neglog"))
    ids = svg_ids(out)
    assert "ci-whiskers-0" in ids and "fit-curve-0" in ids
    assert "guide-slope-1.5" in ids and "guide-slope-3.0" in ids


def test_legend_carries_fitted_exponent(tail_csv, tmp_path):
    out = tmp_path / "legend.svg"
    render_tail(FigureSpec(inputs=[tail_csv], output=str(out)))
    assert "kappa_hat=2.63" in svg_text(out)


def test_two_curves_overlaid(tail_csv, upper_csv, tmp_path):
    out = tmp_path / "both.svg"
    render_tail(FigureSpec(inputs=[tail_csv, upper_csv], output=str(out), mode="neglog"))
    ids = svg_ids(out)
    assert "ci-whiskers-0" in ids and "ci-whiskers-1" in ids


def test_render_is_deterministic(tail_csv, tmp_path):
    a, b = tmp_path / "a.svg", tmp_path / "b.svg"
    render_tail(FigureSpec(inputs=[tail_csv], output=str(a)))
    render_tail(FigureSpec(inputs=[tail_csv], output=str(b)))
    assert a.read_bytes() == b.read_bytes()


def test_render_variance(variance_csv, tmp_path):
    out = tmp_path / "var.svg"
    render_variance(FigureSpec(inputs=[variance_csv], output=str(out)))
    ids = svg_ids(out)
    assert "guide-slope-2-3" in ids
    assert "measured slope 0.673" in svg_text(out)


def test_figure_spec_validation(tail_csv):
    with pytest.raises(ValueError):
        FigureSpec(inputs=[], output="x.svg")
    with pytest.raises(ValueError):
        FigureSpec(inputs=[tail_csv], output="x.svg", mode="polar")


def test_cli_tail(tail_csv, tmp_path, capsys):
    out = tmp_path / "cli.svg"
    assert main(["tail", str(tail_csv), "--mode", "neglog", "-o", str(out)]) == 0
    assert out.exists()
    assert "wrote" in capsys.readouterr().out


def test_cli_variance(variance_csv, tmp_path):
    out = tmp_path / "cli-var.svg"
    assert main(["variance", str(variance_csv), "-o", str(out)]) == 0
    assert out.exists()


def test_cli_malformed_input_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("threshold,n_samples\n")
    out = tmp_path / "x.svg"
    assert main(["tail", str(bad), "-o", str(out)]) == 1
    err = capsys.readouterr().err
    assert "schema error" in err and ":1:" in err


def test_cli_missing_file_exit_code(tmp_path):
    assert main(["tail", str(tmp_path / "nope.csv"), "-o", str(tmp_path / "x.svg")]) == 1


def test_cli_usage_error():
    assert main(["tail"]) == 2
