import xml.etree.ElementTree as ET

import numpy as np
import pytest

from radarlab.errors import DomainError
from radarlab.plotting import Axes, Series, emit_plot
from radarlab.scaling import loglog_fit

NS = {"s": "http://www.w3.org/2000/svg"}


def parse(path):
    return ET.parse(path).getroot()


def test_single_point_has_no_fit(tmp_path):
    fits = emit_plot([Series("one", [10.0], [3.0])], Axes(), tmp_path / "p.svg")
    root = parse(tmp_path / "p.svg")
    assert root.tag.endswith("svg")
    assert fits == {}
    assert not root.findall(".//s:line[@class='fit']", NS)
    assert len(root.findall(".//s:circle", NS)) == 1


def test_exact_power_law_line_through_points(tmp_path):
    x = np.geomspace(1, 1e4, 9)
    y = 2.5 * x**0.75
    fits = emit_plot([Series("law", x, y)], Axes(), tmp_path / "p.svg")
    root = parse(tmp_path / "p.svg")
    (line,) = root.findall(".//s:line[@class='fit']", NS)
    x1, y1, x2, y2 = (float(line.get(k)) for k in ("x1", "y1", "x2", "y2"))
    for c in root.findall(".//s:circle", NS):
        cx, cy = float(c.get("cx")), float(c.get("cy"))
        on_line = y1 + (cx - x1) * (y2 - y1) / (x2 - x1)
        assert cy == pytest.approx(on_line, abs=0.02)
    (label,) = root.findall(".//s:text[@class='slope']", NS)
    expected = loglog_fit(x, y).slope
    assert fits["law"].slope == expected
    assert label.text == f"slope = {expected:.4f}"


def test_two_series_distinct_markers_and_legend(tmp_path):
    x = [1.0, 10.0, 100.0]
    emit_plot([Series("a", x, [1.0, 2.0, 4.0]), Series("b", x, [3.0, 1.0, 0.5])], Axes(), tmp_path / "p.svg")
    root = parse(tmp_path / "p.svg")
    groups = root.findall(".//s:g[@class='series']", NS)
    assert [g.get("data-label") for g in groups] == ["a", "b"]
    first = {child.tag for child in groups[0] if child.get("class") is None}
    second = {child.tag for child in groups[1] if child.get("class") is None}
    assert first != second
    legend = root.find(".//s:g[@class='legend']", NS)
    assert [t.text for t in legend.findall("s:text", NS)] == ["a", "b"]


def test_single_series_has_no_legend(tmp_path):
    emit_plot([Series("a", [1, 2, 3], [1, 2, 3])], Axes(), tmp_path / "p.svg")
    assert parse(tmp_path / "p.svg").find(".//s:g[@class='legend']", NS) is None


def test_empty_series_rejected(tmp_path):
    with pytest.raises(DomainError):
        emit_plot([], Axes(), tmp_path / "p.svg")
    with pytest.raises(DomainError):
        emit_plot([Series("e", [], [])], Axes(), tmp_path / "p.svg")


def test_log_axes_reject_non_positive(tmp_path):
    with pytest.raises(DomainError):
        emit_plot([Series("z", [0, 1, 2], [1, 2, 3])], Axes(), tmp_path / "p.svg")


def test_linear_axes_accept_zero(tmp_path):
    fits = emit_plot([Series("z", [0, 1, 2], [0, 5, 3])], Axes(loglog=False), tmp_path / "p.svg")
    assert fits == {}
    parse(tmp_path / "p.svg")


def test_labels_are_escaped(tmp_path):
    emit_plot([Series("a<b", [1, 2], [1, 2])], Axes(title="x & y"), tmp_path / "p.svg")
    root = parse(tmp_path / "p.svg")
    assert root.find(".//s:g[@class='series']", NS).get("data-label") == "a<b"
