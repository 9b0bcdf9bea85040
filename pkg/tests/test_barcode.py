import math
import xml.etree.ElementTree as ET

import pytest

from levelhom import PersistenceDiagram, UnsupportedFormat, render_barcode

SVG = "{http://www.w3.org/2000/svg}"


def bars(svg: bytes):
    root = ET.fromstring(svg)
    return root.findall(f"{SVG}line")


class TestRenderBarcode:
    """Text and SVG barcodes."""

    def test_empty_svg_is_valid(self):
        root = ET.fromstring(render_barcode([], "svg"))
        assert root.tag == f"{SVG}svg" and root.get("version") == "1.1"
        assert bars(render_barcode([PersistenceDiagram(0)], "svg")) == []

    def test_empty_text(self):
        assert render_barcode([PersistenceDiagram(0)], "text") == b""

    def test_essential_bar_has_marker(self):
        svg = render_barcode([PersistenceDiagram(0, [(1.0, -math.inf)])], "svg")
        (line,) = bars(svg)
        assert line.get("marker-end") == "url(#open)"
        assert b"<marker" in svg

    def test_min_length_filters_finite_bars(self):
        dg = PersistenceDiagram(0, [(1.0, -math.inf), (0.9, 0.85), (0.8, 0.1)])
        assert len(bars(render_barcode([dg], "svg", 0.1))) == 2
        assert len(bars(render_barcode([dg], "svg", 0.0))) == 3

    def test_panels_per_degree(self):
        dgs = [PersistenceDiagram(0, [(1.0, -math.inf)] * 3), PersistenceDiagram(1, [(0.8, 0.2)] * 3)]
        svg = render_barcode(dgs, "svg")
        labels = [t.text for t in ET.fromstring(svg).findall(f"{SVG}text")]
        assert "H0" in labels and "H1" in labels
        assert len(bars(svg)) == 6

    def test_higher_levels_on_the_left(self):
        dg = PersistenceDiagram(0, [(2.0, 1.0), (1.0, 0.0)])
        first, second = bars(render_barcode([dg], "svg"))
        assert float(first.get("x1")) < float(second.get("x1"))

    def test_text_lists_bars(self):
        text = render_barcode([PersistenceDiagram(1, [(0.5, 0.25)])], "text").decode()
        assert "H1: 1 bars" in text and "0.5 -> 0.25" in text

    def test_unsupported(self):
        with pytest.raises(UnsupportedFormat):
            render_barcode([], "png")
