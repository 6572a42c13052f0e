import re
import xml.etree.ElementTree as ET

import numpy as np

from chaodelone.render import Scene, disk_svg, render, render_ticks, ticks_svg
from chaodelone.surface import ball_orbit, random_geodesic

NS = "{http://www.w3.org/2000/svg}"


def _tags(svg, tag):
    return ET.fromstring(svg).findall(f".//{NS}{tag}")


def test_empty_scene_circle_only():
    svg = disk_svg(Scene())
    root = ET.fromstring(svg)
    assert [c.tag for c in root] == [f"{NS}circle"]


def test_twelve_arcs_without_tube(surface):
    svg = disk_svg(Scene(group=surface))
    edges = [p for p in _tags(svg, "path") if p.get("class") == "edge"]
    assert len(edges) == 12 and len(_tags(svg, "path")) == 12


def test_full_scene(surface):
    ell = random_geodesic(surface, 0)
    scene = Scene(surface, ball_orbit(surface, 4.0).points, ell, 0.95 * surface.mu, (-3, 3),
                  np.array([-1.0, 0.5]))
    svg = disk_svg(scene)
    assert len([p for p in _tags(svg, "path") if p.get("class") == "tube"]) == 1
    assert len([c for c in _tags(svg, "circle") if c.get("class") == "projected"]) == 2
    assert len(_tags(svg, "polyline")) == 1


def test_points_inside_disk(surface):
    svg = disk_svg(Scene(surface, ball_orbit(surface, 6.0).points))
    for c in _tags(svg, "circle")[1:]:
        x, y = float(c.get("cx")) - 240, float(c.get("cy")) - 240
        assert x * x + y * y <= 220.0 ** 2 + 1e-6


def test_byte_identical(tmp_path, surface):
    scene = Scene(surface, ball_orbit(surface, 4.0).points, random_geodesic(surface, 1), 1.0)
    render(scene, tmp_path / "a.svg")
    render(scene, tmp_path / "b.svg")
    assert (tmp_path / "a.svg").read_bytes() == (tmp_path / "b.svg").read_bytes()
    assert "-0.000" not in (tmp_path / "a.svg").read_text()


def test_ticks(tmp_path):
    svg = ticks_svg([-1.0, 0.0, 2.0], (-5, 5), [False, True, False])
    ticks = [l for l in _tags(svg, "line") if l.get("class") == "tick"]
    assert len(ticks) == 3
    assert sum(t.get("stroke") == "#fd8d3c" for t in ticks) == 1
    render_ticks([0.0], (-1, 1), tmp_path / "t.svg")
    assert re.match(r"<svg", (tmp_path / "t.svg").read_text())
