"""SVG snapshots of 2D runs and of slice polygons.

Drawings are built with :mod:`xml.etree.ElementTree`, one ``<g>`` layer per
element kind, so the output is always well-formed XML.
"""
from __future__ import annotations

import xml.etree.ElementTree as ET

import numpy as np

from .collision import Environment
from .errors import UnsupportedDimensionError
from .sampling.convex import Slice

__all__ = ["environment_svg", "slice_svg", "hull_outline", "write_svg"]

_STYLE = {
    "obstacles": {"fill": "#555555", "stroke": "none"},
    "goal": {"fill": "#7fc97f", "stroke": "none"},
    "tree": {"fill": "none", "stroke": "#9ecae1", "stroke-width": "0.6"},
    "hull": {"fill": "none", "stroke": "#e6550d", "stroke-width": "1.2",
             "stroke-dasharray": "4 3"},
    "path": {"fill": "none", "stroke": "#d62728", "stroke-width": "2"},
    "start": {"fill": "#1f77b4", "stroke": "none"},
}


def _num(x) -> str:
    return f"{float(x):.3f}".rstrip("0").rstrip(".")


def _points(P) -> str:
    return " ".join(f"{_num(x)},{_num(y)}" for x, y in P)


class _Canvas:
    # y axis flipped so that +y points up, as in the planning frame
    def __init__(self, lo, hi, width=600.0, pad=10.0):
        self.lo = np.asarray(lo, dtype=float)
        self.hi = np.asarray(hi, dtype=float)
        span = self.hi - self.lo
        self.scale = (width - 2 * pad) / max(span[0], span[1])
        self.pad = pad
        w = span[0] * self.scale + 2 * pad
        h = span[1] * self.scale + 2 * pad
        self.height = h
        self.root = ET.Element("svg", xmlns="http://www.w3.org/2000/svg",
                               width=_num(w), height=_num(h),
                               viewBox=f"0 0 {_num(w)} {_num(h)}")
        ET.SubElement(self.root, "rect", x="0", y="0", width=_num(w), height=_num(h),
                      fill="white", stroke="black")

    def map(self, P) -> np.ndarray:
        P = np.atleast_2d(np.asarray(P, dtype=float))[:, :2]
        x = (P[:, 0] - self.lo[0]) * self.scale + self.pad
        y = self.height - ((P[:, 1] - self.lo[1]) * self.scale + self.pad)
        return np.column_stack((x, y))

    def layer(self, name: str) -> ET.Element:
        return ET.SubElement(self.root, "g", id=name, **_STYLE.get(name, {}))

    def box(self, g, lo, hi):
        (x0, y1), (x1, y0) = self.map([lo, hi])
        ET.SubElement(g, "rect", x=_num(x0), y=_num(y0),
                      width=_num(x1 - x0), height=_num(y1 - y0))

    def polyline(self, g, P, closed=False):
        tag = "polygon" if closed else "polyline"
        ET.SubElement(g, tag, points=_points(self.map(P)))


def hull_outline(s: Slice) -> np.ndarray:
    """Closed outline of the hull of revolution, projected to the (x, y) plane.

    The outline is the section of the hull by the plane spanned by the axis
    and the (x, y)-perpendicular of the axis, i.e. the slice and its mirror
    image; for a 2D frame it is the whole hull.
    """
    frame = s.frame
    d = frame.direction
    dxy = d[:2]
    norm = float(np.hypot(dxy[0], dxy[1]))
    if frame.dim < 2 or norm < 1e-12:
        raise UnsupportedDimensionError("axis has no extent in the (x, y) plane")
    r = np.array([-dxy[1], dxy[0]]) / norm
    o = frame.origin[:2]
    v = s.vertices
    upper = o + v[:, :1] * dxy + v[:, 1:] * r
    lower = o + v[::-1, :1] * dxy - v[::-1, 1:] * r
    return np.vstack((upper, lower))


def environment_svg(env: Environment, path=None, tree_edges=None, hull=None,
                    width: float = 600.0) -> ET.Element:
    """Workspace drawing with obstacle, goal, tree, hull and path layers.

    ``path`` is an ``(n, d)`` array in configuration coordinates,
    ``tree_edges`` a pair of ``(k, d)`` arrays (parents, children) and
    ``hull`` a closed ``(m, 2)`` outline in workspace coordinates.
    """
    if env.workspace_dim != 2:
        raise UnsupportedDimensionError("SVG export supports 2D workspaces only")
    cv = _Canvas(env.bounds_min, env.bounds_max, width)
    g = cv.layer("obstacles")
    for lo, hi in zip(env.obstacles_min, env.obstacles_max):
        cv.box(g, lo, hi)
    cv.box(cv.layer("goal"), env.goal_min, env.goal_max)
    g = cv.layer("tree")
    if tree_edges is not None:
        A, B = cv.map(tree_edges[0]), cv.map(tree_edges[1])
        for a, b in zip(A, B):
            ET.SubElement(g, "line", x1=_num(a[0]), y1=_num(a[1]),
                          x2=_num(b[0]), y2=_num(b[1]))
    g = cv.layer("hull")
    if hull is not None:
        cv.polyline(g, hull, closed=True)
    g = cv.layer("path")
    if path is not None:
        cv.polyline(g, path)
    s = cv.map(env.start)[0]
    ET.SubElement(cv.layer("start"), "circle", cx=_num(s[0]), cy=_num(s[1]), r="3")
    return cv.root


def slice_svg(s: Slice, points=None, width: float = 600.0) -> ET.Element:
    """The slice polygon in ``(a, f)`` coordinates, with optional transformed points."""
    v = s.vertices
    fmax = max(float(v[:, 1].max()), 1e-9)
    pad = 0.05 * max(s.extent, fmax, 1e-9)
    lo = np.array([-pad, -pad])
    hi = np.array([s.extent + pad, fmax + pad])
    points = None if points is None or len(points) == 0 else np.asarray(points, dtype=float)
    if points is not None:
        pts = points
        lo = np.minimum(lo, pts.min(axis=0) - pad)
        hi = np.maximum(hi, pts.max(axis=0) + pad)
    cv = _Canvas(lo, hi, width)
    cv.polyline(cv.layer("hull"), v, closed=True)
    g = cv.layer("points")
    if points is not None:
        for x, y in cv.map(points):
            ET.SubElement(g, "circle", cx=_num(x), cy=_num(y), r="3", fill="#1f77b4")
    g = cv.layer("vertices")
    for x, y in cv.map(v):
        ET.SubElement(g, "circle", cx=_num(x), cy=_num(y), r="4", fill="#d62728")
    return cv.root


def write_svg(root: ET.Element, path):
    ET.ElementTree(root).write(path, encoding="utf-8", xml_declaration=True)
