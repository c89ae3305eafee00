"""Curve CSV, JSON reports and SVG export.

CSV layout is a header ``x,y,s`` and one row per sample. A closed curve
repeats its first vertex as the final row (with s equal to the total length);
a file whose last row repeats its first point reads back as closed.
"""

from __future__ import annotations

import csv
import json
import math
import re
from pathlib import Path

import numpy as np

from .geometry import CurveError, SampledCurve


class CurveFormatError(CurveError):
    pass


def write_csv(curve: SampledCurve, path) -> None:
    pts, arc = curve.extended()
    with open(path, "w", newline="") as fh:
        fh.write("x,y,s\n")
        np.savetxt(fh, np.column_stack([pts, arc]), fmt="%.17g", delimiter=",")


def read_csv(path) -> SampledCurve:
    rows = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header[:3]] != ["x", "y", "s"]:
            raise CurveFormatError(f"{path}: expected header x,y,s")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) < 2:
                raise CurveFormatError(f"{path}: row {lineno} has {len(row)} fields")
            try:
                x, y = float(row[0]), float(row[1])
            except ValueError:
                raise CurveFormatError(f"{path}: row {lineno} is not numeric: {row!r}") from None
            if not (math.isfinite(x) and math.isfinite(y)):
                raise CurveFormatError(f"{path}: row {lineno} is not finite")
            rows.append((x, y))
    if len(rows) < 2:
        raise CurveFormatError(f"{path}: need at least 2 rows")
    pts = np.array(rows)
    closed = len(pts) > 3 and np.array_equal(pts[0], pts[-1])
    if closed:
        pts = pts[:-1]
    try:
        return SampledCurve.from_points(pts, closed=closed)
    except CurveError as exc:
        raise CurveFormatError(f"{path}: {exc}") from None


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if math.isnan(v):
            return None
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    return obj


def dumps(obj) -> str:
    """Deterministic JSON: sorted keys, no NaN, floats at full precision."""
    return json.dumps(_jsonable(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_json(obj, path) -> None:
    Path(path).write_text(dumps(obj))


def svg_document(curve: SampledCurve, stroke: float = 0.002, pad: float = 0.05) -> str:
    """A single ``<path>``; coordinates are written unchanged and the y flip
    lives in a transform, so the path data round-trips exactly."""
    if stroke <= 0:
        raise ValueError("stroke must be positive")
    x0, y0, x1, y1 = curve.bbox()
    w, h = x1 - x0, y1 - y0
    span = max(w, h)
    px, py = pad * (w or span), pad * (h or span)
    # after scale(1,-1) the box spans [-(y1+py), -(y0-py)] vertically
    vb = (x0 - px, -(y1 + py), w + 2 * px, h + 2 * py)
    coords = " L ".join(f"{x!r} {y!r}" for x, y in curve.points.tolist())
    d = "M " + coords + (" Z" if curve.closed else "")
    return (
        '<svg xmlns="http://www.w3.org/2000/svg" '
        f'viewBox="{vb[0]!r} {vb[1]!r} {vb[2]!r} {vb[3]!r}">\n'
        f'<path transform="scale(1,-1)" fill="none" stroke="black" stroke-width="{stroke!r}" '
        f'd="{d}"/>\n</svg>\n'
    )


def write_svg(curve: SampledCurve, path, stroke: float = 0.002) -> None:
    Path(path).write_text(svg_document(curve, stroke))


_NUM = re.compile(r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?")


def read_svg_path(path) -> SampledCurve:
    """Inverse of :func:`write_svg` for the files it writes."""
    text = Path(path).read_text()
    m = re.search(r'\sd="([^"]*)"', text)
    if m is None:
        raise CurveFormatError(f"{path}: no path data")
    d = m.group(1)
    nums = [float(v) for v in _NUM.findall(d)]
    pts = np.array(nums).reshape(-1, 2)
    return SampledCurve.from_points(pts, closed=d.rstrip().endswith("Z"))
