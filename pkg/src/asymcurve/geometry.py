"""Polyline curves with arclength tables, Frenet frames and discrete curvature.

Every curve in the package is a :class:`SampledCurve`: an ordered array of
planar points together with the cumulative chord length at each sample.
Closed curves do not repeat their first vertex; the segment from the last
sample back to the first is implied.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.spatial import ConvexHull, QhullError, cKDTree


class CurveError(ValueError):
    """Invalid curve data or an out-of-range query."""


class InvalidStepError(CurveError):
    pass


class InsufficientDataError(CurveError):
    pass


class DegenerateSubarcError(CurveError):
    pass


@dataclass(frozen=True)
class PlanarPoint:
    x: float
    y: float

    def __post_init__(self):
        if not (np.isfinite(self.x) and np.isfinite(self.y)):
            raise CurveError(f"non-finite point ({self.x}, {self.y})")

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y])


@dataclass(frozen=True, eq=False)
class SampledCurve:
    """Immutable polyline with cumulative arclength.

    Build instances with :meth:`from_points`; the raw constructor trusts its
    arguments.
    """

    points: np.ndarray
    arclen: np.ndarray
    closed: bool = False

    @classmethod
    def from_points(cls, points, closed: bool = False) -> "SampledCurve":
        pts = np.array(points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 2:
            raise CurveError("need an (m, 2) array with m >= 2")
        if not np.all(np.isfinite(pts)):
            raise CurveError("curve contains NaN or Inf")
        seg = np.hypot(*np.diff(pts, axis=0).T)
        if np.any(seg == 0.0):
            i = int(np.flatnonzero(seg == 0.0)[0])
            raise CurveError(f"consecutive samples {i} and {i + 1} coincide")
        if closed and np.array_equal(pts[0], pts[-1]):
            raise CurveError("closed curves must not repeat the first vertex")
        arclen = np.concatenate(([0.0], np.cumsum(seg)))
        pts.setflags(write=False)
        arclen.setflags(write=False)
        return cls(pts, arclen, bool(closed))

    def __len__(self) -> int:
        return len(self.points)

    @property
    def closing_length(self) -> float:
        if not self.closed:
            return 0.0
        return float(np.hypot(*(self.points[0] - self.points[-1])))

    @property
    def total_length(self) -> float:
        return float(self.arclen[-1]) + self.closing_length

    def extended(self) -> tuple[np.ndarray, np.ndarray]:
        """Points and arclengths with the closing vertex appended (closed curves)."""
        return self._extended[:2]

    @functools.cached_property
    def _extended(self):
        if not self.closed:
            pts, arc = self.points, self.arclen
        else:
            pts = np.vstack([self.points, self.points[:1]])
            arc = np.append(self.arclen, self.total_length)
            pts.setflags(write=False)
            arc.setflags(write=False)
        # np.interp copies read-only or strided inputs on every call, so keep
        # private writable contiguous copies for lookups
        return pts, arc, np.array(arc), np.array(pts[:, 0]), np.array(pts[:, 1])

    def position(self, s) -> np.ndarray:
        """Point(s) at arclength ``s`` by linear interpolation along the polyline."""
        _, _, arc, x, y = self._extended
        s = np.asarray(s, dtype=float)
        if self.closed:
            s = np.mod(s, self.total_length)
        return np.stack([np.interp(s, arc, x), np.interp(s, arc, y)], axis=-1)

    def diameter(self) -> float:
        return point_set_diameter(self.points)

    def bbox(self) -> tuple[float, float, float, float]:
        lo = self.points.min(axis=0)
        hi = self.points.max(axis=0)
        return float(lo[0]), float(lo[1]), float(hi[0]), float(hi[1])


@dataclass(frozen=True)
class FrenetSample:
    s: float
    position: np.ndarray
    tangent: np.ndarray
    normal: np.ndarray
    kappa: float
    one_sided: bool = False


@dataclass(frozen=True)
class CurvatureProfile:
    s: np.ndarray
    kappa: np.ndarray
    step: float
    sup_abs: float = field(init=False)

    def __post_init__(self):
        sup = float(np.max(np.abs(self.kappa))) if len(self.kappa) else 0.0
        object.__setattr__(self, "sup_abs", sup)


@dataclass(frozen=True)
class SubarcRef:
    s_start: float
    s_end: float

    def check(self, curve: SampledCurve) -> None:
        L = curve.total_length
        if not (0.0 <= self.s_start < self.s_end <= L):
            raise CurveError(
                f"subarc [{self.s_start}, {self.s_end}] outside [0, {L}] or empty"
            )


def rotate90(v: np.ndarray) -> np.ndarray:
    """Rotate vectors by +90 degrees."""
    v = np.asarray(v, dtype=float)
    return np.stack([-v[..., 1], v[..., 0]], axis=-1)


def menger(a, b, c):
    """Signed Menger curvature of the triangle (a, b, c).

    Positive when the path a -> b -> c turns left. Works elementwise on
    stacked ``(..., 2)`` arrays.
    """
    a, b, c = (np.asarray(p, dtype=float) for p in (a, b, c))
    ab = b - a
    bc = c - b
    ca = a - c
    cross = ab[..., 0] * bc[..., 1] - ab[..., 1] * bc[..., 0]
    den = np.hypot(ab[..., 0], ab[..., 1]) * np.hypot(bc[..., 0], bc[..., 1]) * np.hypot(
        ca[..., 0], ca[..., 1]
    )
    with np.errstate(invalid="ignore", divide="ignore"):
        k = np.where(den > 0, 2.0 * cross / den, 0.0)
    return k


def sample_curvature(curve: SampledCurve) -> np.ndarray:
    """Menger curvature at every sample; open-curve ends copy their neighbour."""
    p = curve.points
    if len(p) < 3:
        raise InsufficientDataError("curvature needs at least 3 samples")
    if curve.closed:
        return menger(np.roll(p, 1, axis=0), p, np.roll(p, -1, axis=0))
    k = np.empty(len(p))
    k[1:-1] = menger(p[:-2], p[1:-1], p[2:])
    k[0] = k[1]
    k[-1] = k[-2]
    return k


def _grid(L: float, step: float, closed: bool) -> np.ndarray:
    count = int(np.floor(L / step * (1 + 1e-12)))
    s = np.arange(count + 1) * step
    if closed:
        return s[s < L - 1e-9 * step]
    if L - s[-1] <= 1e-9 * step:
        s[-1] = L
    else:
        s = np.append(s, L)
    return s


def resample_by_arclength(
    curve: SampledCurve, step: float, method: str = "linear"
) -> SampledCurve:
    """Resample at arclength 0, step, 2*step, ..., keeping the final point.

    ``method="linear"`` places samples on the polyline itself;
    ``method="cubic"`` evaluates a cubic spline through the samples in
    arclength, which is what curvature estimation wants when the new step is
    comparable to or finer than the old one.
    """
    L = curve.total_length
    if not (step > 0 and step < L):
        raise InvalidStepError(f"step {step} not in (0, {L})")
    s = _grid(L, step, curve.closed)
    pts, arc = curve.extended()
    if method == "linear":
        out = curve.position(s)
    elif method == "cubic":
        bc = "periodic" if curve.closed else "not-a-knot"
        out = CubicSpline(arc, pts, axis=0, bc_type=bc)(s)
    else:
        raise ValueError(f"unknown method {method!r}")
    out[0] = pts[0]
    if not curve.closed:
        out[-1] = pts[-1]
    return SampledCurve.from_points(out, closed=curve.closed)


def arc_length(curve: SampledCurve, sub: SubarcRef) -> float:
    sub.check(curve)
    return float(sub.s_end - sub.s_start)


def frenet_frame(curve: SampledCurve, s: float) -> FrenetSample:
    """Tangent, normal and signed curvature at arclength ``s``.

    Uses the sample nearest to ``s`` and its two neighbours: central
    difference for the tangent, Menger curvature for kappa. At the ends of an
    open curve the one-sided difference is used and ``one_sided`` is set.
    """
    m = len(curve)
    if m < 3:
        raise InsufficientDataError("frenet_frame needs at least 3 samples")
    L = curve.total_length
    if curve.closed:
        s = float(np.mod(s, L))
    elif not (0.0 <= s <= L):
        raise CurveError(f"s={s} outside [0, {L}]")
    pts, arc = curve.extended()
    i = int(np.searchsorted(arc, s))
    if i > 0 and (i >= len(arc) or s - arc[i - 1] <= arc[i] - s):
        i -= 1
    one_sided = False
    if curve.closed:
        i %= m
        prv, nxt = pts[(i - 1) % m], pts[(i + 1) % m]
        d = nxt - prv
        kappa = float(menger(prv, pts[i], nxt))
    elif i == 0 or i == m - 1:
        one_sided = True
        d = pts[1] - pts[0] if i == 0 else pts[m - 1] - pts[m - 2]
        j = 1 if i == 0 else m - 2
        kappa = float(menger(pts[j - 1], pts[j], pts[j + 1]))
    else:
        d = pts[i + 1] - pts[i - 1]
        kappa = float(menger(pts[i - 1], pts[i], pts[i + 1]))
    t = d / np.hypot(*d)
    return FrenetSample(
        s=s,
        position=curve.position(s),
        tangent=t,
        normal=rotate90(t),
        kappa=kappa,
        one_sided=one_sided,
    )


def curvature_profile(curve: SampledCurve, step: float) -> CurvatureProfile:
    """Signed curvature on a uniform arclength grid (cubic resampling)."""
    grid = resample_by_arclength(curve, step, method="cubic")
    return CurvatureProfile(s=np.array(grid.arclen), kappa=sample_curvature(grid), step=step)


def inflection_points(profile: CurvatureProfile, kappa_tol: float | None = None) -> list[float]:
    """Arclength positions where the curvature changes sign."""
    k = np.asarray(profile.kappa, dtype=float)
    s = np.asarray(profile.s, dtype=float)
    if kappa_tol is None:
        kappa_tol = max(1e-9 * profile.sup_abs, 1e-14)
    sig = np.where(np.abs(k) >= kappa_tol, np.sign(k), 0.0)
    nz = np.flatnonzero(sig)
    if len(nz) == 0:
        return []
    if len(nz) < len(sig):
        # sign of the nearest significant sample, ties to the earlier one
        idx = np.arange(len(sig))
        right = np.searchsorted(nz, idx)
        left = np.clip(right - 1, 0, len(nz) - 1)
        right = np.clip(right, 0, len(nz) - 1)
        take_left = (idx - nz[left]) <= (nz[right] - idx)
        sig = sig[np.where(take_left, nz[left], nz[right])]
    jumps = np.flatnonzero(sig[:-1] != sig[1:])
    out = []
    for i in jumps:
        k0, k1 = k[i], k[i + 1]
        if k0 * k1 < 0:
            out.append(s[i] + (s[i + 1] - s[i]) * k0 / (k0 - k1))
        else:
            out.append(0.5 * (s[i] + s[i + 1]))
    merged: list[float] = []
    for x in out:
        if merged and x - merged[-1] < profile.step:
            merged[-1] = 0.5 * (merged[-1] + x)
        else:
            merged.append(float(x))
    return merged


def point_segment_distance(p: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Distance from points ``p`` to segments ``[a, b]`` (broadcasting)."""
    ab = b - a
    ap = p - a
    denom = np.einsum("...i,...i->...", ab, ab)
    with np.errstate(invalid="ignore", divide="ignore"):
        t = np.where(denom > 0, np.einsum("...i,...i->...", ap, ab) / denom, 0.0)
    t = np.clip(t, 0.0, 1.0)
    d = ap - t[..., None] * ab
    return np.hypot(d[..., 0], d[..., 1])


def _segments(curve: SampledCurve) -> tuple[np.ndarray, np.ndarray]:
    pts, _ = curve.extended()
    return pts[:-1], pts[1:]


class _SegmentIndex:
    """k-d tree over segment pieces with an exactness certificate.

    Segments longer than twice the median are cut into equal pieces, each
    remembering its owner; distances are always taken to the owner segment.
    Any segment closer to q than d owns a piece whose midpoint lies within
    d + half, where half is the largest half-piece length.
    """

    def __init__(self, curve: SampledCurve):
        self.a, self.b = _segments(curve)
        lengths = np.hypot(*(self.b - self.a).T)
        cap = 2 * float(np.median(lengths)) or float(lengths.max()) or 1.0
        cuts = np.maximum(1, np.ceil(lengths / cap)).astype(int)
        self.owner = np.repeat(np.arange(len(lengths)), cuts)
        first = np.concatenate([[0], np.cumsum(cuts)[:-1]])
        t = ((np.arange(len(self.owner)) - np.repeat(first, cuts)) + 0.5) / cuts[self.owner]
        d = self.b - self.a
        mid = self.a[self.owner] + t[:, None] * d[self.owner]
        self.half = 0.5 * float(np.max(lengths / cuts))
        self.tree = cKDTree(mid)

    def bounds(self, q: np.ndarray, k: int):
        """Upper and lower bounds on the distance from each point.

        The upper bound is the exact distance to the owners of the k nearest
        pieces; where a farther segment might be closer, the lower bound is
        the k-th midpoint distance less half a piece, shaved for roundoff.
        Certified points get equal bounds.
        """
        k = min(k, len(self.owner))
        best = np.empty(len(q))
        low = np.empty(len(q))
        step = max(1, (1 << 18) // k)  # bounds the size of the temporaries
        for lo in range(0, len(q), step):
            qq = q[lo:lo + step]
            dmid, idx = self.tree.query(qq, k=k)
            if k == 1:
                dmid, idx = dmid[:, None], idx[:, None]
            seg = self.owner[idx]
            bb = point_segment_distance(qq[:, None, :], self.a[seg], self.b[seg]).min(axis=1)
            best[lo:lo + step] = bb
            far = dmid[:, -1] - self.half
            unsure = (far <= bb) & (k < len(self.owner))
            low[lo:lo + step] = np.where(unsure, np.minimum(bb, far * (1 - 1e-12)), bb)
        return best, low

    def exact(self, p: np.ndarray, upper: float) -> float:
        seg = np.unique(self.owner[self.tree.query_ball_point(p, upper + self.half)])
        return float(point_segment_distance(p, self.a[seg], self.b[seg]).min())


def distance_to_polyline(q: np.ndarray, curve: SampledCurve) -> np.ndarray:
    """Exact distance from each query point to the polyline ``curve``.

    Points whose nearest candidates do not certify the minimum fall back to
    a radius query, so the result equals the brute-force minimum.
    """
    q = np.atleast_2d(np.asarray(q, dtype=float))
    a, b = _segments(curve)
    if len(a) <= 64:
        return point_segment_distance(q[:, None, :], a[None], b[None]).min(axis=1)
    return _exact_many(_SegmentIndex(curve), q)


def max_deviation(a: SampledCurve, b: SampledCurve, method: str = "tree") -> float:
    """sup over samples of ``a`` of the distance to the polyline ``b``.

    The tree method only resolves uncertified points whose upper bound can
    still beat the running maximum, largest bound first.
    """
    if len(a) == 0 or len(b) == 0:
        raise CurveError("empty curve")
    if method == "brute":
        s0, s1 = _segments(b)
        return float(
            max(point_segment_distance(p, s0, s1).min() for p in a.points)
        )
    if len(b) <= 65 or len(a) <= 64:
        return float(distance_to_polyline(a.points, b).max())
    index = _SegmentIndex(b)
    pts = a.points
    # blocks of consecutive samples, bounded above by the middle sample's
    # upper bound plus the block radius about it; floor is a certified lower
    # bound on the answer, and surviving leaves are resolved together
    blocks = np.arange(0, len(pts), 1024)
    blocks = np.column_stack([blocks, np.minimum(blocks + 1024, len(pts))])
    floor = 0.0
    leaves = []
    while len(blocks):
        mids = (blocks[:, 0] + blocks[:, 1]) // 2
        hi, lo = index.bounds(pts[mids], 8)
        floor = max(floor, float(lo.max()))
        r = _block_radii(pts, blocks, mids)
        live = (hi + r) * (1 + 1e-12) >= floor
        small = blocks[:, 1] - blocks[:, 0] <= 64
        leaves += [np.arange(lo_, hi_) for lo_, hi_ in blocks[live & small]]
        split = live & ~small
        blocks = np.concatenate([
            np.column_stack([blocks[split, 0], mids[split]]),
            np.column_stack([mids[split], blocks[split, 1]]),
        ])
    return _max_exact(index, pts[np.concatenate(leaves)], floor)

def _block_radii(pts: np.ndarray, blocks: np.ndarray, mids: np.ndarray) -> np.ndarray:
    """Largest distance from each block's middle sample to its other samples."""
    sizes = blocks[:, 1] - blocks[:, 0]
    starts = np.concatenate([[0], np.cumsum(sizes)[:-1]])
    idx = np.arange(sizes.sum()) - np.repeat(starts - blocks[:, 0], sizes)
    d = pts[idx] - pts[np.repeat(mids, sizes)]
    return np.maximum.reduceat(np.hypot(d[:, 0], d[:, 1]), starts)


def _exact_many(index: "_SegmentIndex", q: np.ndarray) -> np.ndarray:
    """Exact distances, widening k for points the nearest few do not certify."""
    best, low = index.bounds(q, 8)
    todo = np.flatnonzero(low < best)
    for k in (64, 512):
        if not len(todo):
            break
        b, lo = index.bounds(q[todo], k)
        best[todo] = np.minimum(best[todo], b)
        todo = todo[lo < best[todo]]
    for j in todo:
        best[j] = index.exact(q[j], best[j])
    return best


def _max_exact(index: "_SegmentIndex", q: np.ndarray, floor: float) -> float:
    """Largest exact distance over q, given a lower bound on it.

    Points whose upper bound falls below the floor cannot hold the maximum
    and are never certified.
    """
    best, low = index.bounds(q, 8)
    floor = max(floor, float(low.max()))
    done = low == best
    top = float(best[done].max()) if done.any() else 0.0
    todo = np.flatnonzero(~done & (best >= floor))
    for k in (64, 512):
        if not len(todo):
            break
        b, lo = index.bounds(q[todo], k)
        best[todo] = np.minimum(best[todo], b)
        floor = max(floor, float(lo.max()))
        sure = lo >= best[todo]
        if sure.any():
            top = max(top, float(best[todo[sure]].max()))
        todo = todo[~sure & (best[todo] >= floor)]
    for j in todo[np.argsort(-best[todo])]:
        if best[j] < top:
            break
        top = max(top, index.exact(q[j], best[j]))
    return top


def point_set_diameter(p: np.ndarray) -> float:
    """Largest pairwise distance in a planar point set (via the convex hull)."""
    p = np.asarray(p, dtype=float)
    if len(p) < 2:
        return 0.0
    if len(p) > 3:
        try:
            p = p[ConvexHull(p).vertices]
        except QhullError:
            # collinear: extremes along the direction of greatest spread
            d = p - p[0]
            far = p[np.argmax(np.hypot(d[:, 0], d[:, 1]))]
            e = far - p[0]
            proj = d @ e
            return float((proj.max() - proj.min()) / np.hypot(*e))
        if len(p) > 256:
            return _calipers(p)
    diff = p[:, None, :] - p[None, :, :]
    return float(np.hypot(diff[..., 0], diff[..., 1]).max())


def _calipers(h: np.ndarray) -> float:
    """Diameter of a convex polygon given counterclockwise, O(h log h).

    Each edge is paired with the vertex extreme along its inward normal;
    neighbours of that vertex are checked too, absorbing angle roundoff.
    """
    e = np.roll(h, -1, axis=0) - h
    phi = np.unwrap(np.arctan2(-e[:, 0], e[:, 1]))  # outward normal angles
    # vertex j is extreme for directions between the normals of edges j-1 and j
    psi = phi + np.pi
    m = len(h)
    base = phi[0]
    k = np.searchsorted(phi, base + np.mod(psi - base, 2 * np.pi), side="left")
    best = 0.0
    for off in (-1, 0, 1):
        a = np.mod(k + off, m)
        for v in (h, np.roll(h, -1, axis=0)):
            d = v - h[a]
            best = max(best, float(np.hypot(d[:, 0], d[:, 1]).max()))
    return best


@dataclass(frozen=True)
class ArcSelection:
    """One of the two arcs joining arclength positions on a curve.

    The arc runs forward (increasing s, wrapping for closed curves) from
    ``start`` for ``length``.
    """

    start: float
    length: float
    a: np.ndarray
    b: np.ndarray


def arc_index_ranges(curve: SampledCurve, start: float, length: float) -> list[tuple[int, int]]:
    """Half-open index ranges of the samples strictly inside the forward arc
    [start, start + length]; two ranges when a closed curve's arc wraps."""
    arc = curve.arclen
    end = start + length
    lo = int(np.searchsorted(arc, start, side="right"))
    if not curve.closed or end <= curve.total_length:
        hi = int(np.searchsorted(arc, end, side="left"))
        return [(lo, max(lo, hi))]
    hi = int(np.searchsorted(arc, end - curve.total_length, side="left"))
    return [(lo, len(arc)), (0, hi)]


def _arc_samples(curve: SampledCurve, start: float, length: float) -> np.ndarray:
    """Sample indices strictly inside the forward arc [start, start + length]."""
    ranges = arc_index_ranges(curve, start, length)
    return np.concatenate([np.arange(lo, hi) for lo, hi in ranges])


# arcs with more interior samples than this go through the hull tree
RAW_ARC_LIMIT = 4096


class HullTree:
    """Segment tree of convex hulls over blocks of consecutive samples.

    A convex function of w attains its max over a point set at a hull vertex,
    so the max over any index range only needs the hulls of O(log m) nodes
    plus the raw samples of two partial blocks.
    """

    def __init__(self, points: np.ndarray, leaf: int = 256):
        self.points = points
        self.leaf = leaf
        m = len(points)
        nblocks = -(-m // leaf)
        level = [_hull_vertices(points[i * leaf:(i + 1) * leaf]) for i in range(nblocks)]
        self.levels = [level]
        while len(level) > 1:
            nxt = []
            for i in range(0, len(level), 2):
                if i + 1 < len(level):
                    nxt.append(_hull_vertices(np.vstack([level[i], level[i + 1]])))
                else:
                    nxt.append(level[i])
            self.levels.append(nxt)
            level = nxt

    def candidates(self, lo: int, hi: int) -> np.ndarray:
        """Points whose hull equals the hull of samples lo..hi-1."""
        leaf = self.leaf
        bl, bh = -(-lo // leaf), hi // leaf
        if bl >= bh:
            return self.points[lo:hi]
        out = [self.points[lo:bl * leaf], self.points[bh * leaf:hi]]
        lvl = 0
        while bl < bh:
            if bl & 1:
                out.append(self.levels[lvl][bl])
                bl += 1
            if bh & 1:
                bh -= 1
                out.append(self.levels[lvl][bh])
            bl >>= 1
            bh >>= 1
            lvl += 1
        return np.vstack(out)


def _hull_vertices(p: np.ndarray) -> np.ndarray:
    if len(p) <= 8:
        return p
    try:
        return p[ConvexHull(p).vertices]
    except QhullError:
        # collinear block: the two extreme points span it
        d = p - p[0]
        axis = d[np.argmax(np.hypot(d[:, 0], d[:, 1]))]
        t = d @ axis
        return p[[int(np.argmin(t)), int(np.argmax(t))]]


_tree_cache: dict[int, tuple[SampledCurve, HullTree]] = {}


def hull_tree(curve: SampledCurve) -> HullTree:
    hit = _tree_cache.get(id(curve))
    if hit is None or hit[0] is not curve:
        if len(_tree_cache) > 8:
            _tree_cache.clear()
        hit = (curve, HullTree(curve.points))
        _tree_cache[id(curve)] = hit
    return hit[1]


class _AnchorCache:
    """Coarse anchor samples used to bound arc diameters from below."""

    def __init__(self, curve: SampledCurve, count: int = 64):
        L = curve.total_length
        self.s = (np.arange(count) + 0.5) * (L / count)
        self.p = curve.position(self.s)


_anchor_cache: dict[int, tuple[SampledCurve, _AnchorCache]] = {}


def _anchors(curve: SampledCurve) -> _AnchorCache:
    key = id(curve)
    hit = _anchor_cache.get(key)
    if hit is None or hit[0] is not curve:
        if len(_anchor_cache) > 32:
            _anchor_cache.clear()
        hit = (curve, _AnchorCache(curve))
        _anchor_cache[key] = hit
    return hit[1]


def _arc_diameter(curve, start, length, a, b) -> float:
    ranges = [(lo, hi) for lo, hi in arc_index_ranges(curve, start, length) if hi > lo]
    if sum(hi - lo for lo, hi in ranges) <= RAW_ARC_LIMIT:
        inner = [curve.points[lo:hi] for lo, hi in ranges]
    else:
        tree = hull_tree(curve)
        inner = [tree.candidates(lo, hi) for lo, hi in ranges]
    return point_set_diameter(np.vstack([a[None], *inner, b[None]]))


def select_arc(curve: SampledCurve, sa: float, sb: float) -> ArcSelection:
    """The arc between ``sa`` and ``sb`` with smaller diameter.

    Open curves have only one arc. For closed curves a tie in diameter
    (relative difference below 1e-12) goes to the shorter arc.
    """
    if sa == sb:
        raise DegenerateSubarcError("subarc endpoints coincide")
    L = curve.total_length
    if not curve.closed:
        if not (0 <= sa <= L and 0 <= sb <= L):
            raise CurveError("subarc endpoint outside the curve")
        lo, hi = min(sa, sb), max(sa, sb)
        pa, pb = curve.position([lo, hi])
        return ArcSelection(lo, hi - lo, pa, pb)
    sa, sb = float(np.mod(sa, L)), float(np.mod(sb, L))
    if sa == sb:
        raise DegenerateSubarcError("subarc endpoints coincide")
    pa, pb = curve.position([sa, sb])
    fwd = ArcSelection(sa, float(np.mod(sb - sa, L)), pa, pb)
    bwd = ArcSelection(sb, L - fwd.length, pb, pa)
    short, long_ = (fwd, bwd) if fwd.length <= bwd.length else (bwd, fwd)
    # cheap certificate: diam(short) <= length(short) < lower bound on diam(long)
    anc = _anchors(curve)
    rel = np.mod(anc.s - long_.start, L)
    inside = anc.p[rel < long_.length]
    probe = np.vstack([long_.a[None], inside, long_.b[None]])
    d = probe[:, None, :] - probe[None, :, :]
    long_lower = float(np.hypot(d[..., 0], d[..., 1]).max())
    if long_lower > short.length * (1 + 1e-12):
        return short
    d_short = _arc_diameter(curve, short.start, short.length, short.a, short.b)
    if long_lower > d_short * (1 + 1e-12):
        return short
    d_long = _arc_diameter(curve, long_.start, long_.length, long_.a, long_.b)
    if abs(d_short - d_long) <= 1e-12 * max(d_short, d_long):
        return short
    return short if d_short < d_long else long_


def subarc(curve: SampledCurve, a: float, b: float) -> SampledCurve:
    """The subarc between arclength positions ``a`` and ``b`` as an open curve."""
    sel = select_arc(curve, a, b)
    return arc_to_curve(curve, sel)


def arc_to_curve(curve: SampledCurve, sel: ArcSelection) -> SampledCurve:
    idx = _arc_samples(curve, sel.start, sel.length)
    pts = np.vstack([sel.a[None], curve.points[idx], sel.b[None]])
    seg = np.hypot(*np.diff(pts, axis=0).T)
    keep = np.concatenate(([True], seg > 0))
    if not keep[-1]:
        # the end point coincides with the last sample: keep the exact end
        keep[-1] = True
        keep[-2] = False
    return SampledCurve.from_points(pts[keep])
