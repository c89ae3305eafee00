"""Regularity functionals: chord-arc ratio, conformality ratio, smoothness
modulus and uniform approximability, with the pair-scan drivers behind them.

All sups are over finite, seeded sample sets. Results carry the grid stride
and pair count so nobody mistakes them for continuous sups.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .geometry import (
    RAW_ARC_LIMIT,
    CurveError,
    DegenerateSubarcError,
    SampledCurve,
    SubarcRef,
    arc_index_ranges,
    arc_to_curve,
    hull_tree,
    select_arc,
)

UA_TOL = 1e-12


class EmptyScanError(CurveError):
    """No endpoint pair satisfied the chord bound."""


@dataclass(frozen=True)
class PairScanConfig:
    delta: float = math.inf
    pair_budget: int = 20_000
    seed: int = 0
    endpoint_grid: int = 1
    partners_per_anchor: int = 8

    def __post_init__(self):
        if self.pair_budget < 1:
            raise ValueError("pair_budget must be >= 1")
        if not self.delta > 0:
            raise ValueError("delta must be positive")
        if self.endpoint_grid < 1 or self.partners_per_anchor < 1:
            raise ValueError("endpoint_grid and partners_per_anchor must be >= 1")

    def with_delta(self, delta: float) -> "PairScanConfig":
        return PairScanConfig(delta, self.pair_budget, self.seed, self.endpoint_grid,
                              self.partners_per_anchor)


@dataclass
class ScanResult:
    sup_value: float
    argmax_pair: tuple[float, float] | None
    pairs_evaluated: int
    delta: float
    grid_stride: int
    exhaustive: bool
    # per-pair data, kept so callers can re-threshold by chord length
    chords: np.ndarray = field(default=None, repr=False)
    values: np.ndarray = field(default=None, repr=False)
    pairs: np.ndarray = field(default=None, repr=False)


# ---------------------------------------------------------------------------
# per-pair functionals


def chordarc_ratio(curve: SampledCurve, a: float, b: float) -> float:
    sel = select_arc(curve, a, b)
    chord = float(np.hypot(*(sel.a - sel.b)))
    if chord == 0:
        raise DegenerateSubarcError("subarc endpoints are the same point")
    return sel.length / chord


def _detour(a, b, w, chord) -> float:
    v = (np.hypot(w[:, 0] - a[0], w[:, 1] - a[1]) + np.hypot(w[:, 0] - b[0], w[:, 1] - b[1])) / chord
    return float(v.max())


def conformality_ratio(curve: SampledCurve, a: float, b: float) -> float:
    """max over samples w inside the subarc of (|a-w| + |w-b|) / |a-b|."""
    sel = select_arc(curve, a, b)
    chord = float(np.hypot(*(sel.a - sel.b)))
    if chord == 0:
        raise DegenerateSubarcError("subarc endpoints are the same point")
    ranges = [(lo, hi) for lo, hi in arc_index_ranges(curve, sel.start, sel.length) if hi > lo]
    count = sum(hi - lo for lo, hi in ranges)
    if count == 0:
        return 1.0
    if count <= RAW_ARC_LIMIT:
        w = np.vstack([curve.points[lo:hi] for lo, hi in ranges])
    else:
        tree = hull_tree(curve)
        w = np.vstack([tree.candidates(lo, hi) for lo, hi in ranges])
    return max(1.0, _detour(sel.a, sel.b, w, chord))


FUNCTIONALS = {"chordarc": chordarc_ratio, "conformality": conformality_ratio}


# ---------------------------------------------------------------------------
# pair scans


def _grid_indices(curve: SampledCurve, stride: int) -> np.ndarray:
    return np.arange(0, len(curve), stride)


def _pairs_exhaustive(pts: np.ndarray, delta: float) -> np.ndarray:
    G = len(pts)
    i, j = np.triu_indices(G, k=1)
    chord = np.hypot(pts[i, 0] - pts[j, 0], pts[i, 1] - pts[j, 1])
    keep = (chord <= delta) & (chord > 0)
    return np.column_stack([i[keep], j[keep]])


def _pairs_sampled(curve, grid, pts, cfg) -> np.ndarray:
    """Anchors stratified by arclength, partners drawn from each anchor's
    delta-ball.

    Strata are equal in arclength, not in sample count, so sparsely sampled
    stretches of the curve get their share of anchors. Every anchor also gets
    the ball member farthest from it along the curve, since that pair has the
    largest arc for its chord.
    """
    rng = np.random.default_rng(cfg.seed)
    P = cfg.partners_per_anchor
    n_anchor = max(1, min(len(grid), cfg.pair_budget // P))
    s = curve.arclen[grid]
    L = curve.total_length
    targets = (np.arange(n_anchor) + rng.random(n_anchor)) * (s[-1] / n_anchor)
    k = np.clip(np.searchsorted(s, targets), 1, len(s) - 1)
    k -= (targets - s[k - 1]) < (s[k] - targets)
    anchors = np.unique(k)
    tree = cKDTree(pts)
    everything = not math.isfinite(cfg.delta) or cfg.delta >= curve.diameter()
    out = []
    for i in anchors:
        if everything:
            ball = np.arange(len(grid))
        else:
            ball = np.asarray(tree.query_ball_point(pts[i], cfg.delta), dtype=np.int64)
        ball = ball[ball != i]
        if len(ball) == 0:
            continue
        sep = np.abs(s[ball] - s[i])
        if curve.closed:
            sep = np.minimum(sep, L - sep)
        chosen = {int(ball[np.argmax(sep)])}
        if len(ball) > 1:
            chosen.update(int(j) for j in rng.choice(ball, size=min(P - 1, len(ball)), replace=False))
        for j in sorted(chosen):
            out.append((min(i, j), max(i, j)))
    if not out:
        return np.zeros((0, 2), dtype=np.int64)
    pairs = np.unique(np.array(out, dtype=np.int64), axis=0)
    chord = np.hypot(*(pts[pairs[:, 0]] - pts[pairs[:, 1]]).T)
    return pairs[(chord > 0) & (chord <= cfg.delta)]


def scan_sup(curve: SampledCurve, which: str, cfg: PairScanConfig) -> ScanResult:
    """Sup of a ratio functional over grid endpoint pairs with chord <= delta.

    Exhaustive (every grid pair, lexicographic order) when grid^2 fits the
    pair budget; otherwise a seeded stratified sample.
    """
    if len(curve) < 3:
        raise CurveError("pair scans need at least 3 samples")
    fn = FUNCTIONALS[which]
    grid = _grid_indices(curve, cfg.endpoint_grid)
    pts = curve.points[grid]
    exhaustive = len(grid) ** 2 <= cfg.pair_budget
    gp = _pairs_exhaustive(pts, cfg.delta) if exhaustive else _pairs_sampled(curve, grid, pts, cfg)
    sa = curve.arclen[grid[gp[:, 0]]]
    sb = curve.arclen[grid[gp[:, 1]]]
    values = np.array([fn(curve, a, b) for a, b in zip(sa, sb)], dtype=float)
    chords = np.hypot(*(pts[gp[:, 0]] - pts[gp[:, 1]]).T)
    pairs = np.column_stack([sa, sb])
    if len(values) == 0:
        return ScanResult(math.nan, None, 0, cfg.delta, cfg.endpoint_grid, exhaustive,
                          chords, values, pairs)
    k = int(np.argmax(values))
    return ScanResult(float(values[k]), (float(sa[k]), float(sb[k])), len(values), cfg.delta,
                      cfg.endpoint_grid, exhaustive, chords, values, pairs)


def smoothness_modulus(curve: SampledCurve, delta: float, cfg: PairScanConfig) -> float:
    res = scan_sup(curve, "chordarc", cfg.with_delta(delta))
    if res.pairs_evaluated == 0:
        raise EmptyScanError(f"no grid pair with chord <= {delta:.6g}")
    return res.sup_value


# ---------------------------------------------------------------------------
# uniform approximability


@dataclass
class UAResult:
    n_min: int | None
    ratio: float  # arc length over chord sum, at n_min or at n_max
    mode: str
    epsilon: float
    n_max: int
    length: float

    @property
    def found(self) -> bool:
        return self.n_min is not None


def _ua_arc(curve: SampledCurve, sub: SubarcRef) -> SampledCurve:
    sub.check(curve)
    L = curve.total_length
    if curve.closed and sub.s_end - sub.s_start >= L:
        # the whole closed curve, opened at s_start
        s0 = sub.s_start
        ext, arc = curve.extended()
        k = int(np.searchsorted(arc, s0, side="right"))
        head = curve.position([s0])
        pts = np.vstack([head, ext[k:-1], ext[:k], head])
        seg = np.hypot(*np.diff(pts, axis=0).T)
        return SampledCurve.from_points(pts[np.concatenate(([True], seg > 0))])
    return arc_to_curve(curve, select_arc(curve, sub.s_start, sub.s_end))


def _satisfied(length: float, chord_sum: float, epsilon: float) -> bool:
    return (1 + epsilon) * chord_sum >= length * (1 - UA_TOL)


def equal_chord_sum(arc: SampledCurve, n: int) -> float:
    L = arc.total_length
    s = np.arange(n + 1) * (L / n)
    s[-1] = L
    _, _, knots, xs, ys = arc._extended
    x = np.interp(s, knots, xs)
    y = np.interp(s, knots, ys)
    return float(np.hypot(np.diff(x), np.diff(y)).sum())


def _ua_equal(arc: SampledCurve, epsilon: float, n_max: int) -> tuple[int | None, float]:
    L = arc.total_length
    S = 0.0
    for n in range(1, n_max + 1):
        S = equal_chord_sum(arc, n)
        if _satisfied(L, S, epsilon):
            return n, float(L / S)
    return None, float(L / S)


def _ua_dp(arc: SampledCurve, epsilon: float, n_max: int, max_vertices: int) -> tuple[int | None, float]:
    """Largest chord sum with at most n segments over the arc's vertices.

    A chord sum is convex in each partition point along a polyline segment,
    so vertex partitions dominate every partition, the equal one included.
    """
    p = arc.points
    m = len(p)
    if m > max_vertices:
        raise CurveError(f"dp mode limited to {max_vertices} vertices, arc has {m}")
    L = arc.total_length
    D = np.hypot(p[:, None, 0] - p[None, :, 0], p[:, None, 1] - p[None, :, 1])
    upper = np.triu(np.ones((m, m), dtype=bool), k=1)
    D = np.where(upper, D, -np.inf)
    best = D[0].copy()  # best chord sum 0 -> j with one segment
    S = best[-1]
    for n in range(1, n_max + 1):
        if n > 1:
            best = np.maximum(best, (best[:, None] + D).max(axis=0))
        S = best[-1]
        if _satisfied(L, S, epsilon):
            return n, float(L / S)
    return None, float(L / S)


def uniform_approx_n(
    curve: SampledCurve,
    sub: SubarcRef,
    epsilon: float,
    n_max: int,
    mode: str = "equal",
    dp_max_vertices: int = 3000,
) -> UAResult:
    """Smallest n <= n_max with (1 + epsilon) * chord sum >= arc length."""
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    arc = _ua_arc(curve, sub)
    if mode == "equal":
        n, ratio = _ua_equal(arc, epsilon, n_max)
    elif mode == "dp":
        n, ratio = _ua_dp(arc, epsilon, n_max, dp_max_vertices)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return UAResult(n, ratio, mode, epsilon, n_max, arc.total_length)


# ---------------------------------------------------------------------------
# classification


def default_deltas(curve: SampledCurve, lo: int = 3, hi: int = 12) -> list[float]:
    d = curve.diameter()
    return [d * 2.0**-j for j in range(lo, hi + 1)]


def ladder(results: list[ScanResult], deltas: list[float]) -> list[float | None]:
    """Sup at each delta over every pair evaluated anywhere on the ladder.

    Pooling makes the ladder non-increasing by construction: a pair admitted
    at a small delta is admitted at every larger one. Rungs below the grid
    spacing have no pairs and come back as None.
    """
    chords = np.concatenate([r.chords for r in results])
    values = np.concatenate([r.values for r in results])
    out = []
    for d in deltas:
        sel = values[chords <= d]
        out.append(float(sel.max()) if len(sel) else None)
    return out


def trend(sups: list[float | None], one_tol: float) -> dict:
    finite = [v for v in sups if v is not None]
    nonincreasing = all(b <= a for a, b in zip(finite, finite[1:]))
    return {
        "first": finite[0] if finite else None,
        "last": finite[-1] if finite else None,
        "nonincreasing": nonincreasing,
        "decreasing": nonincreasing and len(finite) > 1 and finite[-1] < finite[0],
        "toward_one": bool(finite) and nonincreasing and finite[-1] - 1 <= one_tol,
    }


def default_subarcs(curve: SampledCurve, parts: int = 4) -> list[SubarcRef]:
    L = curve.total_length
    out = [SubarcRef(0.0, L)]
    if parts > 1:
        out += [SubarcRef(i * L / parts, (i + 1) * L / parts) for i in range(parts)]
    return out


@dataclass
class ClassificationReport:
    chordarc: dict
    conformality: list[dict]
    smoothness: list[dict]
    ua: list[dict]
    consistency_flags: dict
    scan: dict

    def to_dict(self) -> dict:
        return asdict(self)


def classify(
    curve: SampledCurve,
    deltas: list[float] | None,
    epsilon: float,
    n_budget: int,
    cfg: PairScanConfig,
    subarcs: list[SubarcRef] | None = None,
    one_tol: float = 1e-3,
    ua_mode: str = "equal",
) -> ClassificationReport:
    """Report the four functionals and check the forward direction of
    "smooth => conformal and uniformly approximable" on this sample.

    The converse is only reported: a finite scan cannot decide a limit.
    """
    if deltas is None:
        deltas = default_deltas(curve)
    deltas = sorted(deltas, reverse=True)
    if len(deltas) < 2:
        raise ValueError("need at least two deltas")

    ca = scan_sup(curve, "chordarc", cfg.with_delta(math.inf))
    conf_runs = [scan_sup(curve, "conformality", cfg.with_delta(d)) for d in deltas]
    smooth_runs = [scan_sup(curve, "chordarc", cfg.with_delta(d)) for d in deltas]
    conf = ladder(conf_runs, deltas)
    smooth = ladder(smooth_runs + [ca], deltas)

    ua = []
    for sub in subarcs if subarcs is not None else default_subarcs(curve):
        r = uniform_approx_n(curve, sub, epsilon, n_budget, ua_mode)
        ua.append({"subarc": [sub.s_start, sub.s_end], "epsilon": epsilon,
                   "n_min": r.n_min, "mode": ua_mode, "ratio": r.ratio})

    t_conf, t_smooth = trend(conf, one_tol), trend(smooth, one_tol)
    ua_ok = all(u["n_min"] is not None for u in ua)
    premise = t_smooth["toward_one"]
    flags = {
        "smoothness_toward_one": premise,
        "conformality_toward_one": t_conf["toward_one"],
        "ua_all_found": ua_ok,
        # smooth => conformal and UA; vacuous when the premise fails
        "forward_holds": (not premise) or (t_conf["toward_one"] and ua_ok),
        # reported only
        "converse_premise": t_conf["toward_one"] and ua_ok,
        "conformality_trend": t_conf,
        "smoothness_trend": t_smooth,
    }
    return ClassificationReport(
        chordarc={"sup": ca.sup_value, "argmax": list(ca.argmax_pair) if ca.argmax_pair else None},
        conformality=[{"delta": d, "sup": v} for d, v in zip(deltas, conf)],
        smoothness=[{"delta": d, "sup": v} for d, v in zip(deltas, smooth)],
        ua=ua,
        consistency_flags=flags,
        scan={"grid_stride": cfg.endpoint_grid, "pair_budget": cfg.pair_budget, "seed": cfg.seed,
              "pairs_evaluated": ca.pairs_evaluated + sum(r.pairs_evaluated for r in conf_runs + smooth_runs),
              "exhaustive": ca.exhaustive},
    )
