"""Iterated bump refinement: gamma_n^(1) -> gamma_n^(k), and the closed curve gamma.

Level 1 for a given n is the graph of a single sin^2 bump of height
1/(n 2^n) over [2^-n, 2^-(n-1)]. Each refinement splits the previous level at
its inflection points, cuts every convex piece into equal parts of length
alpha * eps, and replaces each part by a bump of relative height sqrt(beta)
pointing to the convex side.
"""

from __future__ import annotations

import functools
import logging
import math
import os
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from .bump import FoldError, PartitionSpec, TooShortSubarc, partition_equal
from .geometry import (
    CurveError,
    SampledCurve,
    curvature_profile,
    inflection_points,
    rotate90,
)

log = logging.getLogger(__name__)

DEFAULT_BUDGET = 200_000_000
LEVEL1_SAMPLES = 1024


class ResourceError(RuntimeError):
    def __init__(self, projected: int, budget: int):
        super().__init__(f"projected sample count {projected} exceeds budget {budget}")
        self.projected = projected
        self.budget = budget


def default_budget() -> int:
    env = os.environ.get("ASYMCURVE_BUDGET")
    return int(float(env)) if env else DEFAULT_BUDGET


def beta(n: int, j: int) -> float:
    """Relative bump height squared used when refining level j."""
    return j / n**2


@dataclass
class LevelParams:
    """Everything needed to turn gamma_n^(k-1) into gamma_n^(k)."""

    n: int
    k: int
    beta: float
    K_prev: float
    eps_prev_prev: float
    eps: float
    sigma_bounds: np.ndarray
    partitions: list[PartitionSpec | None]
    signs: np.ndarray
    profile_step: float
    samples_per_bump: int = 16
    warnings: list[str] = field(default_factory=list)

    def __post_init__(self):
        if self.eps <= 0:
            raise ValueError("eps must be positive")
        if self.eps > self.eps_prev_prev / 2 * (1 + 1e-15):
            raise ValueError("eps must not exceed half the previous eps")
        if self.beta != (self.k - 1) / self.n**2:
            raise ValueError("beta must equal (k - 1) / n^2")

    @property
    def h(self) -> float:
        return math.sqrt(self.beta)

    @property
    def piece_count(self) -> int:
        return sum(p.N for p in self.partitions if p is not None)


@dataclass(frozen=True, eq=False)
class ParamMap:
    """Child arclength -> parent arclength, linear between child samples.

    ``piece_starts[i]`` is the child sample index where piece ``i`` begins
    (the last entry is the final sample). Pieces with ``piece_h == 0`` were
    passed through without a bump.
    """

    child_s: np.ndarray
    parent_s: np.ndarray
    piece_starts: np.ndarray
    piece_sides: np.ndarray
    piece_h: np.ndarray

    def __call__(self, s):
        return np.interp(s, self.child_s, self.parent_s)

    @property
    def piece_lengths_parent(self) -> np.ndarray:
        return np.diff(self.parent_s[self.piece_starts])

    def piece_of(self, idx) -> np.ndarray:
        """Piece index for child sample indices (a shared start goes right)."""
        return np.clip(np.searchsorted(self.piece_starts, idx, side="right") - 1, 0,
                       len(self.piece_starts) - 2)


@dataclass
class Level:
    curve: SampledCurve
    pmap: ParamMap | None = None
    params: LevelParams | None = None


@dataclass
class CurveStack:
    n: int
    levels: list[Level]
    samples_per_bump: int
    budget: int

    @property
    def depth(self) -> int:
        return len(self.levels)

    @property
    def top(self) -> SampledCurve:
        return self.levels[-1].curve

    def curve(self, j: int) -> SampledCurve:
        return self.levels[j - 1].curve

    def eps(self, j: int) -> float:
        """eps_n^(j) for the levels this stack actually refined (j < depth)."""
        if j == 0:
            return 2.0 ** -(self.n + 1)
        return self.levels[j].params.eps

    def total_samples(self) -> int:
        return sum(len(lv.curve) for lv in self.levels)

    def manifest(self) -> dict:
        ps = [lv.params for lv in self.levels[1:]]
        return {
            "n": self.n,
            "depth": self.depth,
            "beta": [p.beta for p in ps],
            "eps": [p.eps for p in ps],
            "K": [p.K_prev for p in ps],
            "piece_counts": [p.piece_count for p in ps],
            "lengths": [lv.curve.total_length for lv in self.levels],
            "samples": [len(lv.curve) for lv in self.levels],
            "samples_per_bump": self.samples_per_bump,
            "budget": self.budget,
            "warnings": [w for p in ps for w in p.warnings],
        }


def build_level1(n: int, samples: int = LEVEL1_SAMPLES) -> SampledCurve:
    """Graph of (1/(n 2^n)) sin^2(pi 2^n (t - 2^-n)) over [2^-n, 2^-(n-1)]."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if samples < 64:
        raise ValueError("level 1 needs at least 64 samples")
    a, b = 2.0**-n, 2.0 ** -(n - 1)
    t = np.linspace(a, b, samples + 1)
    y = np.sin(np.pi * 2.0**n * (t - a)) ** 2 / (n * 2.0**n)
    y[0] = y[-1] = 0.0
    return SampledCurve.from_points(np.column_stack([t, y]))


def level_params(
    prev: SampledCurve,
    n: int,
    k: int,
    eps_prev_prev: float,
    samples_per_bump: int = 16,
) -> LevelParams:
    """Curvature bound, eps, inflection split, partitions and sides for level k."""
    if k < 2:
        raise ValueError("k must be >= 2")
    step = eps_prev_prev / (2 * samples_per_bump)
    profile = curvature_profile(prev, min(step, prev.total_length / 64))
    K_prev = profile.sup_abs
    b = (k - 1) / n**2
    # a flat level puts no curvature limit on eps
    eps = min(math.sqrt(b) / K_prev if K_prev > 0 else math.inf, eps_prev_prev / 2)
    L = prev.total_length
    cuts = [c for c in inflection_points(profile) if 0 < c < L]
    bounds = np.array([0.0, *cuts, L])
    parts: list[PartitionSpec | None] = []
    signs = np.empty(len(bounds) - 1)
    warnings: list[str] = []
    which = np.searchsorted(bounds, profile.s, side="right") - 1
    for i in range(len(bounds) - 1):
        length = bounds[i + 1] - bounds[i]
        try:
            parts.append(partition_equal(length, eps))
        except TooShortSubarc:
            parts.append(None)
            msg = f"n={n} k={k}: subarc {i} of length {length:.3e} < eps; passed through"
            warnings.append(msg)
            log.warning(msg)
        sel = profile.kappa[which == i]
        mean = float(sel.mean()) if len(sel) else 0.0
        signs[i] = -1.0 if mean > 0 else 1.0
    return LevelParams(
        n=n,
        k=k,
        beta=b,
        K_prev=K_prev,
        eps_prev_prev=eps_prev_prev,
        eps=eps,
        sigma_bounds=bounds,
        partitions=parts,
        signs=signs,
        profile_step=profile.step,
        samples_per_bump=samples_per_bump,
        warnings=warnings,
    )


def _pieces(params: LevelParams):
    """Parent-arclength piece boundaries with their side and relative height."""
    starts, ends, sides, hs = [], [], [], []
    bnd = params.sigma_bounds
    for i, part in enumerate(params.partitions):
        a, b = bnd[i], bnd[i + 1]
        if part is None:
            starts.append([a]), ends.append([b]), sides.append([1.0]), hs.append([0.0])
            continue
        edges = a + (b - a) * np.arange(part.N + 1) / part.N
        edges[-1] = b
        starts.append(edges[:-1])
        ends.append(edges[1:])
        sides.append(np.full(part.N, params.signs[i]))
        hs.append(np.full(part.N, params.h))
    cat = np.concatenate
    return cat(starts), cat(ends), cat(sides), cat(hs)


def piece_sample_counts(params: LevelParams, lengths: np.ndarray) -> np.ndarray:
    step = params.eps / params.samples_per_bump
    return np.maximum(np.ceil(lengths / step * (1 - 1e-12)).astype(np.int64),
                      params.samples_per_bump)


def projected_samples(params: LevelParams) -> int:
    p0, p1, _, _ = _pieces(params)
    return int(piece_sample_counts(params, p1 - p0).sum()) + 1


def refine_level(prev: SampledCurve, params: LevelParams) -> tuple[SampledCurve, ParamMap]:
    """Replace every partition piece of ``prev`` by an embedded bump."""
    p0, p1, side, hrel = _pieces(params)
    lengths = p1 - p0
    counts = piece_sample_counts(params, lengths)
    offsets = np.concatenate(([0], np.cumsum(counts)))
    total = int(offsets[-1]) + 1
    pid = np.repeat(np.arange(len(counts)), counts)
    local = np.arange(total - 1) - offsets[pid]
    u = np.append(local / counts[pid], 1.0)
    pid = np.append(pid, len(counts) - 1)
    S = p0[pid] + lengths[pid] * u
    S[-1] = prev.total_length

    spline = CubicSpline(prev.arclen, prev.points, axis=0)
    P = spline(S)
    d1 = spline(S, 1)
    d2 = spline(S, 2)
    speed = np.hypot(d1[:, 0], d1[:, 1])
    normal = rotate90(d1 / speed[:, None])
    kappa = (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0]) / speed**3

    fhat = hrel[pid] * np.sin(np.pi * u) ** 2
    fhat[-1] = 0.0
    # normalized piece: curvature kappa * l, offset fhat
    lin = 1.0 - side[pid] * kappa * lengths[pid] * fhat
    bad = np.flatnonzero(lin <= 0)
    if len(bad):
        j = int(bad[0])
        raise FoldError(
            f"level {params.k}: piece {int(pid[j])} folds at parent s={S[j]:.6g}",
            s=float(S[j]),
            piece=int(pid[j]),
        )
    child = P + (side[pid] * lengths[pid] * fhat)[:, None] * normal
    child[0] = prev.points[0]
    child[-1] = prev.points[-1]
    curve = SampledCurve.from_points(child)
    starts = np.append(offsets[:-1], total - 1)
    pmap = ParamMap(
        child_s=np.array(curve.arclen),
        parent_s=S,
        piece_starts=starts,
        piece_sides=side,
        piece_h=hrel,
    )
    return curve, pmap


def build_gamma_n(
    n: int,
    depth: int,
    samples_per_bump: int = 16,
    budget: int | None = None,
    level1_samples: int = LEVEL1_SAMPLES,
) -> CurveStack:
    """Levels 1..depth of gamma_n with the projection maps between them."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if not (1 <= depth <= max(n, 1)):
        raise ValueError(f"depth must lie in [1, n]; got depth={depth}, n={n}")
    if budget is None:
        budget = default_budget()
    lv1 = build_level1(n, level1_samples)
    levels = [Level(lv1)]
    used = len(lv1)
    eps_pp = 2.0 ** -(n + 1)
    for k in range(2, depth + 1):
        prev = levels[-1].curve
        params = level_params(prev, n, k, eps_pp, samples_per_bump)
        projected = used + projected_samples(params)
        if projected > budget:
            raise ResourceError(projected, budget)
        child, pmap = refine_level(prev, params)
        levels.append(Level(child, pmap, params))
        used += len(child)
        ratio = child.total_length / prev.total_length
        if not (1 + 0.95 * params.beta <= ratio <= 1 + 6 * params.beta):
            msg = f"n={n} k={k}: length ratio {ratio:.6f} outside the expected band"
            params.warnings.append(msg)
            log.warning(msg)
        eps_pp = params.eps
    return CurveStack(n=n, levels=levels, samples_per_bump=samples_per_bump, budget=budget)


@functools.lru_cache(maxsize=16)
def cached_gamma_n(n: int, depth: int, samples_per_bump: int = 16,
                   budget: int = DEFAULT_BUDGET) -> CurveStack:
    return build_gamma_n(n, depth, samples_per_bump, budget)


def project_to_level(stack: CurveStack, s, target: int, source: int | None = None):
    """Compose projection maps from level ``source`` (default top) down to ``target``."""
    top = stack.depth if source is None else source
    if not (1 <= target <= top <= stack.depth):
        raise ValueError(f"target level {target} outside [1, {top}]")
    out = np.asarray(s, dtype=float)
    for j in range(top, target, -1):
        out = stack.levels[j - 1].pmap(out)
    return out


# ---------------------------------------------------------------------------
# the closed curve


@dataclass
class Component:
    name: str
    s_start: float
    s_end: float


@dataclass
class GammaAssembly:
    curve: SampledCurve
    components: list[Component]
    stacks: dict[int, CurveStack]
    n_max: int
    depth_cap: int

    def component(self, name: str) -> Component:
        for c in self.components:
            if c.name == name:
                return c
        raise KeyError(name)

    def m_point(self, n: int) -> float:
        """Arclength of M_n = (2^-n, 0) on the assembled curve (1 <= n <= n_max)."""
        return self.component(f"gamma_{n}").s_start


def _semicircle(center, r, theta0, theta1, count):
    th = np.linspace(theta0, theta1, count + 1)
    pts = np.column_stack([center[0] + r * np.cos(th), center[1] + r * np.sin(th)])
    return pts


def assemble_gamma_parts(
    n_max: int,
    depth_cap: int,
    samples_per_bump: int = 16,
    budget: int | None = None,
    cap_samples: int = 2048,
    tail_samples: int = 64,
) -> GammaAssembly:
    """Top boundary from the origin to (1, 0), then C3, C2, C1 back to the origin."""
    if n_max < 2:
        raise ValueError("n_max must be >= 2")
    if budget is None:
        budget = default_budget()
    pieces: list[tuple[str, np.ndarray]] = []
    x_tail = 2.0**-n_max
    tail = np.column_stack([np.linspace(0.0, x_tail, tail_samples + 1), np.zeros(tail_samples + 1)])
    tail[-1, 0] = x_tail
    pieces.append(("tail", tail))
    stacks = {}
    used = 0
    for n in range(n_max, 0, -1):
        depth = min(n, depth_cap)
        st = cached_gamma_n(n, depth, samples_per_bump, budget)
        used += st.total_samples()
        if used > budget:
            raise ResourceError(used, budget)
        stacks[n] = st
        pieces.append((f"gamma_{n}", np.array(st.top.points)))
    c3 = _semicircle((1.0, -0.125), 0.125, np.pi / 2, -np.pi / 2, cap_samples)
    c3[0], c3[-1] = (1.0, 0.0), (1.0, -0.25)
    c2 = np.column_stack([np.linspace(1.0, 0.0, 2 * cap_samples + 1),
                          np.full(2 * cap_samples + 1, -0.25)])
    c1 = _semicircle((0.0, -0.125), 0.125, -np.pi / 2, -3 * np.pi / 2, cap_samples)
    c1[0], c1[-1] = (0.0, -0.25), (0.0, 0.0)
    pieces += [("C3", c3), ("C2", c2), ("C1", c1)]

    chunks = []
    for name, pts in pieces:
        if chunks:
            if not np.array_equal(chunks[-1][-1], pts[0]):
                raise CurveError(f"gap before component {name}")
            pts = pts[1:]
        chunks.append(pts)
    allpts = np.vstack(chunks)
    assert np.array_equal(allpts[0], allpts[-1])
    curve = SampledCurve.from_points(allpts[:-1], closed=True)

    comps = []
    idx = 0
    for name, pts in pieces:
        i0 = idx
        idx += len(pts) - 1
        s1 = curve.total_length if idx == len(curve) else float(curve.arclen[idx])
        comps.append(Component(name, float(curve.arclen[i0]), s1))
    return GammaAssembly(curve=curve, components=comps, stacks=stacks,
                         n_max=n_max, depth_cap=depth_cap)


def assemble_gamma(n_max: int, depth_cap: int, samples_per_bump: int = 16,
                   budget: int | None = None) -> SampledCurve:
    return assemble_gamma_parts(n_max, depth_cap, samples_per_bump, budget).curve


def tail_deviation_bound(n_max: int, terms: int = 60) -> float:
    """Bound on how far the omitted gamma_n (n > n_max) stray from the x-axis.

    Bump amplitude 1/(n 2^n) plus the cross-level deviation 4 eps_n^(1)/sqrt(n),
    with eps_n^(1) <= 2^-(n+2).
    """
    vals = [1 / (n * 2.0**n) + 4 * 2.0 ** -(n + 2) / math.sqrt(n)
            for n in range(n_max + 1, n_max + 1 + terms)]
    return max(vals)
