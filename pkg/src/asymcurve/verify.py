"""Numeric checks of every quantitative estimate behind the construction.

Each check returns one or more :class:`CheckReport`. Reports carry the bound,
the measured value and a signed margin (positive means room to spare), and
never timings, so two runs with the same config serialize identically.
"""

from __future__ import annotations

import hashlib
import json
import math
import traceback
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import CubicSpline

from . import io
from .bump import embed_bump, embedded_speed
from .construction import (
    GammaAssembly,
    assemble_gamma_parts,
    build_level1,
    cached_gamma_n,
    default_budget,
)
from .functionals import (
    PairScanConfig,
    classify,
    conformality_ratio,
    ladder,
    scan_sup,
)
from .geometry import SampledCurve, max_deviation, rotate90

E_FIFTH = math.exp(0.2)


@dataclass
class RunConfig:
    n: int = 5
    depth_cap: int = 5
    n_max: int = 5
    samples_per_bump: int = 16
    budget: int = field(default_factory=default_budget)
    seed: int = 0
    # delta ladder as powers of two times the curve diameter
    delta_exponents: tuple[int, int] = (3, 10)
    epsilon: float = 0.01
    pair_budget: int = 2000
    n_budget: int = 1000
    # multiplies the excess over 1 of the asymptotic-constant bounds
    slack: float = 1.5
    deviation_slack: float = 1.1
    level_slack: float = 0.95
    report: str | None = None

    def __post_init__(self):
        ints = (self.n, self.depth_cap, self.n_max, self.samples_per_bump, self.budget,
                self.pair_budget, self.n_budget)
        if min(ints) < 1 or self.seed < 0:
            raise ValueError("RunConfig counts must be positive")
        if not (self.epsilon > 0 and self.slack > 0 and self.deviation_slack > 0):
            raise ValueError("RunConfig tolerances must be positive")
        self.delta_exponents = tuple(self.delta_exponents)

    def digest(self) -> str:
        d = asdict(self)
        d.pop("report")
        blob = json.dumps(d, sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


@dataclass
class CheckReport:
    check_id: str
    paper_ref: str
    bound: float | list[float] | None
    measured: float | None
    margin: float | None
    passed: bool
    config_digest: str
    gating: bool = True
    status: str = "pass"
    detail: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["pass"] = d.pop("passed")
        return d


class Context:
    """Shared, lazily built curves for one suite run."""

    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.digest = cfg.digest()
        self._assembly: GammaAssembly | None = None

    def stack(self, n: int, depth: int | None = None):
        depth = n if depth is None else depth
        return cached_gamma_n(n, depth, self.cfg.samples_per_bump, self.cfg.budget)

    @property
    def assembly(self) -> GammaAssembly:
        if self._assembly is None:
            self._assembly = assemble_gamma_parts(
                self.cfg.n_max, self.cfg.depth_cap, self.cfg.samples_per_bump, self.cfg.budget)
        return self._assembly

    def scan_cfg(self, curve: SampledCurve, target_grid: int = 20_000) -> PairScanConfig:
        stride = max(1, len(curve) // target_grid)
        return PairScanConfig(pair_budget=self.cfg.pair_budget, seed=self.cfg.seed,
                              endpoint_grid=stride)

    def deltas(self, curve: SampledCurve) -> list[float]:
        lo, hi = self.cfg.delta_exponents
        d = curve.diameter()
        return [d * 2.0**-j for j in range(lo, hi + 1)]

    # report builders
    def upper(self, cid, ref, bound, measured, gating=True, strict=False, **detail):
        ok = measured < bound if strict else measured <= bound
        return CheckReport(cid, ref, bound, measured, bound - measured, bool(ok), self.digest,
                           gating, _status(ok, gating), detail)

    def lower(self, cid, ref, bound, measured, gating=True, **detail):
        ok = measured >= bound
        return CheckReport(cid, ref, bound, measured, measured - bound, bool(ok), self.digest,
                           gating, _status(ok, gating), detail)

    def within(self, cid, ref, lo, hi, measured, gating=True, **detail):
        ok = lo <= measured <= hi
        return CheckReport(cid, ref, [lo, hi], measured, min(measured - lo, hi - measured),
                           bool(ok), self.digest, gating, _status(ok, gating), detail)

    def slackened(self, raw: float) -> float:
        return 1 + self.cfg.slack * (raw - 1)


def _status(ok: bool, gating: bool) -> str:
    if ok:
        return "pass"
    return "fail" if gating else "advisory"


# ---------------------------------------------------------------------------
# fixtures


def unit_segment(samples: int = 20_001) -> SampledCurve:
    x = np.linspace(0.0, 1.0, samples)
    return SampledCurve.from_points(np.column_stack([x, np.zeros_like(x)]))


def unit_arc(kappa: float, samples: int = 20_001) -> SampledCurve:
    """Unit-length circular arc from the origin heading +x with signed curvature kappa."""
    s = np.linspace(0.0, 1.0, samples)
    # sin(ks)/k and (1 - cos(ks))/k via sinc, finite as k -> 0
    x = s * np.sinc(kappa * s / np.pi)
    y = 0.5 * kappa * s * s * np.sinc(kappa * s / (2 * np.pi)) ** 2
    pts = np.column_stack([x, y])
    return SampledCurve.from_points(pts)


def circle(samples: int = 4096, r: float = 1.0) -> SampledCurve:
    th = np.linspace(0, 2 * np.pi, samples, endpoint=False)
    return SampledCurve.from_points(np.column_stack([r * np.cos(th), r * np.sin(th)]), closed=True)


def ellipse(samples: int = 4096, a: float = 2.0, b: float = 1.0) -> SampledCurve:
    th = np.linspace(0, 2 * np.pi, samples, endpoint=False)
    return SampledCurve.from_points(np.column_stack([a * np.cos(th), b * np.sin(th)]), closed=True)


def segment(samples: int = 101) -> SampledCurve:
    x = np.linspace(0.0, 1.0, samples)
    return SampledCurve.from_points(np.column_stack([x, 0.5 * x]))


BUMP_CASES = [("segment", 0.0), ("arc", -0.5)]
BUMP_HEIGHTS = (0.01, 0.02, 0.05)


def _bump_case(kind: str, kappa: float, h: float):
    base = unit_segment() if kappa == 0 else unit_arc(kappa)
    emb = embed_bump(base, h, side=1)
    q, _ = quad(lambda t: embedded_speed(kappa, h, t), 0.0, 1.0, epsabs=1e-13, epsrel=1e-13)
    return base, emb, q


# ---------------------------------------------------------------------------
# checks


def check_L1(ctx: Context) -> list[CheckReport]:
    out = []
    for kind, kappa in BUMP_CASES:
        K = abs(kappa)
        for h in BUMP_HEIGHTS:
            _, emb, q = _bump_case(kind, kappa, h)
            poly = emb.total_length
            out.append(ctx.within(
                f"L1.{kind}.h={h}", "embedded bump length: 1 + h^2 <= l <= 1 + 4h^2 + Kh",
                1 + h * h, 1 + 4 * h * h + K * h, q, polyline_length=poly))
            out.append(ctx.upper(
                f"L1.{kind}.h={h}.quadrature", "polyline length agrees with the speed integral",
                1e-8, abs(poly - q)))
    return out


def check_L2(ctx: Context) -> list[CheckReport]:
    out = []
    for kind, kappa in BUMP_CASES:
        for h in BUMP_HEIGHTS:
            base, emb, _ = _bump_case(kind, kappa, h)
            out.append(ctx.upper(f"L2.{kind}.h={h}", "deviation of the bump from its base: D <= h",
                                 h + 1e-9, max_deviation(emb, base)))
    return out


def check_L3(ctx: Context) -> list[CheckReport]:
    n = ctx.cfg.n
    st = ctx.stack(n)
    out = []
    for k in range(1, st.depth):
        D = max_deviation(st.top, st.curve(k))
        summed = 2 * sum(st.eps(j) * math.sqrt(j / n**2) for j in range(k, st.depth))
        out.append(ctx.upper(
            f"L3.n={n}.k={k}", "cross-level deviation <= 2 sum eps_j sqrt(beta_j)",
            ctx.cfg.deviation_slack * summed, D, raw_bound=summed))
        coarse = 4 * st.eps(k) / math.sqrt(n)
        out.append(ctx.upper(f"L3.n={n}.k={k}.coarse", "cross-level deviation <= 4 eps_k / sqrt(n)",
                             coarse, D, gating=False))
    return out


def check_L4(ctx: Context) -> list[CheckReport]:
    """Arclength ratio between a bump and its projection onto the parent.

    Both arclengths are sums over consecutive samples, so the ratio over any
    pair inside a piece is at most the largest consecutive-sample ratio; the
    maximum over consecutive samples is therefore the exact sup over pairs.
    """
    n = ctx.cfg.n
    st = ctx.stack(n)
    out = []
    for c in range(2, st.depth + 1):
        lv = st.levels[c - 1]
        ratio = np.diff(lv.pmap.child_s) / np.diff(lv.pmap.parent_s)
        raw = 1 + 8 * lv.params.beta
        out.append(ctx.upper(f"L4.n={n}.level={c}", "projection arclength ratio <= 1 + 8 beta",
                             ctx.slackened(raw), float(ratio.max()), raw_bound=raw,
                             raw_margin=raw - float(ratio.max())))
    return out


def check_L5(ctx: Context, ns=range(8, 13), grid: int = 200) -> list[CheckReport]:
    """Detour ratio across level-1 bumps of different blocks."""
    ns = sorted(ns, reverse=True)
    chunks, labels = [], []
    for m in ns:
        pts = np.array(build_level1(m).points)
        if chunks:
            pts = pts[1:]
        chunks.append(pts)
        labels.append(np.full(len(pts), m))
    curve = SampledCurve.from_points(np.vstack(chunks))
    lab = np.concatenate(labels)
    idx = np.unique(np.linspace(0, len(curve) - 1, grid).round().astype(int))
    worst = None
    for a in range(len(idx)):
        for b in range(a + 1, len(idx)):
            i, j = idx[a], idx[b]
            r = conformality_ratio(curve, curve.arclen[i], curve.arclen[j])
            raw = 1 + math.pi / int(min(lab[i], lab[j]))
            slackness = raw - r
            if worst is None or slackness < worst[0]:
                worst = (slackness, r, raw, int(lab[i]), int(lab[j]))
    _, r, raw, n1, n2 = worst
    return [ctx.upper("L5", "level-1 detour ratio <= 1 + pi / min(n1, n2)", ctx.slackened(raw), r,
                      raw_bound=raw, raw_margin=raw - r, blocks=[n1, n2],
                      pairs=len(idx) * (len(idx) - 1) // 2)]


def check_L6(ctx: Context) -> list[CheckReport]:
    """Each bump, seen in the frame of its base at the piece start, stays
    under the line of slope 8 sqrt(beta)."""
    n = ctx.cfg.n
    st = ctx.stack(n)
    out = []
    for c in range(2, st.depth + 1):
        parent, lv = st.curve(c - 1), st.levels[c - 1]
        pm = lv.pmap
        starts = pm.piece_starts
        counts = np.diff(starts) + 1
        pid = np.repeat(np.arange(len(counts)), counts)
        idx = np.concatenate([np.arange(a, b + 1) for a, b in zip(starts[:-1], starts[1:])])
        bumped = pm.piece_h[pid] > 0
        s0 = pm.parent_s[starts[:-1]]
        ell = np.diff(pm.parent_s[starts])
        spline = CubicSpline(parent.arclen, parent.points, axis=0)
        T = spline(s0, 1)
        T /= np.hypot(T[:, 0], T[:, 1])[:, None]
        N = rotate90(T)
        rel = (lv.curve.points[idx] - lv.curve.points[starts[:-1]][pid]) / ell[pid][:, None]
        x = np.einsum("ij,ij->i", rel, T[pid])
        y = np.einsum("ij,ij->i", rel, N[pid]) * pm.piece_sides[pid]
        slope = 8 * math.sqrt(lv.params.beta)
        pos = (x > 0) & bumped
        excess = (y - slope * x)[pos]
        out.append(ctx.upper(
            f"L6.n={n}.level={c}", "bump graph over its chord: Y(t) <= 8 sqrt(beta) t",
            1e-9, float(excess.max()),
            max_slope_over_bound=float((y[pos] / x[pos]).max() / slope),
            graph=bool(np.all(np.diff(x)[np.diff(pid) == 0] > 0))))
    return out


def check_L7(ctx: Context, per_level: int = 400, points: int = 48) -> list[CheckReport]:
    n = ctx.cfg.n
    st = ctx.stack(n)
    rng = np.random.default_rng(ctx.cfg.seed)
    worst = 1.0
    where = None
    for c in range(2, st.depth + 1):
        lv = st.levels[c - 1]
        starts = lv.pmap.piece_starts
        npieces = len(starts) - 1
        if npieces < 2:
            continue
        first = np.arange(npieces - 1)
        if len(first) > per_level:
            first = np.sort(rng.choice(first, per_level, replace=False))
        s, P = lv.curve.arclen, lv.curve.points
        for p in first:
            lo, hi = starts[p], starts[p + 2]
            ii = np.unique(np.linspace(lo, hi, min(points, hi - lo + 1)).round().astype(int))
            ds = s[ii][None, :] - s[ii][:, None]
            dp = np.hypot(P[ii, 0][None, :] - P[ii, 0][:, None], P[ii, 1][None, :] - P[ii, 1][:, None])
            iu = np.triu_indices(len(ii), 1)
            r = float((ds[iu] / dp[iu]).max())
            if r > worst:
                worst, where = r, [c, int(p)]
    raw = 1 + 32 / math.sqrt(n)
    return [ctx.upper(f"L7.n={n}", "chord-arc ratio on adjacent bumps <= 1 + 32 / sqrt(n)",
                      ctx.slackened(raw), worst, raw_bound=raw, raw_margin=raw - worst,
                      level_piece=where)]


def check_L8(ctx: Context, ns=(4, 5)) -> list[CheckReport]:
    out = []
    for n in ns:
        top = ctx.stack(n).top
        res = scan_sup(top, "conformality", ctx.scan_cfg(top))
        raw = 1 + 45 / math.sqrt(n)
        out.append(ctx.upper(f"L8.n={n}", "detour ratio within one block <= 1 + 45 / sqrt(n)",
                             ctx.slackened(raw), res.sup_value, raw_bound=raw,
                             pairs=res.pairs_evaluated, grid_stride=res.grid_stride,
                             argmax=list(res.argmax_pair)))
    return out


def check_L9(ctx: Context, N: int = 4) -> list[CheckReport]:
    """Detour ratio on the union of blocks n >= N: the arc of the assembled
    curve from the origin to M_(N-1)."""
    asm = ctx.assembly
    if N - 1 < 1 or N > asm.n_max:
        raise ValueError(f"N={N} needs 2 <= N <= n_max")
    end = int(np.searchsorted(asm.curve.arclen, asm.m_point(N - 1)))
    part = SampledCurve.from_points(asm.curve.points[: end + 1])
    res = scan_sup(part, "conformality", ctx.scan_cfg(part))
    raw = 1 + 78 / math.sqrt(N)
    return [ctx.upper(f"L9.N={N}", "detour ratio on the union of blocks n >= N <= 1 + 78 / sqrt(N)",
                      ctx.slackened(raw), res.sup_value, raw_bound=raw, pairs=res.pairs_evaluated,
                      grid_stride=res.grid_stride)]


def check_L10(ctx: Context, ns=(4, 5)) -> list[CheckReport]:
    out = []
    for n in ns:
        st = ctx.stack(n)
        scaled = 2.0**n * st.top.total_length
        prod = math.prod(1 + k / n**2 for k in range(1, n))
        out.append(ctx.lower(f"L10.n={n}.witness", "2^n l(gamma_n) >= e^(1/5)", E_FIFTH, scaled))
        out.append(ctx.lower(f"L10.n={n}.product", "2^n l(gamma_n) >= prod (1 + k/n^2), 5% slack",
                             0.95 * prod, scaled, raw_bound=prod))
        out.append(ctx.upper(f"L10.n={n}.upper", "2^n l(gamma_n) <= 2 e^3", 2 * math.e**3, scaled))
    return out


def check_L11(ctx: Context) -> list[CheckReport]:
    curve = ctx.assembly.curve
    cfg = ctx.scan_cfg(curve, target_grid=160_000)
    deltas = ctx.deltas(curve)
    runs = [scan_sup(curve, "conformality", cfg.with_delta(d)) for d in deltas]
    sups = ladder(runs, deltas)
    finite = [v for v in sups if v is not None]
    rises = max([b - a for a, b in zip(finite, finite[1:])] + [0.0])
    ca = scan_sup(curve, "chordarc", cfg)
    bound = 8 * math.e**8
    return [
        ctx.upper("L11.conformality.nonincreasing", "detour sup does not grow as delta shrinks",
                  0.0, rises, ladder=[{"delta": d, "sup": v} for d, v in zip(deltas, sups)]),
        ctx.upper("L11.conformality.decrease", "detour sup drops across the ladder", 0.0,
                  finite[-1] - finite[0], strict=True),
        ctx.upper("L11.chordarc", "chord-arc constant <= 8 e^8", bound, ca.sup_value,
                  argmax=list(ca.argmax_pair), pairs=ca.pairs_evaluated),
        ctx.upper("L11.chordarc.empirical", "chord-arc constant <= 10 (expected scale)", 10.0,
                  ca.sup_value, gating=False),
    ]


def check_L12(ctx: Context) -> list[CheckReport]:
    """Smooth => conformal and uniformly approximable, on a fixture set."""
    eps = ctx.cfg.epsilon
    out = []
    fixtures = [("circle", circle()), ("ellipse", ellipse()), ("segment", segment()),
                ("gamma", ctx.assembly.curve)]
    for name, curve in fixtures:
        scfg = ctx.scan_cfg(curve, target_grid=160_000)
        deltas = [curve.diameter() * 2.0**-j for j in range(3, 13)]
        rep = classify(curve, deltas, eps, ctx.cfg.n_budget, scfg)
        flags = rep.consistency_flags
        out.append(CheckReport(
            f"L12.{name}", "smooth iff conformal and uniformly approximable (forward direction)",
            None, float(flags["forward_holds"]), None, bool(flags["forward_holds"]), ctx.digest,
            True, "pass" if flags["forward_holds"] else "fail",
            {"flags": flags, "ua": rep.ua, "chordarc": rep.chordarc}))
        if name == "circle":
            whole = rep.ua[0]["n_min"]
            ok = whole == 13 if eps == 0.01 else whole is not None
            out.append(CheckReport("L12.circle.ua", "pi / (n sin(pi/n)) <= 1 + eps first at n = 13",
                                   13.0, float(whole) if whole else None, 0.0 if ok else None,
                                   bool(ok), ctx.digest, True, "pass" if ok else "fail"))
        if name == "segment":
            top = max([rep.chordarc["sup"]] + [r["sup"] for r in rep.conformality + rep.smoothness
                                                if r["sup"] is not None])
            ns = [u["n_min"] for u in rep.ua]
            out.append(ctx.upper("L12.segment.sups", "all ratios equal 1 on a segment",
                                 1 + 1e-12, top))
            out.append(ctx.upper("L12.segment.ua", "a segment needs one piece", 1.0,
                                 float(max(n or math.inf for n in ns))))
        if name == "gamma":
            # pairs spanning a whole block exist at every delta above 2^-(n_max-1)
            floor_ = 2.0 ** -(ctx.cfg.n_max - 1)
            low = min(r["sup"] for r in rep.smoothness if r["delta"] >= floor_)
            out.append(ctx.lower("L12.gamma.not_smooth", "smoothness sup >= e^(1/5) at every delta",
                                 E_FIFTH, low))
    return out


CHECKS = {f"L{i}": globals()[f"check_L{i}"] for i in range(1, 13)}


def run_suite(suite: str, cfg: RunConfig) -> list[CheckReport]:
    ids = list(CHECKS) if suite == "all" else [s.strip() for s in suite.split(",")]
    unknown = [i for i in ids if i not in CHECKS]
    if unknown:
        raise ValueError(f"unknown checks: {unknown}")
    ctx = Context(cfg)
    reports = []
    for cid in ids:
        try:
            reports += CHECKS[cid](ctx)
        except Exception as exc:  # a broken check must not hide the others
            reports.append(CheckReport(cid, "", None, None, None, False, ctx.digest, True, "error",
                                       {"error": f"{type(exc).__name__}: {exc}",
                                        "trace": traceback.format_exc(limit=3)}))
    return reports


def exit_code(reports: list[CheckReport]) -> int:
    if any(r.status == "error" for r in reports):
        return 2
    if any(r.gating and not r.passed for r in reports):
        return 1
    return 0


def report_document(reports: list[CheckReport], cfg: RunConfig) -> dict:
    return {
        "config": asdict(cfg) | {"report": None},
        "config_digest": cfg.digest(),
        "reports": [r.to_dict() for r in reports],
        "summary": {
            "total": len(reports),
            "failed": [r.check_id for r in reports if r.status == "fail"],
            "errored": [r.check_id for r in reports if r.status == "error"],
            "advisory": [r.check_id for r in reports if r.status == "advisory"],
            "exit_code": exit_code(reports),
        },
    }


def write_report(reports, cfg: RunConfig, path) -> str:
    text = io.dumps(report_document(reports, cfg))
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    return text
