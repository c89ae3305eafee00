"""Desk-scale acceptance witnesses, one test per criterion.

Run with ``pytest tests/test_acceptance.py``; a pass/fail line per criterion
is printed in the terminal summary. The full verify suite runs once per module
and its reports are shared by the criteria that map onto checks.
"""

import math
import resource
import subprocess
import sys
import time
from contextlib import contextmanager

import numpy as np
import pytest

from asymcurve import PairScanConfig, SampledCurve, SubarcRef, build_gamma_n, scan_sup, uniform_approx_n
from asymcurve.construction import assemble_gamma_parts
from asymcurve.verify import RunConfig, run_suite, write_report

from conftest import ACCEPTANCE, circle_curve, segment_curve
from test_functionals import brute_scan, ellipse_curve


@contextmanager
def criterion(k):
    try:
        yield
    except BaseException as exc:
        ACCEPTANCE[k] = (False, f"{type(exc).__name__}: {str(exc).splitlines()[0] if str(exc) else ''}")
        raise


def record(k, msg):
    ACCEPTANCE[k] = (True, msg)


def assert_reports(reports, prefix):
    picked = [r for r in reports if r.check_id.startswith(prefix) and r.gating]
    assert picked, f"no gating reports under {prefix}"
    bad = [(r.check_id, r.measured, r.bound, r.status) for r in picked if r.status != "pass"]
    assert not bad, bad
    return picked


@pytest.fixture(scope="module")
def suite():
    cfg = RunConfig()
    t0 = time.perf_counter()
    reports = run_suite("all", cfg)
    return cfg, reports, time.perf_counter() - t0


def test_criterion_01_length_sandwich():
    with criterion(1):
        t0 = time.perf_counter()
        reports = run_suite("L1", RunConfig())
        dt = time.perf_counter() - t0
        picked = assert_reports(reports, "L1.")
        assert len(picked) == 12
        assert dt < 1.0, f"took {dt:.2f} s"
        quad_err = max(r.measured for r in picked if r.check_id.endswith("quadrature"))
        record(1, f"6 cases inside [1+h^2, 1+4h^2+Kh], quadrature gap {quad_err:.1e}, {dt:.2f} s")


def test_criterion_02_bump_deviation():
    with criterion(2):
        t0 = time.perf_counter()
        reports = run_suite("L2", RunConfig())
        dt = time.perf_counter() - t0
        picked = assert_reports(reports, "L2.")
        assert len(picked) == 6
        assert dt < 1.0, f"took {dt:.2f} s"
        worst = min(r.margin for r in picked)
        record(2, f"D <= h + 1e-9 on 6 cases, smallest margin {worst:.2e}, {dt:.2f} s")


def test_criterion_03_level_ratios():
    with criterion(3):
        t0 = time.perf_counter()
        lines = []
        for n in (4, 5):
            st = build_gamma_n(n, n)
            lengths = [lv.curve.total_length for lv in st.levels]
            for k in range(2, n + 1):
                beta = (k - 1) / n**2
                r = lengths[k - 1] / lengths[k - 2]
                assert 1 + 0.95 * beta <= r <= 1 + 6 * beta, (n, k, r, beta)
                lines.append(f"{(r - 1) / beta:.2f}")
        dt = time.perf_counter() - t0
        # ru_maxrss is in KiB on Linux and covers the whole test process
        peak = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss / 2**20
        assert dt < 300, f"took {dt:.0f} s"
        assert peak < 2.0, f"peak RSS {peak:.2f} GiB"
        record(3, f"(ratio-1)/beta = {', '.join(lines)}; {dt:.1f} s, peak RSS {peak:.2f} GiB")


def test_criterion_04_length_witness(suite):
    with criterion(4):
        picked = assert_reports(suite[1], "L10.")
        w = {r.check_id: r.measured for r in picked if r.check_id.endswith("witness")}
        assert set(w) == {"L10.n=4.witness", "L10.n=5.witness"}
        assert all(math.exp(0.2) <= v <= 2 * math.e**3 for v in w.values())
        record(4, "2^n l = " + ", ".join(f"{v:.4f}" for v in w.values()) + " in [e^(1/5), 2e^3]")


def test_criterion_05_cross_level_deviation(suite):
    with criterion(5):
        picked = assert_reports(suite[1], "L3.n=5.")
        assert len(picked) == 4
        coarse = [r for r in suite[1] if r.check_id.startswith("L3.n=5.") and not r.gating]
        ratios = [r.measured / r.detail["raw_bound"] for r in picked]
        record(5, f"D / summed bound = {', '.join(f'{x:.3f}' for x in ratios)}; coarse bound "
                  f"{sum(r.passed for r in coarse)}/{len(coarse)} held")


def test_criterion_06_conformality(suite):
    with criterion(6):
        l8 = assert_reports(suite[1], "L8.")
        assert [r.check_id for r in l8] == ["L8.n=4", "L8.n=5"]
        for r in l8:
            assert r.measured <= r.detail["raw_bound"]
        l11 = assert_reports(suite[1], "L11.conformality")
        ladder = [x["sup"] for x in l11[0].detail["ladder"]]
        record(6, f"block sups {l8[0].measured:.3f}, {l8[1].measured:.3f}; ladder "
                  f"{ladder[0]:.3f} -> {ladder[-1]:.3f}, non-increasing")


def test_criterion_07_chordarc(suite):
    with criterion(7):
        (r,) = assert_reports(suite[1], "L11.chordarc")
        emp = next(x for x in suite[1] if x.check_id == "L11.chordarc.empirical")
        assert r.measured <= 8 * math.e**8
        record(7, f"chord-arc sup {r.measured:.3f} <= 8e^8; <= 10: {emp.status}")


def test_criterion_08_uniform_approximability():
    with criterion(8):
        seg = segment_curve(2001)
        assert uniform_approx_n(seg, SubarcRef(0, 1), 0.01, 5).n_min == 1
        c = circle_curve(4096)
        assert uniform_approx_n(c, SubarcRef(0, c.total_length), 0.01, 100).n_min == 13
        asm = assemble_gamma_parts(5, 5)
        g = asm.curve
        # budgets sit above the known counts for m = 3, 4; m = 5 only has
        # to be shown to need more pieces than m = 4
        found = []
        for m, budget in ((3, 5000), (4, 40_000), (5, None)):
            comp = asm.component(f"gamma_{m}")
            sub = SubarcRef(comp.s_start, comp.s_end)
            res = uniform_approx_n(g, sub, 0.05, budget or found[-1])
            found.append(res.n_min)
        assert found[0] is not None and found[1] is not None
        assert found[0] < found[1]
        # None at m = 5 means no n <= found[1] works, i.e. strictly more
        assert found[2] is None or found[2] > found[1]
        record(8, f"segment 1, circle 13; n_min for m=3,4,5: {found[0]}, {found[1]}, "
                  f"{'> ' + str(found[1]) if found[2] is None else found[2]}")


def test_criterion_09_slope_bound(suite):
    with criterion(9):
        picked = assert_reports(suite[1], "L6.n=5.")
        assert len(picked) == 4
        worst = max(r.detail["max_slope_over_bound"] for r in picked)
        record(9, f"largest Y/(8 sqrt(beta) t) = {worst:.3f} over levels 2..5")


def test_criterion_10_projection_ratio(suite):
    with criterion(10):
        picked = assert_reports(suite[1], "L4.n=5.")
        assert len(picked) == 4
        raw = ", ".join(f"{r.detail['raw_margin']:+.3f}" for r in picked)
        record(10, f"ratio <= 1 + 8 beta x 1.5 on levels 2..5; raw margins {raw}")


def test_criterion_11_oracles():
    with criterion(11):
        rng = np.random.default_rng(1)
        walk = SampledCurve.from_points(np.cumsum(rng.normal(size=(120, 2)), axis=0) * 0.05)
        curves = (walk, circle_curve(97), ellipse_curve(150), circle_curve(300))
        compared = 0
        for curve in curves:
            for which in ("chordarc", "conformality"):
                for delta in (math.inf, 0.3):
                    res = scan_sup(curve, which, PairScanConfig(delta=delta, pair_budget=10**6))
                    assert res.exhaustive
                    best, arg = brute_scan(curve, which, delta)
                    assert res.sup_value == best and res.argmax_pair == arg
                    compared += 1

        rng = np.random.default_rng(11)
        circ = circle_curve(4096)
        gamma = assemble_gamma_parts(5, 5).curve
        counts = {}
        for name, curve, eps in (("circle", circ, 0.01), ("gamma", gamma, 0.05)):
            found = 0
            for _ in range(100):
                if name == "circle":
                    a = rng.uniform(0, curve.total_length)
                    # at most 40% of the circle, inside the dp vertex limit
                    a = rng.uniform(0, 0.6) * curve.total_length
                    b = a + rng.uniform(0.01, 0.4) * curve.total_length
                else:
                    # at most 1000 vertices, inside the dp vertex limit
                    i = int(rng.integers(0, len(curve) - 1001))
                    j = i + int(rng.integers(2, 1000))
                    a, b = curve.arclen[i], curve.arclen[j]
                sub = SubarcRef(float(a), float(b))
                eq = uniform_approx_n(curve, sub, eps, 200, "equal")
                dp = uniform_approx_n(curve, sub, eps, 200, "dp", dp_max_vertices=2000)
                if eq.found:
                    assert dp.found and dp.n_min <= eq.n_min, (name, a, b)
                    found += 1
                elif not dp.found:
                    # both searches ran to n = 200; compare the chord sums there
                    assert dp.ratio <= eq.ratio * (1 + 1e-12), (name, a, b)
            counts[name] = found
        record(11, f"{compared} exhaustive scans bitwise equal to brute force; dp <= equal on "
                   f"100+100 subarcs ({counts['circle']}, {counts['gamma']} with equal found)")


def test_criterion_12_determinism(suite, tmp_path):
    with criterion(12):
        cfg, reports, dt = suite
        first = write_report(reports, cfg, None).encode()
        path = tmp_path / "again.json"
        proc = subprocess.run(
            [sys.executable, "-m", "asymcurve", "verify", "--suite", "all", "--report", str(path)],
            capture_output=True, text=True, timeout=900)
        assert proc.returncode == 0, proc.stderr[-2000:]
        second = path.read_bytes()
        assert first == second, "report JSON differs between runs"
        record(12, f"in-process and subprocess reports identical ({len(first)} bytes); "
                   f"suite took {dt:.0f} s, exit 0")
