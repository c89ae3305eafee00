import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from asymcurve import SampledCurve

settings.register_profile(
    "default", deadline=None, max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


def circle_curve(samples=4096, r=1.0, center=(0.0, 0.0)):
    th = np.linspace(0, 2 * np.pi, samples, endpoint=False)
    pts = np.column_stack([center[0] + r * np.cos(th), center[1] + r * np.sin(th)])
    return SampledCurve.from_points(pts, closed=True)


def segment_curve(samples=101, p=(0.0, 0.0), q=(1.0, 0.0)):
    t = np.linspace(0.0, 1.0, samples)[:, None]
    return SampledCurve.from_points((1 - t) * np.array(p) + t * np.array(q))


def graph_curve(f, samples=20001, a=0.0, b=1.0):
    t = np.linspace(a, b, samples)
    return SampledCurve.from_points(np.column_stack([t, f(t)]))


@pytest.fixture
def unit_circle():
    return circle_curve()


@pytest.fixture
def unit_segment():
    return segment_curve()


# one line per acceptance criterion, filled in by test_acceptance
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, msg = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {msg}")
