"""The sin^2 bump, its embedding along the normal of a base curve, and the
equal-length partition rule used by every refinement step."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import CurveError, SampledCurve, rotate90, sample_curvature


class FoldError(CurveError):
    """The normal offset would fold the embedded curve (1 - kappa * f <= 0)."""

    def __init__(self, message: str, s: float | None = None, piece: int | None = None):
        super().__init__(message)
        self.s = s
        self.piece = piece


class TooShortSubarc(CurveError):
    """A subarc is shorter than the partition length (N = 0)."""


@dataclass(frozen=True)
class BumpProfile:
    h: float

    def __post_init__(self):
        if self.h < 0:
            raise ValueError("bump height must be non-negative")

    def __call__(self, t):
        return bump_eval(self.h, t)


@dataclass(frozen=True)
class PartitionSpec:
    N: int
    alpha: float
    piece_length: float


def bump_eval(h: float, t):
    """Return ``(h sin^2(pi t), h pi sin(2 pi t))``; exact zeros at t = 0, 1."""
    t_arr = np.asarray(t, dtype=float)
    if np.any((t_arr < 0) | (t_arr > 1)):
        raise CurveError("bump parameter outside [0, 1]")
    value = h * np.sin(np.pi * t_arr) ** 2
    deriv = h * np.pi * np.sin(2 * np.pi * t_arr)
    ends = (t_arr == 0) | (t_arr == 1)
    value = np.where(ends, 0.0, value)
    deriv = np.where(ends, 0.0, deriv)
    if np.ndim(t) == 0:
        return float(value), float(deriv)
    return value, deriv


def embedded_speed(kappa, h: float, t):
    """Speed of the embedded bump: sqrt((1 - kappa f)^2 + f'^2)."""
    f, df = bump_eval(h, t)
    lin = 1.0 - np.asarray(kappa) * f
    if np.any(lin <= 0):
        raise FoldError("offset degeneracy: 1 - kappa * f_h <= 0")
    out = np.sqrt(lin**2 + df**2)
    return float(out) if np.ndim(out) == 0 else out


def base_frame(base: SampledCurve) -> tuple[np.ndarray, np.ndarray]:
    """Unit normals and Menger curvature at the samples of an open base curve.

    Interior tangents are central differences; the two ends are one-sided.
    """
    p = base.points
    d = np.empty_like(p)
    d[1:-1] = p[2:] - p[:-2]
    d[0] = p[1] - p[0]
    d[-1] = p[-1] - p[-2]
    t = d / np.hypot(d[:, 0], d[:, 1])[:, None]
    return rotate90(t), sample_curvature(base)


def embed_bump(base: SampledCurve, h: float, side: int = 1) -> SampledCurve:
    """Offset a unit-length base curve by ``side * f_h(s)`` along its normal.

    The output keeps the base's sample positions, so sample ``i`` of the
    result projects onto sample ``i`` of the base.
    """
    if base.closed:
        raise CurveError("embed_bump needs an open base curve")
    if side not in (1, -1):
        raise ValueError("side must be +1 or -1")
    L = base.total_length
    if abs(L - 1.0) > 1e-9:
        raise CurveError(f"base must have unit length, got {L}")
    if len(base) < 3:
        raise CurveError("base needs at least 3 samples")
    t = np.clip(base.arclen / L, 0.0, 1.0)
    t[-1] = 1.0
    f, _ = bump_eval(h, t)
    normal, kappa = base_frame(base)
    lin = 1.0 - side * kappa * f
    bad = np.flatnonzero(lin <= 0)
    if len(bad):
        s_bad = float(base.arclen[bad[0]])
        raise FoldError(f"embedding folds at s={s_bad:.6g}", s=s_bad)
    out = base.points + (side * f)[:, None] * normal
    out[0] = base.points[0]
    out[-1] = base.points[-1]
    return SampledCurve.from_points(out)


def partition_equal(length: float, epsilon: float) -> PartitionSpec:
    """Split ``length`` into N equal pieces of length alpha * epsilon, 1 <= alpha < 2."""
    if not (length > 0 and epsilon > 0):
        raise ValueError("length and epsilon must be positive")
    q = length / epsilon
    N = math.floor(q)
    if N == 0:
        raise TooShortSubarc(f"subarc length {length:.6g} < epsilon {epsilon:.6g}")
    # same quotient for N and alpha keeps 1 <= alpha < 2 under rounding
    return PartitionSpec(N=N, alpha=q / N, piece_length=length / N)
