"""Minimum constant damping that keeps every possible spectrum bounded.

All eigenvalues of a Laplacian with maximum out-degree ``d_max`` lie in the
disk ``|z - d_max| <= d_max``. If that whole disk sits inside the
non-divergence region, no network with that ``d_max`` can diverge. The
smallest ``gamma0`` achieving this for a given ``gamma1`` is

    sqrt(gamma1**2 d_max**2 + 2 d_max) - gamma1 d_max

which reduces to ``sqrt(2 d_max)`` for frequency-independent damping.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .modes import MARGIN_TOL, DampingParams, nondivergence_margin

CASE_ZERO_TOL = 1e-12


@dataclass(frozen=True)
class DesignResult:
    d_max: float
    gamma1: float
    gamma0_min: float
    case_label: str
    contained: bool


@dataclass(frozen=True)
class Containment:
    contained: bool
    worst_margin: float
    worst_point: complex


def min_gamma0(d_max: float, gamma1: float) -> float:
    if d_max < 0:
        raise ValueError(f"d_max must be nonnegative, got {d_max}")
    if gamma1 == 0:
        return math.sqrt(2.0 * d_max)
    g = gamma1 * d_max
    # sqrt(g^2 + 2d) - g, rewritten for g > 0 to avoid cancellation.
    if g > 0:
        return 2.0 * d_max / (math.hypot(g, math.sqrt(2.0 * d_max)) + g)
    return math.hypot(g, math.sqrt(2.0 * d_max)) - g


def conventional_min_gamma0(d_max: float) -> float:
    if d_max < 0:
        raise ValueError(f"d_max must be nonnegative, got {d_max}")
    return math.sqrt(2.0 * d_max)


def case_coefficient(d_max: float, p: DampingParams) -> float:
    """``gamma0 gamma1 + 1 + 2 gamma1**2 d_max``, the slope of the disk test."""
    return p.gamma0 * p.gamma1 + 1.0 + 2.0 * p.gamma1 ** 2 * d_max


def case_classify(d_max: float, p: DampingParams) -> str:
    """Label ``A`` (coefficient zero), ``B`` (positive) or ``C`` (negative)."""
    c = case_coefficient(d_max, p)
    if abs(c) <= CASE_ZERO_TOL:
        return "A"
    return "B" if c > 0 else "C"


def circle_points(d_max: float, samples: int) -> np.ndarray:
    """Upper half of the Gershgorin circle, ``d_max (1 + e^{i phi})`` for phi in [0, pi]."""
    phi = np.linspace(0.0, np.pi, samples)
    return d_max * (1.0 + np.exp(1j * phi))


def interior_points(d_max: float, m: int, *, seed: int | None = None) -> np.ndarray:
    """Cell-centred ``m x m`` grid over the upper half-disk bounding box, clipped to the disk.

    With ``seed`` each point is jittered uniformly inside its cell.
    """
    if d_max == 0 or m <= 0:
        return np.zeros(0, dtype=complex)
    offsets = (np.arange(m) + 0.5) / m
    x, y = np.meshgrid(offsets, offsets)
    if seed is not None:
        rng = np.random.default_rng(seed)
        x = x + (rng.random(x.shape) - 0.5) / m
        y = y + (rng.random(y.shape) - 0.5) / m
    z = d_max * (2.0 * x + 1j * y)
    z = z.ravel()
    return z[np.abs(z - d_max) <= d_max]


def disk_contained(d_max: float, p: DampingParams, samples: int = 4096, *,
                   interior: int | None = None, seed: int | None = None) -> Containment:
    """Check the non-divergence condition over the largest Gershgorin disk.

    ``samples`` points are placed on the upper boundary arc (conjugate
    symmetry covers the lower half) plus an ``interior x interior`` grid,
    ``interior`` defaulting to ``ceil(samples / 4)``.
    """
    if samples < 64:
        raise ValueError("need at least 64 boundary samples")
    if interior is None:
        interior = math.ceil(samples / 4)
    pts = np.concatenate([circle_points(d_max, samples),
                          interior_points(d_max, interior, seed=seed)])
    margins = np.asarray(nondivergence_margin(pts, p))
    k = int(np.argmin(margins))
    worst = float(margins[k])
    return Containment(worst >= -MARGIN_TOL, worst, complex(pts[k]))


def design_damping(d_max: float, gamma1: float, samples: int = 4096, *,
                   seed: int | None = None) -> DesignResult:
    g0 = min_gamma0(d_max, gamma1)
    p = DampingParams(g0, gamma1)
    check = disk_contained(d_max, p, samples, seed=seed)
    return DesignResult(d_max, gamma1, g0, case_classify(d_max, p), check.contained)
