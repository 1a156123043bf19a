"""Boundary of the non-divergence region and its plots.

For each real part on a grid the upper boundary ``Im = b(Re)`` is located by
bisection on the classification verdict. Only the upper half-plane is
stored; the region is symmetric under conjugation and emitters mirror it.

``im_bound`` encodes three situations:

* a finite nonnegative float: the region at this ``Re`` is ``|Im| <= b``;
* ``inf``: no bound was found below the search cap (unbounded);
* ``nan``: the point on the real axis already diverges (column outside).
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import TextIO
from xml.sax.saxutils import escape

import numpy as np

from .modes import DampingParams, is_nondivergent
from .spectral import GershgorinDisk

SEARCH_CAP = 1e6
BISECT_TOL = 1e-9


@dataclass(frozen=True)
class RegionCurve:
    re_grid: np.ndarray
    im_bound: np.ndarray
    disk: GershgorinDisk
    params: DampingParams

    def __len__(self) -> int:
        return len(self.re_grid)

    def disk_extent(self) -> np.ndarray:
        """Upper Im extent of the disk at each grid point; ``nan`` outside its span."""
        dx = self.re_grid - self.disk.center
        inside = np.abs(dx) <= self.disk.radius
        with np.errstate(invalid="ignore"):
            ext = np.sqrt(np.maximum(self.disk.radius ** 2 - dx ** 2, 0.0))
        return np.where(inside, ext, np.nan)

    def in_disk(self) -> np.ndarray:
        return np.abs(self.re_grid - self.disk.center) <= self.disk.radius

    def encloses_disk(self, tol: float = 1e-6) -> bool:
        """True when every sampled disk column fits under the boundary."""
        mask = self.in_disk()
        ext = self.disk_extent()[mask]
        bound = self.im_bound[mask]
        return bool(np.all(ext <= bound + tol))


def _initial_hi(re: np.ndarray, disk: GershgorinDisk) -> float:
    span = float(np.max(np.abs(re))) if re.size else 0.0
    return max(1.0, 2.0 * max(span, disk.radius))


def nondivergence_boundary(p: DampingParams, re_min: float, re_max: float, points: int,
                           disk: GershgorinDisk | None = None) -> RegionCurve:
    """Bisect ``Im`` in ``[0, hi]`` for every ``Re`` on an even grid.

    ``hi`` starts at twice the problem scale and doubles while the top is
    still non-divergent, up to ``SEARCH_CAP``.
    """
    if re_min > re_max:
        raise ValueError("re_min must not exceed re_max")
    if points < 2:
        raise ValueError("need at least two grid points")
    disk = disk or GershgorinDisk(0.0, 0.0)
    re = np.linspace(re_min, re_max, points)

    def ok(im):
        return np.asarray(is_nondivergent(re + 1j * im, p))

    bound = np.full(points, np.nan)
    active = ok(np.zeros(points))
    hi = np.full(points, _initial_hi(re, disk))
    growing = active & ok(hi)
    while growing.any():
        hi = np.where(growing, 2.0 * hi, hi)
        over = growing & (hi > SEARCH_CAP)
        bound[over] = np.inf
        active &= ~over
        growing &= ~over & ok(hi)

    lo = np.zeros(points)
    todo = active.copy()
    iterations = int(math.ceil(math.log2(max(hi.max(), 1.0) / BISECT_TOL))) + 1
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        good = ok(mid)
        lo = np.where(todo & good, mid, lo)
        hi = np.where(todo & ~good, mid, hi)
        todo &= (hi - lo) > BISECT_TOL
        if not todo.any():
            break
    bound[active] = lo[active]
    return RegionCurve(re, bound, disk, p)


def gershgorin_circle_points(disk: GershgorinDisk, points: int) -> list[complex]:
    if points < 4:
        raise ValueError("need at least four points")
    phi = np.linspace(0.0, np.pi, points)
    z = disk.center + disk.radius * np.exp(1j * phi)
    return [complex(v) for v in z]


def _fmt(x: float) -> str:
    if math.isinf(x):
        return ""
    return f"{x:.17g}"


def emit_region_csv(curve: RegionCurve, sink: TextIO) -> None:
    """Columns ``re, im_bound, in_disk``; unbounded as empty field, outside as ``nan``."""
    writer = csv.writer(sink, lineterminator="\n")
    writer.writerow(["re", "im_bound", "in_disk"])
    for re, b, inside in zip(curve.re_grid, curve.im_bound, curve.in_disk()):
        writer.writerow([_fmt(float(re)), _fmt(float(b)), int(inside)])


def read_region_csv(text: str | TextIO, params: DampingParams,
                    disk: GershgorinDisk) -> RegionCurve:
    stream = io.StringIO(text) if isinstance(text, str) else text
    rows = list(csv.reader(stream))
    if not rows or rows[0] != ["re", "im_bound", "in_disk"]:
        raise ValueError("not a region CSV")
    re = np.array([float(r[0]) for r in rows[1:]])
    bound = np.array([math.inf if r[1] == "" else float(r[1]) for r in rows[1:]])
    return RegionCurve(re, bound, disk, params)


# SVG layout, in pixels.
WIDTH, HEIGHT = 800, 600
PAD_LEFT, PAD_RIGHT, PAD_TOP, PAD_BOTTOM = 70, 30, 30, 60
REGION_FILL = "#3b6fd8"
DISK_COLOR = "#d62728"


def _nice_ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    span = hi - lo
    if span <= 0:
        return [lo]
    raw = span / count
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=raw)
    start = math.ceil(lo / step) * step
    ticks = []
    v = start
    while v <= hi + 1e-9 * span:
        ticks.append(0.0 if abs(v) < 1e-12 * span else v)
        v += step
    return ticks


def _px(v: float) -> str:
    return f"{v:.3f}"


def emit_region_svg(curve: RegionCurve, sink: TextIO, *, title: str | None = None) -> None:
    """Standalone 800x600 SVG: region filled blue, Gershgorin disk red, labelled axes."""
    if len(curve) == 0:
        raise ValueError("cannot plot an empty curve")
    re = curve.re_grid
    x_lo, x_hi = float(re[0]), float(re[-1])
    if x_hi == x_lo:
        x_lo, x_hi = x_lo - 1.0, x_hi + 1.0
    finite = curve.im_bound[np.isfinite(curve.im_bound)]
    cap = 3.0 * max(curve.disk.radius, 1.0)
    tallest = min(float(finite.max()), cap) if finite.size else 0.0
    y_top = 1.1 * max(curve.disk.radius, tallest) or 1.0

    plot_w = WIDTH - PAD_LEFT - PAD_RIGHT
    plot_h = HEIGHT - PAD_TOP - PAD_BOTTOM

    def sx(x):
        return PAD_LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w

    def sy(y):
        return PAD_TOP + (y_top - y) / (2 * y_top) * plot_h

    out = []
    out.append('<?xml version="1.0" encoding="UTF-8"?>')
    out.append(f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
               f'viewBox="0 0 {WIDTH} {HEIGHT}">')
    out.append(f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>')
    out.append(f'<clipPath id="plot"><rect x="{PAD_LEFT}" y="{PAD_TOP}" '
               f'width="{plot_w}" height="{plot_h}"/></clipPath>')

    # One polygon per contiguous run of columns that belong to the region.
    clipped = np.minimum(curve.im_bound, y_top)
    run: list[int] = []
    runs = []
    for k, b in enumerate(clipped):
        if np.isnan(b):
            if run:
                runs.append(run)
            run = []
        else:
            run.append(k)
    if run:
        runs.append(run)
    out.append('<g clip-path="url(#plot)">')
    for run in runs:
        upper = [(sx(re[k]), sy(clipped[k])) for k in run]
        lower = [(sx(re[k]), sy(-clipped[k])) for k in reversed(run)]
        pts = " ".join(f"{_px(x)},{_px(y)}" for x, y in upper + lower)
        out.append(f'<polygon class="region" points="{pts}" fill="{REGION_FILL}" '
                   f'fill-opacity="0.45" stroke="{REGION_FILL}" stroke-width="1"/>')

    cx, cy = sx(curve.disk.center), sy(0.0)
    rx = curve.disk.radius / (x_hi - x_lo) * plot_w
    ry = curve.disk.radius / (2 * y_top) * plot_h
    if curve.disk.radius > 0:
        out.append(f'<ellipse class="disk" cx="{_px(cx)}" cy="{_px(cy)}" rx="{_px(rx)}" '
                   f'ry="{_px(ry)}" fill="{DISK_COLOR}" fill-opacity="0.3" '
                   f'stroke="{DISK_COLOR}" stroke-width="2"/>')
    else:
        out.append(f'<circle class="disk" cx="{_px(cx)}" cy="{_px(cy)}" r="3" '
                   f'fill="{DISK_COLOR}"/>')
    out.append('</g>')

    # Axes along Im = 0 and Re = 0 when visible, otherwise along the frame.
    ax_y = sy(0.0)
    ax_x = sx(0.0) if x_lo <= 0.0 <= x_hi else PAD_LEFT
    out.append(f'<rect x="{PAD_LEFT}" y="{PAD_TOP}" width="{plot_w}" height="{plot_h}" '
               f'fill="none" stroke="black" stroke-width="1"/>')
    out.append(f'<line x1="{PAD_LEFT}" y1="{_px(ax_y)}" x2="{PAD_LEFT + plot_w}" '
               f'y2="{_px(ax_y)}" stroke="black" stroke-width="0.8"/>')
    out.append(f'<line x1="{_px(ax_x)}" y1="{PAD_TOP}" x2="{_px(ax_x)}" '
               f'y2="{PAD_TOP + plot_h}" stroke="black" stroke-width="0.8"/>')
    for t in _nice_ticks(x_lo, x_hi):
        x = sx(t)
        out.append(f'<line x1="{_px(x)}" y1="{PAD_TOP + plot_h}" x2="{_px(x)}" '
                   f'y2="{PAD_TOP + plot_h + 5}" stroke="black"/>')
        out.append(f'<text x="{_px(x)}" y="{PAD_TOP + plot_h + 20}" font-size="12" '
                   f'text-anchor="middle">{t:g}</text>')
    for t in _nice_ticks(-y_top, y_top):
        y = sy(t)
        out.append(f'<line x1="{PAD_LEFT - 5}" y1="{_px(y)}" x2="{PAD_LEFT}" '
                   f'y2="{_px(y)}" stroke="black"/>')
        out.append(f'<text x="{PAD_LEFT - 8}" y="{_px(y + 4)}" font-size="12" '
                   f'text-anchor="end">{t:g}</text>')
    out.append(f'<text x="{PAD_LEFT + plot_w / 2:g}" y="{HEIGHT - 15}" font-size="14" '
               f'text-anchor="middle">Re[λ]</text>')
    out.append(f'<text x="18" y="{PAD_TOP + plot_h / 2:g}" font-size="14" '
               f'text-anchor="middle" transform="rotate(-90 18 {PAD_TOP + plot_h / 2:g})">'
               f'Im[λ]</text>')

    p = curve.params
    lines = [f"γ₀ = {p.gamma0:.6g}", f"γ₁ = {p.gamma1:.6g}",
             f"d_max = {curve.disk.radius:.6g}"]
    if title:
        lines.insert(0, escape(title))
    lx, ly = PAD_LEFT + 12, PAD_TOP + 20
    out.append('<g class="legend" font-size="13">')
    out.append(f'<rect x="{lx - 6}" y="{ly - 15}" width="170" height="{18 * len(lines) + 46}" '
               f'fill="white" fill-opacity="0.85" stroke="#888"/>')
    for k, text in enumerate(lines):
        out.append(f'<text x="{lx}" y="{ly + 18 * k}">{text}</text>')
    base = ly + 18 * len(lines)
    out.append(f'<rect x="{lx}" y="{base - 10}" width="14" height="10" fill="{REGION_FILL}" '
               f'fill-opacity="0.45"/>')
    out.append(f'<text x="{lx + 20}" y="{base}">non-divergence region</text>')
    out.append(f'<rect x="{lx}" y="{base + 8}" width="14" height="10" fill="{DISK_COLOR}" '
               f'fill-opacity="0.3" stroke="{DISK_COLOR}"/>')
    out.append(f'<text x="{lx + 20}" y="{base + 18}">largest Gershgorin disk</text>')
    out.append('</g>')
    out.append('</svg>')
    sink.write("\n".join(out) + "\n")
