"""Per-mode damping, solution exponents and divergence classification.

Each oscillation mode obeys ``a'' + gamma a' + lambda a = 0`` with the
frequency-dependent damping ``gamma = gamma0 + gamma1 * lambda``. Writing
``lambda - (gamma/2)**2 = r exp(i theta)`` the two exponents are
``s = -gamma/2 +- i sqrt(r) exp(i theta/2)`` and the mode stays bounded iff

    (gamma0 + gamma1 Re lambda) / (2 sqrt(r)) >= |sin(theta/2)|.

The functions here accept scalars or numpy arrays; scalar input gives
Python scalars back.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass
from typing import Sequence, TextIO

import numpy as np

from .spectral import Spectrum

#: Absolute width of the marginal band; margins inside it count as zero.
MARGIN_TOL = 1e-12
#: Relative threshold on ``r`` below which the two exponents are treated as coincident.
DEGENERATE_RTOL = 1e-12


class NegativeDampingWarning(UserWarning):
    """Re[gamma] < 0: the model's standing assumption is violated."""


@dataclass(frozen=True)
class DampingParams:
    gamma0: float
    gamma1: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.gamma0) and math.isfinite(self.gamma1)):
            raise ValueError("damping parameters must be finite")
        if self.gamma0 < 0:
            raise ValueError(f"gamma0 must be nonnegative, got {self.gamma0}")


@dataclass(frozen=True)
class DampingSweep:
    """Array-valued parameters, one pair per ``lambda``, for vectorised sweeps.

    Accepted anywhere a :class:`DampingParams` is, except ``classify_mode``.
    """

    gamma0: np.ndarray
    gamma1: np.ndarray

    def __post_init__(self):
        g0, g1 = np.broadcast_arrays(np.asarray(self.gamma0, dtype=float),
                                     np.asarray(self.gamma1, dtype=float))
        if not (np.all(np.isfinite(g0)) and np.all(np.isfinite(g1))):
            raise ValueError("damping parameters must be finite")
        if np.any(g0 < 0):
            raise ValueError("gamma0 must be nonnegative")
        object.__setattr__(self, "gamma0", g0)
        object.__setattr__(self, "gamma1", g1)


@dataclass(frozen=True)
class ModeReport:
    lam: complex
    gamma: complex
    r: float
    theta: float
    exponent_plus: complex
    exponent_minus: complex
    max_real_exponent: float
    divergent: bool
    margin: float
    degenerate: bool = False

    @property
    def marginal(self) -> bool:
        return self.margin == 0.0

    def as_dict(self) -> dict:
        return {
            "re_lambda": self.lam.real,
            "im_lambda": self.lam.imag,
            "re_gamma": self.gamma.real,
            "im_gamma": self.gamma.imag,
            "r": self.r,
            "theta": self.theta,
            "max_re_exponent": self.max_real_exponent,
            "margin": self.margin,
            "divergent": self.divergent,
            "degenerate": self.degenerate,
        }


def _unwrap(x, kind=complex):
    return kind(x) if np.ndim(x) == 0 else x


def damping_of(lam, p: DampingParams, *, warn: bool = True):
    """``gamma0 + gamma1 * lambda`` split as (gamma0 + gamma1 Re) + i gamma1 Im."""
    lam = np.asarray(lam, dtype=complex)
    gamma = (p.gamma0 + p.gamma1 * lam.real) + 1j * (p.gamma1 * lam.imag)
    if warn and np.any(gamma.real < 0):
        warnings.warn(
            "Re[gamma] < 0 for some modes; the damping is amplifying there",
            NegativeDampingWarning, stacklevel=2)
    return _unwrap(gamma)


def polar_shift(lam, gamma):
    """Modulus and principal argument of ``lambda - (gamma/2)**2``.

    The argument lies in (-pi, pi]; the argument of 0 is 0.
    """
    w = np.asarray(lam, dtype=complex) - (np.asarray(gamma, dtype=complex) / 2) ** 2
    r = np.abs(w)
    theta = np.arctan2(w.imag, w.real)
    # atan2 returns -pi on the negative real axis when Im is -0.0.
    theta = np.where(theta <= -np.pi, np.pi, theta)
    theta = np.where(r == 0, 0.0, theta)
    return _unwrap(r, float), _unwrap(theta, float)


def _parts(lam, p: DampingParams, warn: bool):
    lam = np.asarray(lam, dtype=complex)
    gamma = np.asarray(damping_of(lam, p, warn=warn))
    r, theta = polar_shift(lam, gamma)
    return lam, gamma, np.asarray(r), np.asarray(theta)


def mode_exponents(lam, p: DampingParams, *, warn: bool = True):
    """Return ``(s_plus, s_minus)`` with ``s = -gamma/2 +- i sqrt(r) e^{i theta/2}``."""
    _, gamma, r, theta = _parts(lam, p, warn)
    shift = 1j * np.sqrt(r) * np.exp(0.5j * theta)
    return _unwrap(-gamma / 2 + shift), _unwrap(-gamma / 2 - shift)


def max_real_exponent(lam, p: DampingParams, *, warn: bool = False):
    """Largest real part of the two exponents (exponent-sign route)."""
    s_plus, s_minus = mode_exponents(lam, p, warn=warn)
    return _unwrap(np.maximum(np.real(s_plus), np.real(s_minus)), float)


def raw_margin(lam, p: DampingParams, *, warn: bool = False):
    """``Re[gamma]/2 - sqrt(r) |sin(theta/2)|`` without snapping to zero."""
    _, gamma, r, theta = _parts(lam, p, warn)
    return _unwrap(gamma.real / 2 - np.sqrt(r) * np.abs(np.sin(theta / 2)), float)


def nondivergence_margin(lam, p: DampingParams, *, warn: bool = False):
    """Margin of the non-divergence condition, snapped to 0 inside the marginal band."""
    m = np.asarray(raw_margin(lam, p, warn=warn))
    return _unwrap(np.where(np.abs(m) <= MARGIN_TOL, 0.0, m), float)


def divergent_by_inequality(lam, p: DampingParams, *, warn: bool = False):
    """Inequality route: ``Re[gamma]/(2 sqrt r) < |sin(theta/2)|``.

    When ``r == 0`` the exponents coincide at ``-gamma/2`` and the verdict
    is ``Re[gamma] < 0``.
    """
    _, gamma, r, theta = _parts(lam, p, warn)
    sin_half = np.abs(np.sin(theta / 2))
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = gamma.real / (2 * np.sqrt(r))
    verdict = np.where(r > 0, ratio < sin_half, gamma.real < 0)
    return _unwrap(verdict, bool)


def is_nondivergent(lam, p: DampingParams):
    """Vectorised verdict with boundary semantics: margin >= -MARGIN_TOL."""
    return _unwrap(np.asarray(raw_margin(lam, p)) >= -MARGIN_TOL, bool)


def classify_mode(lam: complex, p: DampingParams) -> ModeReport:
    """Full per-mode analysis.

    Both the inequality and the exponent-sign verdicts are computed; away
    from the marginal band they must agree.
    """
    lam = complex(lam)
    gamma = damping_of(lam, p)
    r, theta = polar_shift(lam, gamma)
    s_plus, s_minus = mode_exponents(lam, p, warn=False)
    max_re = max(s_plus.real, s_minus.real)
    margin = gamma.real / 2 - math.sqrt(r) * abs(math.sin(theta / 2))

    if abs(margin) > MARGIN_TOL * max(1.0, math.sqrt(r), abs(gamma)):
        by_ineq = bool(divergent_by_inequality(lam, p))
        assert by_ineq == (max_re > 0), (
            f"routes disagree at lambda={lam}, p={p}: margin={margin}, max_re={max_re}")
    if abs(margin) <= MARGIN_TOL:
        margin = 0.0
    degenerate = r <= DEGENERATE_RTOL * max(1.0, abs(lam), abs(gamma) ** 2 / 4)
    return ModeReport(
        lam=lam, gamma=gamma, r=r, theta=theta,
        exponent_plus=s_plus, exponent_minus=s_minus,
        max_real_exponent=max_re, divergent=margin < 0, margin=margin,
        degenerate=degenerate)


def classify_network(spectrum: Spectrum, p: DampingParams) -> tuple[bool, list[ModeReport]]:
    """Classify every mode; the network is safe iff no mode diverges."""
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", NegativeDampingWarning)
        reports = [classify_mode(lam, p) for lam in spectrum.eigenvalues]
    if caught:
        warnings.warn(
            f"Re[gamma] < 0 on {len(caught)} of {len(reports)} modes",
            NegativeDampingWarning, stacklevel=2)
    return not any(rep.divergent for rep in reports), reports


def worst_margin(reports: Sequence[ModeReport], *, skip_zero_modes: float | None = None) -> float:
    """Smallest margin over the reports.

    ``skip_zero_modes`` drops modes with ``|lambda|`` at or below the given
    value; the structural zero mode is always exactly marginal.
    """
    margins = [rep.margin for rep in reports
               if skip_zero_modes is None or abs(rep.lam) > skip_zero_modes]
    return min(margins) if margins else math.inf


def write_mode_csv(reports: Sequence[ModeReport], sink: TextIO) -> None:
    writer = csv.writer(sink, lineterminator="\n")
    writer.writerow(["mu", "re_lambda", "im_lambda", "r", "theta",
                     "max_re_exponent", "margin", "divergent"])
    for mu, rep in enumerate(reports):
        writer.writerow([
            mu, f"{rep.lam.real:.17g}", f"{rep.lam.imag:.17g}", f"{rep.r:.17g}",
            f"{rep.theta:.17g}", f"{rep.max_real_exponent:.17g}", f"{rep.margin:.17g}",
            int(rep.divergent)])
