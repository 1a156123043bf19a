"""Time-domain simulation of the damped wave equation on a network.

``x'' + Gamma x' = -L x`` with ``Gamma = gamma0 I + gamma1 L`` is solved two
ways: in closed form through the eigenbasis of ``L``, and by fixed-step RK4
on the first-order system ``(x, x')``. The integrator never touches the
eigendecomposition, so it serves as an oracle for the modal route.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass
from typing import TextIO

import numpy as np

from .modes import DEGENERATE_RTOL, DampingParams, damping_of, mode_exponents, polar_shift
from .spectral import DuplicateEigenvalueWarning, Spectrum, compute_spectrum

#: Eigenbases with a larger condition number are refused for modal solves.
MAX_CONDITION = 1e8
#: Upper bound on ``dt * (d_max + gamma0 + 2 |gamma1| d_max)`` for RK4.
STEP_BOUND = 0.1
DIVERGENCE_SLOPE = 1e-3


class IllConditionedBasisError(ValueError):
    def __init__(self, condition: float):
        self.condition = condition
        super().__init__(
            f"eigenvector matrix condition estimate {condition:.3g} exceeds {MAX_CONDITION:.0e}")


class StepSizeError(ValueError):
    pass


@dataclass(frozen=True)
class InitialCondition:
    position: np.ndarray
    velocity: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.position, dtype=float).ravel()
        v = np.asarray(self.velocity, dtype=float).ravel()
        if x.shape != v.shape:
            raise ValueError(f"position has length {x.size}, velocity {v.size}")
        object.__setattr__(self, "position", x)
        object.__setattr__(self, "velocity", v)

    @property
    def n(self) -> int:
        return self.position.size


@dataclass(frozen=True)
class ModalCoefficients:
    """Per-mode constants of ``a(t) = c+ e^{s+ t} + c- e^{s- t} + c_sec t e^{s+ t}``.

    ``c_secular`` is nonzero only for degenerate modes (``r == 0``), where
    ``s+ == s-`` and the second solution is ``t e^{s t}``; those modes
    carry ``c_plus = a0`` and ``c_minus = 0``.
    """

    a0: np.ndarray
    adot0: np.ndarray
    c_plus: np.ndarray
    c_minus: np.ndarray
    c_secular: np.ndarray
    s_plus: np.ndarray
    s_minus: np.ndarray
    degenerate: np.ndarray

    def amplitudes(self, times) -> np.ndarray:
        t = np.asarray(times, dtype=float)[:, None]
        with np.errstate(over="ignore", invalid="ignore"):
            return (self.c_plus * np.exp(self.s_plus * t)
                    + self.c_minus * np.exp(self.s_minus * t)
                    + self.c_secular * t * np.exp(self.s_plus * t))

    def envelope(self) -> float:
        """``sum (|c+| + |c-|)^2``, an energy bound valid when no mode grows."""
        return float(np.sum((np.abs(self.c_plus) + np.abs(self.c_minus)) ** 2))


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    modal_amplitudes: np.ndarray | None = None
    energy: np.ndarray | None = None
    overflowed: bool = False
    imag_residue: float = 0.0

    def __len__(self) -> int:
        return len(self.times)


def damping_matrix(laplacian: np.ndarray, p: DampingParams) -> np.ndarray:
    n = laplacian.shape[0]
    return p.gamma0 * np.eye(n) + p.gamma1 * np.asarray(laplacian, dtype=float)


def _require_well_conditioned(spectrum: Spectrum) -> None:
    if not spectrum.condition_estimate < MAX_CONDITION:
        raise IllConditionedBasisError(spectrum.condition_estimate)


def project(spectrum: Spectrum, vectors: np.ndarray) -> np.ndarray:
    """Coordinates in the eigenbasis: solves ``V a = x`` for each row ``x``."""
    _require_well_conditioned(spectrum)
    x = np.atleast_2d(np.asarray(vectors, dtype=complex))
    return np.linalg.solve(spectrum.eigenvectors, x.T).T


def modal_decompose(spectrum: Spectrum, ic: InitialCondition,
                    p: DampingParams) -> ModalCoefficients:
    """Expand the initial state in eigenvectors and fit both exponentials per mode.

    The eigenvectors of a directed Laplacian are not orthogonal, so the
    expansion is a linear solve rather than a projection.
    """
    if ic.n != spectrum.n:
        raise ValueError(f"initial condition has length {ic.n}, graph has {spectrum.n} nodes")
    a0, adot0 = project(spectrum, np.vstack([ic.position, ic.velocity]))
    lam = spectrum.eigenvalues
    gamma = np.asarray(damping_of(lam, p, warn=False))
    r, _ = polar_shift(lam, gamma)
    r = np.asarray(r)
    s_plus, s_minus = (np.asarray(s) for s in mode_exponents(lam, p, warn=False))

    degenerate = r <= DEGENERATE_RTOL * np.maximum.reduce(
        [np.ones_like(r), np.abs(lam), np.abs(gamma) ** 2 / 4])
    gap = np.where(degenerate, 1.0, s_plus - s_minus)
    c_plus = np.where(degenerate, a0, (adot0 - s_minus * a0) / gap)
    c_minus = np.where(degenerate, 0.0, a0 - c_plus)
    c_secular = np.where(degenerate, adot0 - s_plus * a0, 0.0)
    return ModalCoefficients(a0, adot0, c_plus, c_minus, c_secular,
                             s_plus, s_minus, degenerate)


def closed_form_trajectory(spectrum: Spectrum, mc: ModalCoefficients, times) -> Trajectory:
    """Evaluate each mode analytically and map back with ``x(t) = V a(t)``."""
    times = np.asarray(times, dtype=float)
    if times.size > 1 and np.any(np.diff(times) <= 0):
        raise ValueError("times must be strictly increasing")
    amps = mc.amplitudes(times)
    with np.errstate(over="ignore", invalid="ignore"):
        full = amps @ spectrum.eigenvectors.T
        norms = np.linalg.norm(full, axis=1)
        residue = np.abs(full.imag).max(axis=1) / np.where(norms > 0, norms, 1.0)
        energy = np.sum(np.abs(amps) ** 2, axis=1)
    finite = np.isfinite(residue)
    return Trajectory(
        times=times, states=full.real, modal_amplitudes=amps, energy=energy,
        overflowed=not bool(np.all(np.isfinite(full))),
        imag_residue=float(residue[finite].max()) if finite.any() else 0.0)


def step_scale(laplacian: np.ndarray, p: DampingParams) -> float:
    d_max = float(np.max(np.diagonal(laplacian))) if laplacian.size else 0.0
    return d_max + p.gamma0 + abs(p.gamma1) * 2.0 * d_max


def integrate_direct(laplacian: np.ndarray, p: DampingParams, ic: InitialCondition,
                     t_end: float, dt: float, *, stride: int = 1,
                     spectrum: Spectrum | None = None) -> Trajectory:
    """Classical RK4 on ``x' = v, v' = -L x - Gamma v``.

    Samples are kept every ``stride`` steps. A non-finite state stops the
    run and marks the trajectory ``overflowed``. Energy is filled in from the
    eigenbasis when it is well conditioned and left ``None`` otherwise.
    """
    laplacian = np.asarray(laplacian, dtype=float)
    n = laplacian.shape[0]
    if ic.n != n:
        raise ValueError(f"initial condition has length {ic.n}, graph has {n} nodes")
    if dt <= 0:
        raise StepSizeError("dt must be positive")
    scale = step_scale(laplacian, p)
    if dt * scale > STEP_BOUND:
        raise StepSizeError(
            f"dt={dt:g} too large: dt * {scale:.4g} = {dt * scale:.3g} > {STEP_BOUND}")

    gamma_mat = damping_matrix(laplacian, p)
    system = np.block([[np.zeros((n, n)), np.eye(n)], [-laplacian, -gamma_mat]])
    steps = int(math.floor(t_end / dt + 1e-9))
    y = np.concatenate([ic.position, ic.velocity])
    kept = [y[:n].copy()]
    times = [0.0]
    overflowed = False
    half = 0.5 * dt
    for k in range(1, steps + 1):
        k1 = system @ y
        k2 = system @ (y + half * k1)
        k3 = system @ (y + half * k2)
        k4 = system @ (y + dt * k3)
        y = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(y)):
            overflowed = True
            break
        if k % stride == 0:
            kept.append(y[:n].copy())
            times.append(k * dt)

    states = np.array(kept)
    tr = Trajectory(times=np.array(times), states=states, overflowed=overflowed)
    if spectrum is None:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", DuplicateEigenvalueWarning)
            spectrum = compute_spectrum(laplacian)
    if spectrum.condition_estimate < MAX_CONDITION:
        amps = project(spectrum, states)
        tr.modal_amplitudes = amps
        tr.energy = np.sum(np.abs(amps) ** 2, axis=1)
    return tr


def detect_divergence(tr: Trajectory) -> tuple[bool, float]:
    """Least-squares slope of log-energy over the last half of the window.

    Returns ``(divergent, growth_rate)`` where ``growth_rate`` is half the
    slope, i.e. the amplitude growth rate. An overflowed run is divergent.
    """
    if tr.energy is None:
        raise ValueError("trajectory carries no energy series")
    if len(tr) < 16 and not tr.overflowed:
        raise ValueError(f"need at least 16 samples, got {len(tr)}")
    energy = np.asarray(tr.energy, dtype=float)
    t = np.asarray(tr.times, dtype=float)
    finite = np.isfinite(energy)
    energy, t = energy[finite], t[finite]
    if energy.size == 0 or np.all(energy == 0):
        return tr.overflowed, 0.0
    tail = slice(energy.size // 2, None)
    log_e = np.log(np.maximum(energy[tail], np.finfo(float).tiny))
    if log_e.size < 2:
        return tr.overflowed, math.inf if tr.overflowed else 0.0
    slope = float(np.polyfit(t[tail], log_e, 1)[0])
    return tr.overflowed or slope > DIVERGENCE_SLOPE, slope / 2.0


def random_initial_condition(rng: np.random.Generator, n: int, *,
                             velocity: bool = True) -> InitialCondition:
    x = rng.standard_normal(n)
    v = rng.standard_normal(n) if velocity else np.zeros(n)
    norm = math.sqrt(float(x @ x + v @ v)) or 1.0
    return InitialCondition(x / norm, v / norm)


def write_trajectory_csv(tr: Trajectory, sink: TextIO) -> None:
    writer = csv.writer(sink, lineterminator="\n")
    n = tr.states.shape[1] if tr.states.ndim == 2 else 0
    writer.writerow(["t", *(f"x_{i}" for i in range(n)), "energy"])
    for k, t in enumerate(tr.times):
        e = "" if tr.energy is None else f"{tr.energy[k]:.17g}"
        writer.writerow([f"{t:.17g}", *(f"{v:.17g}" for v in tr.states[k]), e])


def write_modal_csv(tr: Trajectory, sink: TextIO) -> None:
    writer = csv.writer(sink, lineterminator="\n")
    writer.writerow(["t", "mu", "re_a", "im_a", "abs_a"])
    if tr.modal_amplitudes is None:
        return
    for k, t in enumerate(tr.times):
        for mu, a in enumerate(tr.modal_amplitudes[k]):
            writer.writerow([f"{t:.17g}", mu, f"{a.real:.17g}", f"{a.imag:.17g}",
                             f"{abs(a):.17g}"])
