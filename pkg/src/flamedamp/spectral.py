"""Complex eigendecomposition of nonsymmetric Laplacians."""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass
from typing import TextIO

import numpy as np


class EigensolverError(RuntimeError):
    """The dense eigensolver failed to converge."""


class DuplicateEigenvalueWarning(UserWarning):
    """Two eigenvalues are closer than the near-duplicate threshold."""


@dataclass(frozen=True)
class GershgorinDisk:
    center: float
    radius: float

    def contains(self, z, tol: float = 0.0):
        return np.abs(np.asarray(z) - self.center) <= self.radius + tol


@dataclass(frozen=True)
class Spectrum:
    """Eigenpairs of a Laplacian, sorted by real then imaginary part.

    Attributes:
        eigenvalues: complex array of length n.
        eigenvectors: n x n complex matrix, column ``mu`` pairs with ``eigenvalues[mu]``.
        condition_estimate: 2-norm condition number of the eigenvector matrix.
        d_max: largest diagonal entry of the source Laplacian.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    condition_estimate: float
    d_max: float

    @property
    def n(self) -> int:
        return len(self.eigenvalues)

    def residuals(self, laplacian: np.ndarray) -> np.ndarray:
        """Per-mode ``||L v - lambda v||``."""
        lv = laplacian @ self.eigenvectors
        return np.linalg.norm(lv - self.eigenvectors * self.eigenvalues, axis=0)


def largest_gershgorin_disk(laplacian: np.ndarray) -> GershgorinDisk:
    d_max = float(np.max(np.diagonal(laplacian))) if laplacian.size else 0.0
    return GershgorinDisk(center=d_max, radius=d_max)


def _sort_order(values: np.ndarray, scale: float) -> np.ndarray:
    # Rounded keys keep conjugate pairs in a stable order despite last-bit noise.
    re = np.round(values.real / scale, 10)
    im = np.round(values.imag / scale, 10)
    return np.lexsort((im, re))


def compute_spectrum(laplacian: np.ndarray, *, dup_tol: float = 1e-6) -> Spectrum:
    """All eigenvalues and eigenvectors of a real square matrix.

    Near-duplicate eigenvalues (pairwise distance below
    ``dup_tol * max(1, d_max)``) raise a :class:`DuplicateEigenvalueWarning`;
    downstream modal solves refuse ill-conditioned eigenbases instead.
    """
    laplacian = np.asarray(laplacian, dtype=float)
    if laplacian.ndim != 2 or laplacian.shape[0] != laplacian.shape[1]:
        raise ValueError(f"matrix must be square, got shape {laplacian.shape}")
    n = laplacian.shape[0]
    d_max = float(np.max(np.diagonal(laplacian))) if n else 0.0
    scale = max(1.0, d_max)
    try:
        values, vectors = np.linalg.eig(laplacian)
    except np.linalg.LinAlgError as exc:
        raise EigensolverError(f"eigensolver did not converge for n={n}: {exc}") from exc
    values = values.astype(complex)
    vectors = vectors.astype(complex)

    order = _sort_order(values, scale)
    values = values[order]
    vectors = vectors[:, order]

    if n > 1:
        gaps = np.abs(values[:, None] - values[None, :])
        gaps[np.diag_indices(n)] = np.inf
        if gaps.min() < dup_tol * scale:
            i, j = np.unravel_index(np.argmin(gaps), gaps.shape)
            warnings.warn(
                f"near-duplicate eigenvalues {values[i]:.6g} and {values[j]:.6g}",
                DuplicateEigenvalueWarning, stacklevel=2)

    with np.errstate(all="ignore"):
        cond = float(np.linalg.cond(vectors)) if n else 1.0
    if not np.isfinite(cond):
        cond = np.inf
    return Spectrum(values, vectors, cond, d_max)


def write_spectrum_csv(spectrum: Spectrum, sink: TextIO) -> None:
    writer = csv.writer(sink, lineterminator="\n")
    writer.writerow(["mu", "re_lambda", "im_lambda"])
    for mu, lam in enumerate(spectrum.eigenvalues):
        writer.writerow([mu, f"{lam.real:.17g}", f"{lam.imag:.17g}"])
