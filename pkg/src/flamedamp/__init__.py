"""Spectral analysis and damping design for the oscillation model on directed networks."""

from .design import (
    Containment, DesignResult, case_classify, conventional_min_gamma0, design_damping, disk_contained,
    min_gamma0)
from .dynamics import (
    InitialCondition, ModalCoefficients, Trajectory, closed_form_trajectory, damping_matrix,
    detect_divergence, integrate_direct, modal_decompose)
from .graph import WeightedDigraph, build_laplacian, load_edge_list, max_out_degree
from .modes import (
    DampingParams, DampingSweep, ModeReport, classify_mode, classify_network, damping_of, mode_exponents,
    polar_shift)
from .region import (
    RegionCurve, emit_region_csv, emit_region_svg, gershgorin_circle_points,
    nondivergence_boundary)
from .spectral import GershgorinDisk, Spectrum, compute_spectrum, largest_gershgorin_disk

__version__ = "0.1.0"

__all__ = [
    "Containment", "DampingParams", "DampingSweep", "DesignResult", "GershgorinDisk", "InitialCondition",
    "ModalCoefficients", "ModeReport", "RegionCurve", "Spectrum", "Trajectory",
    "WeightedDigraph", "build_laplacian", "case_classify", "classify_mode", "classify_network",
    "closed_form_trajectory", "compute_spectrum", "conventional_min_gamma0", "damping_matrix",
    "damping_of", "design_damping", "detect_divergence", "disk_contained", "emit_region_csv",
    "emit_region_svg", "gershgorin_circle_points", "integrate_direct", "largest_gershgorin_disk",
    "load_edge_list", "max_out_degree", "min_gamma0", "modal_decompose", "mode_exponents",
    "nondivergence_boundary", "polar_shift",
]
