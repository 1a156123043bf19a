import math

import numpy as np
import pytest

from flamedamp.design import (
    case_classify, case_coefficient, circle_points, conventional_min_gamma0, design_damping,
    disk_contained, interior_points, min_gamma0)
from flamedamp.graph import build_laplacian, random_digraph
from flamedamp.modes import DampingParams, classify_network
from flamedamp.spectral import compute_spectrum

import oracles


@pytest.mark.parametrize("gamma1, expected", [
    (0.0, math.sqrt(200)),
    (0.1, math.sqrt(300) - 10),
    (-0.1, math.sqrt(300) + 10),
])
def test_min_gamma0_against_grid_oracle(gamma1, expected):
    assert min_gamma0(100, gamma1) == pytest.approx(expected, rel=1e-14)
    assert abs(oracles.grid_search_min_gamma0(100, gamma1) - expected) <= 1e-6


def test_min_gamma0_frozen_values():
    assert min_gamma0(100, 0) == pytest.approx(14.142135623730951, rel=1e-15)
    assert min_gamma0(100, 0.1) == pytest.approx(7.320508075688772, rel=1e-14)
    assert min_gamma0(100, -0.1) == pytest.approx(27.320508075688775, rel=1e-14)
    assert min_gamma0(0, 3.0) == 0.0 and min_gamma0(0, -3.0) == 0.0


def test_min_gamma0_rejects_negative_dmax():
    with pytest.raises(ValueError):
        min_gamma0(-1, 0)
    with pytest.raises(ValueError):
        conventional_min_gamma0(-1)


def test_conventional():
    assert conventional_min_gamma0(100) == min_gamma0(100, 0)
    assert conventional_min_gamma0(0) == 0
    assert conventional_min_gamma0(50) == 10


def test_nonnegative_for_all_gamma1(rng):
    for d, g1 in zip(rng.uniform(0, 1e3, 500), rng.uniform(-5, 5, 500)):
        assert min_gamma0(d, g1) >= 0


def test_monotone_decreasing_in_gamma1(rng):
    for d in rng.uniform(0.1, 500, 20):
        g1 = np.sort(rng.uniform(-1, 1, 50))
        values = [min_gamma0(d, g) for g in g1]
        assert all(a > b for a, b in zip(values, values[1:]))


def test_special_case_agreement(rng):
    for d in rng.uniform(0, 1e4, 100):
        assert min_gamma0(d, 0.0) == pytest.approx(conventional_min_gamma0(d), rel=1e-12)


@pytest.mark.parametrize("gamma1", [-0.1, -0.05, 0.0, 0.05, 0.1])
@pytest.mark.parametrize("d_max", [1, 10, 100])
def test_threshold_sharpness(d_max, gamma1):
    g0 = min_gamma0(d_max, gamma1)
    above = disk_contained(d_max, DampingParams(g0 + 1e-6, gamma1), 4096, interior=64)
    below = disk_contained(d_max, DampingParams(max(g0 - 1e-2, 0.0), gamma1), 4096, interior=64)
    assert above.contained
    assert not below.contained


def test_containment_examples():
    assert disk_contained(100, DampingParams(min_gamma0(100, 0.1), 0.1)).contained
    bad = disk_contained(100, DampingParams(min_gamma0(100, -0.1) - 5, -0.1))
    assert not bad.contained and bad.worst_margin < 0
    assert abs(bad.worst_point - 100) <= 100 + 1e-9
    assert disk_contained(0, DampingParams(0.0, 0.3)).contained
    assert disk_contained(0, DampingParams(2.0, -1.0)).contained


def test_worst_point_is_a_divergent_sample():
    from flamedamp.modes import classify_mode
    res = disk_contained(100, DampingParams(9.14, 0.0))
    assert classify_mode(res.worst_point, DampingParams(9.14, 0.0)).margin == pytest.approx(
        res.worst_margin)


def test_disk_contained_needs_samples():
    with pytest.raises(ValueError):
        disk_contained(1, DampingParams(1, 0), samples=10)


def test_sample_geometry():
    pts = circle_points(100, 5)
    np.testing.assert_allclose(pts[[0, 2, 4]], [200, 100 + 100j, 0], atol=1e-12)
    inner = interior_points(100, 64)
    assert np.all(np.abs(inner - 100) <= 100) and inner.size > 0.7 * 64 * 64
    jittered = interior_points(100, 64, seed=3)
    np.testing.assert_array_equal(jittered, interior_points(100, 64, seed=3))
    assert not np.array_equal(jittered, inner)


@pytest.mark.parametrize("d, g0, g1, label", [
    (100, 14.14, 0, "B"),
    (100, 7.32, 0.1, "B"),
    (100, 5, -0.12, "B"),
    (100, 300, -0.05, "C"),
])
def test_case_classify(d, g0, g1, label):
    assert case_classify(d, DampingParams(g0, g1)) == label


def test_case_a_needs_negative_gamma1():
    # gamma0 gamma1 + 1 + 2 gamma1^2 d = 0 with gamma1 = -0.5, d = 1 -> gamma0 = 3.
    p = DampingParams(3.0, -0.5)
    assert case_coefficient(1.0, p) == 0.0
    assert case_classify(1.0, p) == "A"


def test_design_result():
    res = design_damping(100, 0.1)
    assert res.gamma0_min == pytest.approx(math.sqrt(300) - 10)
    assert res.case_label == "B" and res.contained


def test_safety_implication(rng):
    for k in range(50):
        g = random_digraph(rng, int(rng.integers(2, 16)), density=0.4, strongly_connected=True)
        s = compute_spectrum(build_laplacian(g))
        for g1 in (-0.1, 0.0, 0.1):
            safe, _ = classify_network(s, DampingParams(min_gamma0(s.d_max, g1), g1))
            assert safe
