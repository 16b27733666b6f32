import math

import numpy as np
import pytest

from trigshear.admissible import AdmissibleProfile
from trigshear.shearlets import (
    ShearletIndex,
    check_index,
    frequency_support,
    orientation_angle,
    pattern,
    pattern_periods,
    polar_derivative_maxima,
    shear_matrix,
    shearlet_space_eval,
    shears,
    support_points,
    window_scaled_eval,
)


def test_shear_matrix_reference():
    assert shear_matrix("h", 2, 1).tolist() == [[4, 2], [0, 2]]
    assert shear_matrix("v", 2, 0).tolist() == [[2, 0], [0, 4]]


@pytest.mark.parametrize("cone", ["h", "v"])
@pytest.mark.parametrize("j, l", [(0, 0), (2, -2), (4, 3), (10, -31)])
def test_shear_matrix_determinant(cone, j, l):
    M = shear_matrix(cone, j, l)
    assert round(np.linalg.det(M)) == 2 ** (3 * j // 2)
    assert (M[1, 0] == 0) if cone == "h" else (M[0, 1] == 0)


def test_orientation_angles():
    assert orientation_angle("h", 10, 0) == 0
    assert orientation_angle("h", 10, 32) == pytest.approx(math.pi / 4)
    assert orientation_angle("v", 10, 0) == pytest.approx(math.pi / 2)
    assert orientation_angle("v", 10, 32) == pytest.approx(math.pi / 4)


def test_pattern_reference_points():
    p = pattern("h", 2, 1)
    assert len(p) == 8
    rows = {tuple(r) for r in p}
    assert (-0.5, -0.5) in rows and (0.0, 0.0) in rows
    # pattern is the same lattice for every shear
    assert np.array_equal(pattern("h", 4, 0), pattern("h", 4, 3))


@pytest.mark.parametrize("j", [2, 4, 6])
def test_pattern_is_the_full_lattice(j):
    for cone in ("h", "v"):
        p = pattern(cone, j)
        p1, p2 = pattern_periods(cone, j)
        assert len(np.unique(p, axis=0)) == 2 ** (3 * j // 2) == p1 * p2
        # row-major with z1 fastest
        assert p[1, 0] - p[0, 0] == pytest.approx(1 / p1)
    # v-cone lattice is the h-cone lattice with coordinates swapped
    h = {tuple(r) for r in pattern("h", j)}
    assert {tuple(r[::-1]) for r in pattern("v", j)} == h


def test_index_validation():
    with pytest.raises(ValueError):
        check_index("d", 2, 0)
    with pytest.raises(ValueError):
        check_index("h", 3, 0)
    with pytest.raises(ValueError):
        check_index("h", 4, 5)
    with pytest.raises(ValueError):
        ShearletIndex("h", 2, 3)


def test_shear_enumeration():
    assert len(shears(10)) == 2 * 2**5 - 1
    assert len(shears(10, include_seam=True)) == 2 * 2**5 + 1


@pytest.mark.parametrize("j, l", [(4, 0), (6, 3), (8, -7)])
def test_window_reference_values(j, l):
    assert window_scaled_eval("h", j, l, (2.0**j, l * 2.0 ** (j / 2))) == pytest.approx(0.5, abs=1e-15)
    assert window_scaled_eval("h", j, l, (0.0, 17.0)) == 0.0
    # v-cone window is the h-cone window with axes swapped
    xi = np.array([[2.0**j * 0.7, 3.0], [2.0**j, -5.0]])
    assert np.array_equal(window_scaled_eval("v", j, l, xi[:, ::-1]), window_scaled_eval("h", j, l, xi))


@pytest.mark.parametrize("j, l", [(4, 1), (6, -5), (10, 12)])
def test_polar_identity(j, l):
    prof = AdmissibleProfile()
    rho = np.linspace(0.2, 1.5, 50)[:, None]
    th = np.linspace(-0.6, 0.6, 40)[None, :]
    xi = 2.0**j * np.stack([rho * np.cos(th), rho * np.sin(th)] * np.ones((1, 1, 1)), -1)
    lhs = window_scaled_eval("h", j, l, xi)
    rc = rho * np.cos(th)
    rhs = prof.g_tilde(rc) * prof.g(rc * (2.0 ** (j / 2) * np.tan(th) - l))
    assert np.max(np.abs(lhs - rhs)) < 1e-12


def test_support_predicate_exhaustive_j4():
    j = 4
    for cone in ("h", "v"):
        for l in shears(j, include_seam=True):
            sup = frequency_support(cone, j, l)
            k1 = np.arange(-40, 41)
            K = np.stack(np.meshgrid(k1, k1, indexing="ij"), -1)
            w = window_scaled_eval(cone, j, l, K)
            inside = sup.contains(K)
            assert np.all(inside[w != 0])
            # every nonzero sits inside the integer box too
            nz = K[w != 0]
            assert nz[:, 0].min() >= sup.k1_range[0] and nz[:, 0].max() <= sup.k1_range[1]
            assert nz[:, 1].min() >= sup.k2_range[0] and nz[:, 1].max() <= sup.k2_range[1]
            assert not np.any(inside[K[..., 0 if cone == "h" else 1] == 0])


@pytest.mark.parametrize("j", [4, 6, 8])
def test_support_points_capture_every_nonzero(j):
    l = 2 ** (j // 2) - 1
    k1, k2, w = support_points("h", j, l)
    got = {(a, b) for a, b, v in zip(k1.ravel(), k2.ravel(), w.ravel()) if v != 0}
    r1, r2 = frequency_support("h", j, l).k1_range, frequency_support("h", j, l).k2_range
    a = np.arange(r1[0], r1[1] + 1)
    b = np.arange(r2[0], r2[1] + 1)
    K = np.stack(np.meshgrid(a, b, indexing="ij"), -1)
    w_all = window_scaled_eval("h", j, l, K)
    expected = {tuple(k) for k in K[w_all != 0]}
    assert got == expected


def test_support_count_scales_like_area():
    counts = [np.count_nonzero(support_points("h", j, 0)[2]) for j in (6, 8, 10)]
    ratios = [c / 2 ** (3 * j / 2) for c, j in zip(counts, (6, 8, 10))]
    assert max(ratios) / min(ratios) < 1.1


def test_cones_cover_the_square_annulus():
    # one scale covers 1/2 <= max|xi_i| / 2^j <= 1 (the round annulus needs neighbouring scales)
    j = 6
    a = np.linspace(-1, 1, 161) * 2.0**j
    K = np.stack(np.meshgrid(a, a, indexing="ij"), -1)
    m = np.max(np.abs(K), axis=-1) / 2.0**j
    ring = K[(m >= 0.5) & (m <= 1.0)]
    total = sum(window_scaled_eval(c, j, l, ring) for c in ("h", "v") for l in shears(j, include_seam=True))
    assert total.min() >= 0.5 - 1e-12


def test_space_evaluation_at_centre():
    idx = ShearletIndex("h", 4, 1, (0.25, -0.5))
    x = 2 * np.pi * np.array(idx.y)
    val = shearlet_space_eval(idx, x)
    k1, k2, w = support_points("h", 4, 1)
    assert val.real == pytest.approx(2.0**-3 * w.sum(), rel=1e-12)
    assert abs(val.imag) < 1e-12
    pts = np.random.default_rng(7).uniform(-np.pi, np.pi, (20, 2))
    shifted = shearlet_space_eval(ShearletIndex("h", 4, 1), pts - x)
    assert np.allclose(shearlet_space_eval(idx, pts), shifted, atol=1e-13)


def test_polar_derivative_growth():
    js = [4, 6, 8, 10]
    m = [polar_derivative_maxima("h", j, 0) for j in js]
    slope = lambda key: np.polyfit(js, np.log2([d[key] for d in m]), 1)[0]
    assert slope("theta1") == pytest.approx(0.5, abs=0.15)
    assert slope("theta2") == pytest.approx(1.0, abs=0.15)
    assert slope("rho1") == pytest.approx(0.0, abs=0.15)
