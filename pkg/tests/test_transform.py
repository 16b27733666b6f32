import numpy as np
import pytest

from trigshear.analysis import neighborhood_hits
from trigshear.cartoon import StarSet, chi_cartoon, fig1_cartoon, periodize_sample, single_order_cartoon
from trigshear.oracle import PolynomialField, ft_region_boundary
from trigshear.shearlets import ShearletIndex, pattern, pattern_periods, shearlet_space_eval, shears, window_scaled_eval
from trigshear.transform import (
    ResolutionError,
    analysis_all,
    analysis_single,
    coefficient_pyramid,
    fourier_coefficients,
    required_kmax,
    resolution_for,
    spectrum_from_function,
)


def grid(N):
    x = -np.pi + 2 * np.pi * np.arange(N) / N
    return np.meshgrid(x, x, indexing="ij")


def test_constant_and_cosine_spectra():
    X1, X2 = grid(64)
    s = fourier_coefficients(np.ones((64, 64)))
    assert s.at(0, 0) == pytest.approx(1.0)
    mask = np.ones(s.coeffs.shape, bool)
    mask[s.kmax, s.kmax] = False
    assert np.abs(s.coeffs[mask]).max() < 1e-15
    c = fourier_coefficients(np.cos(X1))
    assert c.at(1, 0) == pytest.approx(0.5) and c.at(-1, 0) == pytest.approx(0.5)
    c.coeffs[c.kmax + 1, c.kmax] = c.coeffs[c.kmax - 1, c.kmax] = 0
    assert np.abs(c.coeffs).max() < 1e-15


def test_spectrum_conjugate_symmetry_and_crop(rng):
    a = rng.standard_normal((32, 32))
    full = fourier_coefficients(a)
    k = rng.integers(-15, 16, (50, 2))
    assert np.allclose(full.at(-k[:, 0], -k[:, 1]), np.conj(full.at(k[:, 0], k[:, 1])), atol=1e-15)
    crop = fourier_coefficients(a, kmax=6)
    assert np.array_equal(crop.coeffs, full.coeffs[16 - 6:16 + 6, 16 - 6:16 + 6])
    with pytest.raises(ResolutionError):
        crop.at(6, 0)
    with pytest.raises(ValueError):
        fourier_coefficients(np.ones((48, 48)))


def test_mixed_exponential_against_numpy():
    X1, X2 = grid(32)
    f = np.cos(3 * X1 - 2 * X2) + 0.25 * np.sin(X2)
    s = fourier_coefficients(f)
    assert s.at(3, -2) == pytest.approx(0.5)
    assert s.at(0, 1) == pytest.approx(-0.125j)
    assert s.at(0, -1) == pytest.approx(0.125j)


def test_indicator_matches_boundary_oracle():
    s = spectrum_from_function(chi_cartoon(), 4096, kmax=16)
    one = PolynomialField.from_terms({(0, 0): 1.0})
    T = StarSet.circle(2.0)
    for k1 in range(-8, 9):
        for k2 in range(-8, 9):
            rho = np.hypot(k1, k2)
            if rho == 0 or rho > 8:
                continue
            ref = ft_region_boundary(one, T, rho, np.arctan2(k2, k1))
            assert abs(s.at(k1, k2) - ref) <= 2e-4 * abs(ref) + 2e-4 * 1e-3


def test_indicator_error_shrinks_with_resolution():
    one = PolynomialField.from_terms({(0, 0): 1.0})
    T = StarSet.circle(2.0)
    ks = [(k1, k2) for k1 in range(-8, 9) for k2 in range(-8, 9) if 0 < np.hypot(k1, k2) <= 8]
    refs = np.array([ft_region_boundary(one, T, np.hypot(*k), np.arctan2(k[1], k[0])) for k in ks])
    errs = []
    for N in (2048, 4096):
        s = spectrum_from_function(chi_cartoon(), N, kmax=16)
        got = np.array([s.at(*k) for k in ks])
        errs.append(np.abs(got - refs).max() / np.abs(refs).max())
    assert errs[0] / errs[1] > 2 ** 1.5 * 0.8


def test_single_coefficient_references():
    j, l = 4, 1
    X1, X2 = grid(64)
    flat = fourier_coefficients(np.ones((64, 64)))
    assert analysis_single(flat, "h", j, l, (0.25, 0.5)) == 0
    k0 = (14, 5)
    # cos(k0.x) has c = 1/2 at +k0 and -k0; -k0 lies outside the h window at l=1
    wave = fourier_coefficients(np.cos(k0[0] * X1 + k0[1] * X2))
    psi = window_scaled_eval("h", j, l, np.array(k0, float))
    assert psi > 0
    assert window_scaled_eval("h", j, l, -np.array(k0, float)) > 0
    ph = lambda Y: np.cos(2 * np.pi * (np.asarray(Y) @ np.array(k0, float)))
    for y in pattern("h", j)[::7]:
        expected = 2.0 ** (-0.75 * j) * psi * ph(y)
        assert analysis_single(wave, "h", j, l, y) == pytest.approx(expected, abs=1e-14)
    g = analysis_all(wave, "h", j, l)
    expected = 2.0 ** (-0.75 * j) * psi * ph(g.points)
    assert np.allclose(g.values, expected, atol=1e-14)


@pytest.mark.parametrize("j", [4, 6])
def test_coefficient_is_torus_inner_product(j, rng):
    N = 8 * 2**j
    K = required_kmax(j)
    c = np.zeros((2 * K, 2 * K), complex)
    idx = rng.integers(0, 2 * K, (40, 2))
    c[idx[:, 0], idx[:, 1]] = rng.standard_normal(40) + 1j * rng.standard_normal(40)
    # sample the trigonometric polynomial sum c_k e^{ikx}
    X1, X2 = grid(N)
    k = np.arange(-K, K)
    E1 = np.exp(1j * np.outer(X1[:, 0], k))
    f = E1 @ c @ E1.T
    spec = fourier_coefficients(f.real, kmax=K)
    spec_i = fourier_coefficients(f.imag, kmax=K)
    coeffs = spec.coeffs + 1j * spec_i.coeffs
    assert np.allclose(coeffs, c, atol=1e-12)
    l = 1
    y = pattern("h", j)[5]
    psi = shearlet_space_eval(ShearletIndex("h", j, l, tuple(y)), np.stack([X1, X2], -1))
    inner = np.sum(f * np.conj(psi)) / N**2
    direct = analysis_single(spec, "h", j, l, y) + 1j * analysis_single(spec_i, "h", j, l, y)
    assert inner == pytest.approx(direct, rel=1e-10)


@pytest.mark.parametrize("j", [6, 8])
def test_all_versus_single_on_random_probes(j, rng, spectra):
    spec = spectra("fig1", j)
    grids = {}
    for _ in range(100):
        cone = "hv"[rng.integers(2)]
        l = int(rng.choice(shears(j)))
        g = grids.setdefault((cone, l), analysis_all(spec, cone, j, l))
        i = int(rng.integers(len(g)))
        single = analysis_single(spec, cone, j, l, g.points[i])
        # relative agreement, with a floor at the grid's rounding level for near-zero entries
        floor = 1e-10 * np.abs(g.values).max()
        assert abs(g.values[i] - single) <= 1e-10 * abs(single) + floor


def test_translation_by_pattern_vector_permutes_grid():
    f = fig1_cartoon()
    j, N = 4, 128
    s = periodize_sample(f, N)
    p1, p2 = pattern_periods("h", j)
    shifted = np.roll(s, (N // p1 * 3, N // p2 * 1), axis=(0, 1))
    a = analysis_all(fourier_coefficients(s), "h", j, 2)
    b = analysis_all(fourier_coefficients(shifted), "h", j, 2)
    assert np.allclose(np.sort(a.magnitude), np.sort(b.magnitude), rtol=1e-12, atol=1e-18)
    assert a.magnitude.max() == pytest.approx(b.magnitude.max(), rel=1e-12)


def test_linearity(spectra):
    j = 6
    f, g = fig1_cartoon(), single_order_cartoon(1)
    N = resolution_for(j)
    combo = spectrum_from_function(lambda a, b: 2.0 * f(a, b) - 0.5 * g(a, b), N, kmax=required_kmax(j))
    cf, cg = spectra("fig1", j), spectra("order1", j)
    for cone, l in [("h", 0), ("v", 5)]:
        lhs = analysis_all(combo, cone, j, l).values
        rhs = 2.0 * analysis_all(cf, cone, j, l).values - 0.5 * analysis_all(cg, cone, j, l).values
        assert np.allclose(lhs, rhs, rtol=1e-12, atol=1e-12 * np.abs(rhs).max())


def test_resolution_stability(spectra):
    j = 8
    a = analysis_all(spectra("order0", j), "h", j, 0)
    b = analysis_all(spectra("order0", j, 16), "h", j, 0)
    top = np.argsort(a.magnitude)[-10:]
    assert np.max(np.abs(a.values[top] - b.values[top]) / np.abs(b.values[top])) < 1e-3


def test_resolution_error_for_small_spectrum():
    spec = fourier_coefficients(np.ones((64, 64)))
    with pytest.raises(ResolutionError):
        analysis_all(spec, "h", 6, 0)


def test_pyramid_matches_direct_path():
    f = fig1_cartoon()
    pyr = coefficient_pyramid(f, [4, 2], cones=("h", "v"))
    assert len(pyr) == 2 * (3 + 7)
    rev = coefficient_pyramid(f, [2, 4], cones=("h", "v"))
    for key in pyr:
        assert np.array_equal(pyr[key].values, rev[key].values)
    spec = spectrum_from_function(f, resolution_for(4), kmax=required_kmax(4))
    assert np.allclose(pyr[("v", 4, -3)].values, analysis_all(spec, "v", 4, -3).values, rtol=1e-13, atol=1e-16)
    only = coefficient_pyramid(f, [4], cones=("h",), shear_policy=lambda j: [0, 1])
    assert sorted(only) == [("h", 4, 0), ("h", 4, 1)]
    with pytest.raises(ValueError):
        coefficient_pyramid(f, [])
    with pytest.raises(ValueError):
        coefficient_pyramid(f, [3])


@pytest.mark.slow
def test_argmax_sits_on_the_edge(spectra):
    j = 10
    g = analysis_all(spectra("order0", j), "h", j, 0)
    y = g.points[int(np.argmax(g.magnitude))]
    eps = 1 / 64
    cell = 2 * np.pi * np.hypot(1 / 2**j, 1 / 2 ** (j // 2))
    assert neighborhood_hits(StarSet.circle(2.0), y, 2 * np.pi * eps + cell)


def test_grid_helpers():
    spec = fourier_coefficients(np.ones((128, 128)))
    g = analysis_all(spec, "v", 4, 1)
    assert g.as_array().shape == (16, 4)
    assert g.nearest(g.points[9] + 1.0) == 9
