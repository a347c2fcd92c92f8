import numpy as np
import pytest
from scipy.integrate import quad

from hormander.core.config import Settings
from hormander.core.exceptions import DomainError
from hormander.models import Symbol
from hormander.services.bump_service import default_family
from hormander.services.experiment_service import norm_scan, random_test_function
from hormander.services.grid_service import forward_transform, frequency_function, inverse_transform, make_grid, space_function
from hormander.services.norm_service import (
    Hp_quasinorm,
    class_band_exponent,
    effective_scales,
    global_scales,
    hormander_norm,
    hp_quasinorm,
    local_scales,
    lp_quasinorm,
    make_x_probes,
    maximal_field,
    product_sobolev,
    slice_windows,
    sobolev_l2s,
    sobolev_shell_profile,
    symbol_norm_s_delta,
)
from hormander.services.symbol_service import (
    constant_symbol,
    example2_symbol,
    example4_symbol,
    modulation_symbol,
)


@pytest.fixture
def slice_grid():
    return make_grid(1, 1, 4.0, 512)


@pytest.fixture
def fine_slice_grid():
    return make_grid(1, 1, 4.0, 32768)


def _window_norms(grid, s):
    low, band = slice_windows(grid, 1)
    return sobolev_l2s(space_function(grid, low), s), sobolev_l2s(space_function(grid, band), s)


def test_lebesgue_norms_of_gaussian(gaussian):
    assert lp_quasinorm(gaussian, 2.0) == pytest.approx(2.0**-0.25, rel=1e-12)
    assert lp_quasinorm(gaussian, 1.0) == pytest.approx(1.0, rel=1e-12)
    assert lp_quasinorm(gaussian, np.inf) == 1.0


def test_lebesgue_checks(gaussian):
    with pytest.raises(DomainError):
        lp_quasinorm(gaussian, 0.0)
    with pytest.raises(DomainError):
        lp_quasinorm(forward_transform(gaussian), 2.0)


def test_sobolev_order_zero_is_l2(scalar_grid):
    f = random_test_function(scalar_grid, 7, band_high=2)
    assert sobolev_l2s(f, 0.0) == pytest.approx(lp_quasinorm(f, 2.0), rel=1e-10)


def test_sobolev_single_mode(scalar_grid):
    values = np.zeros(scalar_grid.shape(1), dtype=complex)
    index = scalar_grid.points_per_axis // 2 + 12
    values[index] = scalar_grid.side_length
    xi0 = scalar_grid.frequency_axis()[index]
    mode = inverse_transform(frequency_function(scalar_grid, values))
    s = 1.5
    expected = np.sqrt((1.0 + 4.0 * np.pi**2 * xi0**2) ** s * scalar_grid.side_length)
    assert sobolev_l2s(mode, s) == pytest.approx(expected, rel=1e-12)


def test_sobolev_gaussian_against_quadrature(gaussian):
    energy, _ = quad(lambda eta: (1.0 + 4.0 * np.pi**2 * eta**2) * np.exp(-2.0 * np.pi * eta**2), -np.inf, np.inf)
    assert sobolev_l2s(gaussian, 1.0) == pytest.approx(np.sqrt(energy), abs=1e-6)


def test_sobolev_rejects_negative_order(gaussian):
    with pytest.raises(DomainError):
        sobolev_l2s(gaussian, -0.5)


def test_product_sobolev_separates(bilinear_grid):
    x = bilinear_grid.space_mesh(2)[..., 0]
    g1 = np.exp(-np.pi * x[..., 0] ** 2)
    g2 = np.exp(-2.0 * np.pi * x[..., 1] ** 2)
    F = space_function(bilinear_grid, g1 * g2, arity=2)
    axis = bilinear_grid.axis()
    one = space_function(make_grid(1, 1, 16.0, 128), np.exp(-np.pi * axis**2))
    two = space_function(make_grid(1, 1, 16.0, 128), np.exp(-2.0 * np.pi * axis**2))
    expected = sobolev_l2s(one, 1.0) * sobolev_l2s(two, 0.5)
    assert product_sobolev(F, [1.0, 0.5]) == pytest.approx(expected, rel=1e-10)
    assert product_sobolev(F, [0.0, 0.0]) == pytest.approx(sobolev_l2s(F, 0.0), rel=1e-12)
    with pytest.raises(DomainError):
        product_sobolev(F, [1.0])


def test_shell_profile_of_a_kink(fine_slice_grid):
    eta = fine_slice_grid.axis()
    window = default_family().Psi(np.abs(eta))
    F = space_function(fine_slice_grid, np.abs(2.0 * eta - 1.0) * window)
    for s, sign in ((1.4, -1.0), (1.6, 1.0)):
        profile = sobolev_shell_profile(F, s)
        assert profile.tail_slope is not None
        assert np.sign(profile.tail_slope) == sign
        assert profile.tail_slope == pytest.approx(2.0 * s - 3.0, abs=0.15)


def test_hormander_norm_of_constant(slice_grid):
    _, band = _window_norms(slice_grid, 1.5)
    table = hormander_norm(constant_symbol(1.0), 1.5, range(-3, 4), slice_grid)
    assert table.levels == list(range(-3, 4))
    np.testing.assert_allclose(table.values, band, rtol=1e-12)
    assert table.sup == pytest.approx(band)


def test_hormander_norm_checks(slice_grid):
    with pytest.raises(DomainError):
        hormander_norm(modulation_symbol(1.0), 1.0, range(3), slice_grid)
    with pytest.raises(DomainError):
        hormander_norm(constant_symbol(1.0), 1.0, [], slice_grid)
    with pytest.raises(DomainError):
        hormander_norm(constant_symbol(1.0), 1.0, range(3), make_grid(1, 1, 1.0, 64))


def test_symbol_norm_of_constant(slice_grid):
    s = 1.0
    low, band = _window_norms(slice_grid, s)
    report = symbol_norm_s_delta(constant_symbol(1.0), s, 0.0, np.array([[0.0], [1.0]]), 4, slice_grid)
    assert report.low == pytest.approx(low, rel=1e-12)
    assert all(entry.order1 == 0.0 for entry in report.bands)
    assert report.band_sup == pytest.approx(band, rel=1e-12)
    assert report.total == pytest.approx(low + band, rel=1e-12)
    assert len(report.to_frame()) == 2
    assert len(report.to_frame(per_level=True)) == 1 + 5
    assert report.to_frame()["order1"].eq(0.0).all()


def test_symbol_norm_of_modulation(slice_grid):
    s, c, delta = 1.0, 0.25, 0.5
    low, band = _window_norms(slice_grid, s)
    report = symbol_norm_s_delta(modulation_symbol(c), s, delta, np.array([[0.0], [0.7]]), 3, slice_grid)
    assert report.low == pytest.approx(low * (1.0 + 2.0 * np.pi * c), rel=1e-10)
    for entry in report.bands:
        assert entry.order1 == pytest.approx(2.0 ** (-entry.j * delta) * 2.0 * np.pi * c * band, rel=1e-10)
    assert report.band_sup == pytest.approx(band * (1.0 + 2.0 * np.pi * c), rel=1e-10)


def test_symbol_norm_finite_difference_fallback(slice_grid):
    analytic = modulation_symbol(0.25)
    plain = Symbol(name="plain", d=1, n=1, evaluator=analytic.evaluator)
    probes = np.array([[0.3]])
    exact = symbol_norm_s_delta(analytic, 1.0, 0.0, probes, 2, slice_grid)
    numeric = symbol_norm_s_delta(plain, 1.0, 0.0, probes, 2, slice_grid, x_step=1e-5)
    assert numeric.total == pytest.approx(exact.total, rel=1e-6)
    with pytest.raises(DomainError):
        symbol_norm_s_delta(plain, 1.0, 0.0, probes, 2, slice_grid, allow_fallback=False)


def test_symbol_norm_checks(slice_grid):
    symbol = constant_symbol(1.0)
    with pytest.raises(DomainError):
        symbol_norm_s_delta(symbol, 1.0, 1.0, np.zeros((1, 1)), 2, slice_grid)
    with pytest.raises(DomainError):
        symbol_norm_s_delta(symbol, 1.0, 0.0, np.zeros((0, 1)), 2, slice_grid)


def test_x_probes(scalar_grid):
    probes, subsampled = make_x_probes(scalar_grid)
    assert not subsampled
    assert probes.shape == (128, 1)

    settings = Settings(probe_limit=64, probe_subsample=32)
    probes, subsampled = make_x_probes(scalar_grid, settings, seed=1)
    assert subsampled
    assert probes.shape == (32, 1)
    assert np.all(np.abs(probes) <= scalar_grid.side_length / 2.0)


def test_class_band_exponent():
    assert class_band_exponent(1.0, 0.0, 0.0, 2.0) == 0.0
    assert class_band_exponent(0.5, 0.25, -1.0, 2.0, alpha_order=1) == pytest.approx(0.25)


def test_norm_scan_of_constant_is_flat(slice_grid):
    result = norm_scan(constant_symbol(1.0), [1.0, 2.0], range(0, 5), 0.0, np.zeros((1, 1)), slice_grid)
    for s in (1.0, 2.0):
        fit = result.fit(s)
        assert fit.slope == pytest.approx(0.0, abs=1e-10)
        assert fit.predicted_slope == 0.0
        norms = result.band_norms(s)
        assert max(norms) == pytest.approx(min(norms), rel=1e-12)
    assert list(result.to_frame().columns) == ["s", "j", "band_norm", "tail_slope"]


def test_example4_band_norm_slope(fine_slice_grid):
    a, b, s = 2.0, 3.0, 1.0
    result = norm_scan(example4_symbol(a=a, b=b), [s], range(0, 7), 0.0, np.zeros((1, 1)), fine_slice_grid)
    fit = result.fit(s)
    assert fit.predicted_slope == a * s - b
    assert fit.slope == pytest.approx(-1.0, abs=0.15)


def test_example2_tail_slope_flips_at_threshold(fine_slice_grid):
    # gamma + nd/2 = 1.5; the kink sits inside the window for j >= 2
    result = norm_scan(example2_symbol(gamma=1.0), [1.4, 1.6], range(2, 5), 0.0, np.zeros((1, 1)), fine_slice_grid)
    for row in result.rows:
        assert row.tail_slope is not None
        assert (row.tail_slope < 0.0) if row.s == 1.4 else (row.tail_slope > 0.0)
    assert result.fit(1.4).mean_tail_slope < 0.0 < result.fit(1.6).mean_tail_slope


def test_hp_below_Hp(scalar_grid):
    for seed in range(100):
        f = random_test_function(scalar_grid, seed, band_high=2)
        for p in (0.75, 1.0, 2.0):
            assert hp_quasinorm(f, p) <= Hp_quasinorm(f, p)


@pytest.fixture(scope="module")
def fine_gaussian():
    grid = make_grid(1, 1, 8.0, 2**17)
    x = grid.space_mesh(1)[..., 0, 0]
    return space_function(grid, np.exp(-np.pi * x**2))


def test_sub_spacing_scales_collapse(scalar_grid):
    assert effective_scales(scalar_grid, local_scales(8)) == [0.125, 0.25, 0.5, 1.0]
    assert effective_scales(scalar_grid, local_scales(16)) == effective_scales(scalar_grid, local_scales(8))
    assert max(effective_scales(scalar_grid, global_scales(8))) == 8.0


@pytest.mark.parametrize("p", [1.0, 2.0])
def test_hp_scale_doubling_is_stable(fine_gaussian, p):
    grid = fine_gaussian.grid
    assert len(effective_scales(grid, local_scales(8))) == 9
    assert len(effective_scales(grid, local_scales(16))) == 15
    coarse = hp_quasinorm(fine_gaussian, p, scale_count=8)
    fine = hp_quasinorm(fine_gaussian, p, scale_count=16)
    assert abs(fine - coarse) / coarse < 0.01

    assert len(effective_scales(grid, global_scales(8))) == 11
    assert len(effective_scales(grid, global_scales(16))) == 17
    coarse = Hp_quasinorm(fine_gaussian, p, scale_count=8)
    fine = Hp_quasinorm(fine_gaussian, p, scale_count=16)
    assert abs(fine - coarse) / coarse < 0.01


def test_maximal_field_dominates_modulus(gaussian):
    field = maximal_field(gaussian, [2.0**-m for m in range(9)])
    assert np.all(field >= np.abs(gaussian.values) - 1e-12)
    with pytest.raises(DomainError):
        maximal_field(forward_transform(gaussian), [1.0])


def test_hardy_checks(gaussian):
    with pytest.raises(DomainError):
        hp_quasinorm(gaussian, 0.0)
    with pytest.raises(DomainError):
        Hp_quasinorm(gaussian, 1.0, scale_count=1)


def test_example4_flips_at_b_over_a(fine_slice_grid):
    result = norm_scan(example4_symbol(a=2.0, b=3.0), [1.4, 1.6], range(0, 7), 0.0, np.zeros((1, 1)), fine_slice_grid)
    assert result.fit(1.4).slope < 0.0 < result.fit(1.6).slope
    growing = result.band_norms(1.6)[-3:]
    assert growing[0] < growing[1] < growing[2]
