import numpy as np
import pytest

from hormander.core.exceptions import ConfigurationError, DomainError
from hormander.models import Domain
from hormander.services.grid_service import (
    forward_transform,
    frequency_function,
    inverse_transform,
    make_grid,
    reflect,
    space_function,
)


def _random_samples(grid, seed=0):
    rng = np.random.default_rng(seed)
    shape = grid.shape(1)
    return space_function(grid, rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def test_grid_arithmetic():
    grid = make_grid(1, 2, 16.0, 128)
    assert grid.spacing == 0.125
    assert grid.frequency_spacing == 0.0625
    assert grid.max_frequency == 4.0
    assert grid.sample_count(1) == 128
    assert grid.sample_count(2) == 128**2


def test_minimal_grid():
    grid = make_grid(1, 1, 1.0, 2)
    assert grid.spacing == 1.0
    np.testing.assert_array_equal(grid.frequency_axis(), [-1.0, 0.0])


def test_memory_budget_guard():
    with pytest.raises(ConfigurationError) as error:
        make_grid(2, 3, 8.0, 64)
    assert error.value.field == "points_per_axis"


@pytest.mark.parametrize(
    "args, field",
    [
        ((1, 1, 16.0, 127), "points_per_axis"),
        ((1, 1, 16.0, 0), "points_per_axis"),
        ((3, 1, 16.0, 16), "d"),
        ((1, 4, 16.0, 16), "n"),
        ((1, 1, -1.0, 16), "side_length"),
    ],
)
def test_invalid_grids_name_the_field(args, field):
    with pytest.raises(ConfigurationError) as error:
        make_grid(*args)
    assert error.value.field == field


def test_gaussian_is_self_dual(scalar_grid, gaussian):
    spectrum = forward_transform(gaussian)
    xi = scalar_grid.frequency_mesh(1)[..., 0, 0]
    np.testing.assert_allclose(spectrum.values, np.exp(-np.pi * xi**2), atol=1e-10)


def test_constant_has_all_mass_at_zero(scalar_grid):
    spectrum = forward_transform(space_function(scalar_grid, np.ones(scalar_grid.shape(1)))).values
    zero = scalar_grid.points_per_axis // 2
    assert spectrum[zero] == pytest.approx(16.0, abs=1e-12)
    spectrum = spectrum.copy()
    spectrum[zero] = 0.0
    assert np.max(np.abs(spectrum)) < 1e-12


def test_round_trip(scalar_grid):
    f = _random_samples(scalar_grid)
    back = inverse_transform(forward_transform(f))
    assert np.max(np.abs(back.values - f.values)) <= 1e-12 * np.max(np.abs(f.values))


def test_round_trip_two_blocks():
    grid = make_grid(1, 2, 8.0, 32)
    rng = np.random.default_rng(3)
    f = space_function(grid, rng.standard_normal(grid.shape(2)), arity=2)
    back = inverse_transform(forward_transform(f))
    np.testing.assert_allclose(back.values, f.values, atol=1e-12)


def test_single_mode(scalar_grid):
    values = np.zeros(scalar_grid.shape(1), dtype=complex)
    index = scalar_grid.points_per_axis // 2 + 5
    values[index] = 1.0
    xi0 = scalar_grid.frequency_axis()[index]
    f = inverse_transform(frequency_function(scalar_grid, values))
    x = scalar_grid.axis()
    np.testing.assert_allclose(f.values, np.exp(2j * np.pi * x * xi0) / 16.0, atol=1e-14)


def test_reflection_commutes_with_transform(scalar_grid):
    f = _random_samples(scalar_grid, seed=1)
    np.testing.assert_allclose(
        forward_transform(reflect(f)).values, reflect(forward_transform(f)).values, atol=1e-12
    )


def test_parseval(scalar_grid):
    f = _random_samples(scalar_grid, seed=2)
    spectrum = forward_transform(f)
    space_side = np.sum(np.abs(f.values) ** 2) * scalar_grid.spacing
    frequency_side = np.sum(np.abs(spectrum.values) ** 2) * scalar_grid.frequency_spacing
    assert frequency_side == pytest.approx(space_side, rel=1e-10)


def test_linearity(scalar_grid):
    f = _random_samples(scalar_grid, seed=3)
    g = _random_samples(scalar_grid, seed=4)
    a, b = 2.0 - 1.0j, 0.5
    combined = forward_transform(f.scaled(a) + g.scaled(b)).values
    separate = a * forward_transform(f).values + b * forward_transform(g).values
    np.testing.assert_allclose(combined, separate, atol=1e-13 * np.max(np.abs(separate)))


def test_translation_law(scalar_grid):
    f = _random_samples(scalar_grid, seed=5)
    steps = 3
    shift = steps * scalar_grid.spacing
    shifted = f.with_values(np.roll(f.values, steps))
    xi = scalar_grid.frequency_axis()
    expected = np.exp(-2j * np.pi * shift * xi) * forward_transform(f).values
    np.testing.assert_allclose(forward_transform(shifted).values, expected, atol=1e-12)


def test_wrong_domain_tag(scalar_grid):
    f = _random_samples(scalar_grid)
    with pytest.raises(DomainError):
        inverse_transform(f)
    with pytest.raises(DomainError):
        forward_transform(forward_transform(f))


def test_sampled_function_is_immutable(scalar_grid):
    f = _random_samples(scalar_grid)
    assert f.domain is Domain.SPACE
    with pytest.raises(ValueError):
        f.values[0] = 1.0
