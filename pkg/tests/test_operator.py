import numpy as np
import pytest

from hormander.core.config import Settings
from hormander.core.exceptions import ConfigurationError, DomainError
from hormander.models import EvaluationStrategy
from hormander.services.experiment_service import random_test_function
from hormander.services.grid_service import forward_transform, make_grid
from hormander.services.norm_service import lp_quasinorm
from hormander.services.operator_service import HIGH_OFFSET, OperatorService
from hormander.services.symbol_service import (
    coifman_meyer_symbol,
    constant_symbol,
    example4_symbol,
    modulation_symbol,
    translation_symbol,
)


@pytest.fixture
def service():
    return OperatorService()


def _relative(a, b):
    return lp_quasinorm(a - b, 2.0) / lp_quasinorm(b, 2.0)


def test_constant_symbol_is_pointwise_product(service, bilinear_grid, annular_inputs):
    f1, f2 = annular_inputs[0]
    plan = service.make_plan(bilinear_grid, constant_symbol(1.0, n=2), J=4)
    assert plan.strategy is EvaluationStrategy.FAST
    output = service.apply(plan, [f1, f2])
    np.testing.assert_allclose(output.values, f1.values * f2.values, atol=1e-10)


def test_translation_shifts_its_block(service, bilinear_grid, annular_inputs):
    f1, f2 = annular_inputs[1]
    shift = 3 * bilinear_grid.spacing
    plan = service.make_plan(bilinear_grid, translation_symbol(shift, block=0, n=2), J=4)
    output = service.apply(plan, [f1, f2])
    np.testing.assert_allclose(output.values, np.roll(f1.values, 3) * f2.values, atol=1e-10)


def test_fast_and_direct_agree(service, bilinear_grid, annular_inputs):
    symbol = coifman_meyer_symbol(0.5)
    fs = annular_inputs[2]
    fast = service.apply(service.make_plan(bilinear_grid, symbol, J=4), fs)
    direct = service.apply(service.make_plan(bilinear_grid, symbol, J=4, strategy="direct"), fs)
    assert _relative(direct, fast) < 1e-10


def test_modulation_goes_direct(service, bilinear_grid, annular_inputs):
    f1, f2 = annular_inputs[3]
    c = 0.25
    plan = service.make_plan(bilinear_grid, modulation_symbol(c, n=2), J=4)
    assert plan.strategy is EvaluationStrategy.DIRECT
    x = bilinear_grid.axis()
    output = service.apply(plan, [f1, f2])
    np.testing.assert_allclose(output.values, np.exp(2j * np.pi * c * x) * f1.values * f2.values, atol=1e-10)


def test_linear_multiplier_is_contractive(service, scalar_grid):
    symbol = example4_symbol(a=2.0, b=1.0)
    plan = service.make_plan(scalar_grid, symbol, J=3)
    for seed in range(5):
        f = random_test_function(scalar_grid, seed, band_high=2)
        assert lp_quasinorm(service.apply(plan, [f]), 2.0) <= lp_quasinorm(f, 2.0) * (1.0 + 1e-12)


def test_plan_checks(service, bilinear_grid, scalar_grid):
    symbol = constant_symbol(1.0, n=2)
    with pytest.raises(DomainError):
        service.make_plan(bilinear_grid, symbol, J=-1)
    with pytest.raises(DomainError):
        service.make_plan(bilinear_grid, symbol, J=6)
    with pytest.raises(DomainError):
        service.make_plan(bilinear_grid, symbol, J=2, K=2 + HIGH_OFFSET - 1)
    with pytest.raises(DomainError):
        service.make_plan(bilinear_grid, modulation_symbol(1.0, n=2), J=2, strategy="fast")
    with pytest.raises(DomainError):
        service.make_plan(scalar_grid, symbol, J=2)


def test_direct_cost_ceiling(bilinear_grid):
    service = OperatorService(Settings(direct_eval_ceiling=1000))
    with pytest.raises(ConfigurationError) as error:
        service.make_plan(bilinear_grid, modulation_symbol(1.0, n=2), J=2)
    assert error.value.field == "points_per_axis"


def test_input_checks(service, bilinear_grid, annular_inputs):
    plan = service.make_plan(bilinear_grid, constant_symbol(1.0, n=2), J=2)
    f1, f2 = annular_inputs[0]
    with pytest.raises(DomainError):
        service.apply(plan, [f1])
    other = random_test_function(make_grid(1, 2, 8.0, 64), 0)
    with pytest.raises(DomainError):
        service.apply(plan, [f1, other])
    with pytest.raises(DomainError):
        service.apply(plan, [f1, forward_transform(f2)])
    with pytest.raises(DomainError):
        service.dyadic_piece(plan, 3, [f1, f2])


@pytest.mark.parametrize("symbol", [constant_symbol(1.0, n=2), coifman_meyer_symbol(0.5)], ids=["constant", "coifman_meyer"])
def test_reconstruction(service, bilinear_grid, annular_inputs, symbol):
    plan = service.make_plan(bilinear_grid, symbol, J=4)
    for seed in range(10):
        fs = annular_inputs[seed]
        assert _relative(service.reconstruct(plan, fs), service.apply(plan, fs)) < 1e-8


def test_factorization_agreement(service, bilinear_grid, annular_inputs):
    plan = service.make_plan(bilinear_grid, coifman_meyer_symbol(0.5), J=4)
    for j in range(0, 4):
        assert service.factorization_agreement(plan, j, annular_inputs[5]) < 1e-8


def test_top_piece_vanishes_below_its_band(service, bilinear_grid, annular_inputs):
    plan = service.make_plan(bilinear_grid, constant_symbol(1.0, n=2), J=4)
    piece = service.dyadic_piece(plan, 4, annular_inputs[6])
    assert np.max(np.abs(piece.values)) < 1e-12


@pytest.mark.parametrize("seed", range(10))
def test_split_telescopes(service, bilinear_grid, annular_inputs, seed):
    plan = service.make_plan(bilinear_grid, coifman_meyer_symbol(0.5), J=4)
    fs = annular_inputs[seed]
    result = service.split(plan, fs)
    diagnostics = result.diagnostics
    assert diagnostics.within_tolerance
    assert diagnostics.residual < 1e-6
    assert diagnostics.factorization_error < 1e-8
    assert diagnostics.K == 4 + HIGH_OFFSET
    assert len(result.low_pass_terms) == plan.J + 1

    radius = bilinear_grid.frequency_norms(1)
    for j, term in enumerate(result.low_pass_terms):
        piece_peak = np.max(np.abs(forward_transform(service.dyadic_piece(plan, j, fs)).values))
        outside = radius >= 2.0 ** (j - HIGH_OFFSET + 1)
        assert np.all(np.abs(forward_transform(term).values[outside]) <= 1e-12 * max(piece_peak, 1.0))


def test_split_of_constant_symbol_sums_to_pieces(service, bilinear_grid, annular_inputs):
    plan = service.make_plan(bilinear_grid, constant_symbol(1.0, n=2), J=4)
    fs = annular_inputs[8]
    result = service.split(plan, fs)
    pieces = service.dyadic_piece(plan, 0, fs)
    for j in range(1, plan.J + 1):
        pieces = pieces + service.dyadic_piece(plan, j, fs)
    total = result.I + result.II + result.III
    assert _relative(total, pieces) < 1e-6


def test_unimodular_multiplier_preserves_energy(service, scalar_grid):
    plan = service.make_plan(scalar_grid, translation_symbol(0.3), J=3)
    f = random_test_function(scalar_grid, 11, band_high=2)
    assert lp_quasinorm(service.apply(plan, [f]), 2.0) == pytest.approx(lp_quasinorm(f, 2.0), rel=1e-8)
