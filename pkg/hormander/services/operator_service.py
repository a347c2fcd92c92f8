"""
Evaluation of T_m(f_1, ..., f_n)(x) = sum over the lattice of
e^{2 pi i <x, xi_1 + ... + xi_n>} m(x, xi) f_1^(xi_1) ... f_n^(xi_n) dxi,
its low and dyadic pieces, and the splitting of each dyadic piece by output
frequency.
"""
import math
from concurrent.futures import ThreadPoolExecutor
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple

import numpy as np

from hormander.core.config import Settings, get_settings
from hormander.core.exceptions import ConfigurationError, DomainError
from hormander.core.logging import get_logger
from hormander.models import (
    Domain,
    EvaluationStrategy,
    FactorTerm,
    Grid,
    OperatorPlan,
    SampledFunction,
    SplitResult,
    Symbol,
)
from hormander.schemas.reports import SplitDiagnostics

from .bump_service import band_window, default_cushion, default_family, factor_window, lemma311_factors, verify_factorization
from .grid_service import forward_transform, frequency_function, inverse_transform
from .norm_service import lp_quasinorm

# Output-band offsets of the splitting; fixed by the support arithmetic
HIGH_OFFSET = 10
MATCHED_OFFSET = 9

SPLIT_TOLERANCE = 1e-6

# Kernel evaluations per direct-strategy chunk
CHUNK_ELEMENTS = 2**20


@lru_cache(maxsize=64)
def _factor_terms(grid: Grid, j: int, cushion: int) -> Tuple[FactorTerm, ...]:
    return tuple(lemma311_factors(grid, j, cushion=cushion))


def _relative_l2(a: SampledFunction, b: SampledFunction) -> float:
    reference = lp_quasinorm(b, 2.0)
    difference = lp_quasinorm(a - b, 2.0)
    return difference / reference if reference > 0.0 else difference


class OperatorService:
    """Plans and evaluates multilinear operators on one grid"""

    def __init__(self, settings: Optional[Settings] = None):
        self.settings = settings or get_settings()
        self.family = default_family()
        self.logger = get_logger("operator")

    # Planning

    def make_plan(
        self,
        grid: Grid,
        symbol: Symbol,
        J: int,
        K: Optional[int] = None,
        strategy: Optional[EvaluationStrategy] = None,
        cushion: Optional[int] = None,
    ) -> OperatorPlan:
        if symbol.d != grid.d or symbol.n != grid.n:
            raise DomainError(f"symbol {symbol.name} is for d={symbol.d}, n={symbol.n}")
        if J < 0:
            raise DomainError("J must be nonnegative")
        # the top band 2^(J-2) <= |xi| <= 2^J must meet the lattice
        lattice_radius = math.sqrt(grid.n * grid.d) * grid.max_frequency
        if 2.0 ** (J - 2) > lattice_radius:
            raise DomainError(f"band J={J} lies beyond the lattice radius {lattice_radius:.4g}")
        K = J + HIGH_OFFSET if K is None else K
        if K < J + HIGH_OFFSET:
            raise DomainError(f"K={K} must be at least J + {HIGH_OFFSET}")

        if strategy is None:
            strategy = EvaluationStrategy.DIRECT if symbol.x_dependent else EvaluationStrategy.FAST
        strategy = EvaluationStrategy(strategy)
        if strategy is EvaluationStrategy.FAST and symbol.x_dependent:
            raise DomainError(f"fast strategy needs an x-independent symbol, {symbol.name} depends on x")
        if strategy is EvaluationStrategy.DIRECT:
            cost = grid.points_per_axis ** (grid.d * (grid.n + 1))
            if cost > self.settings.direct_eval_ceiling:
                raise ConfigurationError(
                    f"direct evaluation needs {cost} kernel evaluations "
                    f"(ceiling {self.settings.direct_eval_ceiling}); use the fast strategy or a smaller N",
                    field="points_per_axis",
                )

        plan = OperatorPlan(
            grid=grid, symbol=symbol, J=J, K=K, strategy=strategy,
            cushion=default_cushion(grid.n) if cushion is None else cushion,
        )
        self.logger.info(f"plan {plan!r}")
        return plan

    # Evaluation

    def _spectra(self, plan: OperatorPlan, fs: Sequence[SampledFunction]) -> List[np.ndarray]:
        if len(fs) != plan.grid.n:
            raise DomainError(f"expected {plan.grid.n} inputs, got {len(fs)}")
        spectra = []
        for index, f in enumerate(fs):
            if not f.grid.compatible(plan.grid):
                raise DomainError(f"input {index} lives on a different grid")
            if f.domain is not Domain.SPACE or f.arity != 1:
                raise DomainError(f"input {index} must be a single-block space-domain function")
            spectra.append(forward_transform(f).values)
        return spectra

    def _input_product(self, grid: Grid, spectra: List[np.ndarray]) -> np.ndarray:
        """prod_i f_i^(xi_i) on the lattice of (R^d)^n"""
        d, n, N = grid.d, grid.n, grid.points_per_axis
        product = np.ones(grid.shape(n), dtype=np.complex128)
        for index, spectrum in enumerate(spectra):
            shape = (1,) * (d * index) + (N,) * d + (1,) * (d * (n - index - 1))
            product = product * spectrum.reshape(shape)
        return product

    def _evaluate(
        self,
        plan: OperatorPlan,
        fs: Sequence[SampledFunction],
        window: Optional[np.ndarray] = None,
    ) -> SampledFunction:
        grid = plan.grid
        amplitude = self._input_product(grid, self._spectra(plan, fs))
        if window is not None:
            amplitude = amplitude * window
        if plan.strategy is EvaluationStrategy.FAST:
            return self._evaluate_fast(plan, amplitude)
        return self._evaluate_direct(plan, amplitude)

    def _evaluate_fast(self, plan: OperatorPlan, amplitude: np.ndarray) -> SampledFunction:
        """Aggregate m * prod f_i^ on xi_1 + ... + xi_n, then one inverse transform"""
        grid = plan.grid
        d, n, N = grid.d, grid.n, grid.points_per_axis
        xi = grid.frequency_mesh(n)
        values = amplitude * plan.symbol(np.zeros(d), xi)

        # centered index of each block, summed per axis and wrapped onto the lattice
        block_index = np.indices(grid.shape(n)).reshape((n, d) + grid.shape(n))
        output_index = (block_index.sum(axis=0) - (n - 1) * (N // 2)) % N
        flat = np.ravel_multi_index(tuple(output_index), (N,) * d).ravel()

        size = N**d
        aggregated = np.bincount(flat, weights=values.real.ravel(), minlength=size) + 1j * np.bincount(
            flat, weights=values.imag.ravel(), minlength=size
        )
        cell = grid.frequency_spacing ** ((n - 1) * d)
        return inverse_transform(frequency_function(grid, aggregated * cell))

    def _evaluate_direct(self, plan: OperatorPlan, amplitude: np.ndarray) -> SampledFunction:
        """Per-x lattice sum with the symbol evaluated lazily on x chunks"""
        grid = plan.grid
        d, n = grid.d, grid.n
        flat_amplitude = amplitude.reshape(-1)
        support = np.flatnonzero(flat_amplitude)
        xi = grid.frequency_points(n)[support]
        weights = flat_amplitude[support] * grid.frequency_spacing ** (n * d)
        output_frequency = xi.sum(axis=1)
        x_points = grid.space_points()

        result = np.zeros(len(x_points), dtype=np.complex128)
        if support.size == 0:
            return self._space(grid, result)

        chunk = max(1, CHUNK_ELEMENTS // support.size)
        starts = list(range(0, len(x_points), chunk))

        def evaluate_chunk(start: int) -> None:
            x = x_points[start:start + chunk]
            phase = np.exp(2j * np.pi * (x @ output_frequency.T))
            kernel = plan.symbol(x[:, None, :], xi[None, :, :, :])
            result[start:start + chunk] = (phase * kernel) @ weights

        with ThreadPoolExecutor(max_workers=self.settings.threads) as pool:
            list(pool.map(evaluate_chunk, starts))
        return self._space(grid, result)

    @staticmethod
    def _space(grid: Grid, values: np.ndarray) -> SampledFunction:
        return SampledFunction(grid, Domain.SPACE, 1, values)

    def apply(self, plan: OperatorPlan, fs: Sequence[SampledFunction]) -> SampledFunction:
        return self._evaluate(plan, fs)

    # Dyadic decomposition

    def _check_level(self, plan: OperatorPlan, j: int) -> None:
        if not 0 <= j <= plan.J:
            raise DomainError(f"level j={j} outside 0..{plan.J}")

    def low_window(self, grid: Grid) -> np.ndarray:
        return self.family.low_pass(grid.frequency_norms(grid.n))

    def factor_terms(self, plan: OperatorPlan, j: int) -> Tuple[FactorTerm, ...]:
        return _factor_terms(plan.grid, j, plan.cushion)

    def low_piece(self, plan: OperatorPlan, fs: Sequence[SampledFunction]) -> SampledFunction:
        """Operator with symbol m(x, xi) Phi(2 xi)"""
        return self._evaluate(plan, fs, self.low_window(plan.grid))

    def dyadic_piece(self, plan: OperatorPlan, j: int, fs: Sequence[SampledFunction]) -> SampledFunction:
        """Operator with symbol m(x, xi) Psi(2^-j xi), assembled from the factor terms"""
        self._check_level(plan, j)
        terms = self.factor_terms(plan, j)
        return self._evaluate(plan, fs, factor_window(plan.grid, j, list(terms), self.family))

    def windowed_piece(self, plan: OperatorPlan, j: int, fs: Sequence[SampledFunction]) -> SampledFunction:
        """Unfactored dyadic piece, evaluated with the window directly"""
        self._check_level(plan, j)
        return self._evaluate(plan, fs, band_window(plan.grid, j, self.family))

    def factorization_agreement(self, plan: OperatorPlan, j: int, fs: Sequence[SampledFunction]) -> float:
        """Relative L^2 difference between the factored and unfactored dyadic piece"""
        return _relative_l2(self.dyadic_piece(plan, j, fs), self.windowed_piece(plan, j, fs))

    def reconstruct(self, plan: OperatorPlan, fs: Sequence[SampledFunction]) -> SampledFunction:
        """low_piece + sum over j <= J of dyadic_piece"""
        total = self.low_piece(plan, fs)
        for j in range(0, plan.J + 1):
            total = total + self.dyadic_piece(plan, j, fs)
        return total

    # Output-frequency splitting

    def _output_filter(self, grid: Grid, level: int, band: bool) -> np.ndarray:
        radius = grid.frequency_norms(1)
        if band:
            return self.family.psi_at_level(level, radius)
        return self.family.phi_at_level(level, radius)

    def split(self, plan: OperatorPlan, fs: Sequence[SampledFunction]) -> SplitResult:
        """Split every T^j into output bands k >= j + 10 (I), the low pass at j - 10 (II) and |k - j| <= 9 (III)"""
        if plan.K < plan.J + HIGH_OFFSET:
            raise DomainError(f"K={plan.K} must be at least J + {HIGH_OFFSET}")
        grid = plan.grid
        shape = grid.shape(1)
        high = np.zeros(shape, dtype=np.complex128)
        matched = np.zeros(shape, dtype=np.complex128)
        pieces_total = np.zeros(shape, dtype=np.complex128)
        low_pass_terms = []
        factorization_error = 0.0

        for j in range(0, plan.J + 1):
            terms = self.factor_terms(plan, j)
            factorization_error = max(factorization_error, verify_factorization(grid, j, list(terms), self.family))
            spectrum = forward_transform(self.dyadic_piece(plan, j, fs)).values
            pieces_total += spectrum
            high += spectrum * sum(
                self._output_filter(grid, k, band=True) for k in range(j + HIGH_OFFSET, plan.K + 1)
            )
            matched += spectrum * sum(
                self._output_filter(grid, k, band=True)
                for k in range(j - MATCHED_OFFSET, j + MATCHED_OFFSET + 1)
            )
            low_spectrum = spectrum * self._output_filter(grid, j - HIGH_OFFSET, band=False)
            low_pass_terms.append(inverse_transform(frequency_function(grid, low_spectrum)))

        term_I = inverse_transform(frequency_function(grid, high))
        term_III = inverse_transform(frequency_function(grid, matched))
        term_II = low_pass_terms[0]
        for term in low_pass_terms[1:]:
            term_II = term_II + term

        cutoff = self._output_filter(grid, plan.K, band=False)
        reference = inverse_transform(frequency_function(grid, pieces_total))
        filtered = inverse_transform(frequency_function(grid, pieces_total * cutoff))
        outside = inverse_transform(frequency_function(grid, pieces_total * (1.0 - cutoff)))

        reference_norm = lp_quasinorm(reference, 2.0)
        total = term_I + term_II + term_III
        residual = lp_quasinorm(total - filtered, 2.0)
        energy_outside = lp_quasinorm(outside, 2.0)
        if reference_norm > 0.0:
            residual /= reference_norm
            energy_outside /= reference_norm

        diagnostics = SplitDiagnostics(
            J=plan.J,
            K=plan.K,
            reference_norm=reference_norm,
            residual=residual,
            energy_outside_band=energy_outside,
            factorization_error=factorization_error,
            tolerance=SPLIT_TOLERANCE,
            within_tolerance=residual < SPLIT_TOLERANCE,
        )
        if not diagnostics.within_tolerance:
            self.logger.warning(f"split residual {residual:.3g} above {SPLIT_TOLERANCE}")
        return SplitResult(
            I=term_I, II=term_II, III=term_III,
            low_pass_terms=tuple(low_pass_terms),
            diagnostics=diagnostics,
        )
