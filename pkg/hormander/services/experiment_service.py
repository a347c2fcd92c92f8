"""
Experiment driver: seeded test ensembles, boundedness ratios, norm scans and
the calibration of empirical constants.
"""
import statistics
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from hormander.core.config import Settings, get_settings
from hormander.core.exceptions import BandLimitError, HormanderError
from hormander.core.logging import get_logger
from hormander.models import Grid, SampledFunction, Symbol
from hormander.schemas.config import ExperimentConfig
from hormander.schemas.reports import (
    BoundednessReport,
    DecomposeReport,
    MihlinReport,
    NormScanFit,
    NormScanResult,
    NormScanRow,
    RatioSummary,
    RegionVerdicts,
    SymbolNormReport,
)

from .bump_service import make_profile
from .calibration_service import CalibrationStore
from .grid_service import frequency_function, inverse_transform, make_grid
from .maximal_service import peetre_ratio, square_function_ratios
from .mihlin_service import mihlin_estimate
from .norm_service import (
    effective_scales,
    hp_quasinorm,
    local_scales,
    lp_quasinorm,
    make_x_probes,
    slice_norms,
    slice_windows,
    sobolev_shell_profile,
    symbol_norm_s_delta,
    symbol_slice,
)
from .operator_service import OperatorService
from .region_service import admissible_theorem21, in_A, kato_condition, region_sweep
from .symbol_service import default_registry

logger = get_logger("harness")

STABILITY_FACTOR = 3.0
CALIBRATION_SEEDS = tuple(range(32))


def band_envelope(radius: np.ndarray, band_low: Optional[int], band_high: int, profile: str = "smooth") -> np.ndarray:
    """Spectral envelope supported in 2^band_low < |xi| < 2^band_high (low pass when band_low is None)"""
    if profile == "flat":
        envelope = (radius < 2.0**band_high).astype(float)
        if band_low is not None:
            envelope *= radius > 2.0**band_low
        return envelope
    bump = make_profile(1.0, 2.0)
    envelope = bump(2.0 * radius / 2.0**band_high)
    if band_low is not None:
        envelope = envelope * (1.0 - bump(radius / 2.0**band_low))
    return envelope


def random_test_function(
    grid: Grid,
    seed: int,
    band_high: int = 1,
    band_low: Optional[int] = None,
    profile: str = "smooth",
    normalize: bool = False,
    stream: Sequence[int] = (),
    scale_count: int = 8,
) -> SampledFunction:
    """Band-limited sample with seeded complex Gaussian coefficients.

    The generator is seeded with (seed, *stream); normalize divides by the h^2
    quasi-norm.
    """
    if band_low is not None and band_low >= band_high:
        raise BandLimitError(f"empty band [2^{band_low}, 2^{band_high}]")
    if 2.0**band_high > grid.max_frequency:
        raise BandLimitError(f"band edge 2^{band_high} exceeds the lattice frequency {grid.max_frequency}")
    radius = grid.frequency_norms(1)
    envelope = band_envelope(radius, band_low, band_high, profile)
    if not np.any(envelope > 0.0):
        raise BandLimitError(f"band [2^{band_low}, 2^{band_high}] holds no lattice frequency")

    rng = np.random.default_rng(np.random.SeedSequence([seed, *stream]))
    shape = grid.shape(1)
    coefficients = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    f = inverse_transform(frequency_function(grid, coefficients * envelope))
    if normalize:
        f = f.scaled(1.0 / hp_quasinorm(f, 2.0, scale_count))
    return f


def _predicted_scan_slope(symbol: Symbol, s: float) -> Optional[float]:
    if symbol.name == "constant":
        return 0.0
    if symbol.name == "example4":
        return symbol.parameters["a"] * s - symbol.parameters["b"]
    return None


def norm_scan(
    symbol: Symbol,
    s_values: Iterable[float],
    j_range: Iterable[int],
    delta: float,
    x_probes: np.ndarray,
    symbol_grid: Grid,
    x_step: Optional[float] = None,
    tail: Optional[Tuple[int, int]] = None,
    fit_levels: Optional[Iterable[int]] = None,
) -> NormScanResult:
    """Band norms per (s, j), their log2 slope in j, and the spectral tail slope of each slice.

    The slope is fitted on `fit_levels`, by default the upper half of j_range:
    on the lowest levels the window's own derivatives dominate the norm.
    """
    x_probes = np.atleast_2d(np.asarray(x_probes, dtype=float))
    evaluated = x_probes if symbol.x_dependent else x_probes[:1]
    x_step = symbol_grid.spacing / 4.0 if x_step is None else x_step
    _, band = slice_windows(symbol_grid, symbol.n)
    levels = list(j_range)
    fitted_levels = set(fit_levels) if fit_levels is not None else set(levels[len(levels) // 2:])

    rows: List[NormScanRow] = []
    fits: List[NormScanFit] = []
    for s in s_values:
        norms = []
        tails = []
        damping = [2.0 ** (-j * delta) for j in levels]
        for j, factor in zip(levels, damping):
            pairs = [slice_norms(symbol, x, j, symbol_grid, band, s, x_step) for x in evaluated]
            totals = [order0 + factor * order1 for order0, order1 in pairs]
            worst = int(np.argmax(totals))
            profile = sobolev_shell_profile(symbol_slice(symbol, evaluated[worst], j, symbol_grid, band), s, tail)
            norms.append(totals[worst])
            tails.append(profile.tail_slope)
            rows.append(NormScanRow(s=s, j=j, band_norm=totals[worst], tail_slope=profile.tail_slope))

        positive = [(j, value) for j, value in zip(levels, norms) if value > 0.0 and j in fitted_levels]
        slope = None
        if len(positive) >= 2:
            js, values = zip(*positive)
            slope = float(np.polyfit(js, np.log2(values), 1)[0])
        known = [t for t in tails if t is not None]
        fits.append(NormScanFit(
            s=s,
            slope=slope,
            mean_tail_slope=float(np.mean(known)) if known else None,
            predicted_slope=_predicted_scan_slope(symbol, s),
        ))
    return NormScanResult(symbol=symbol.name, delta=delta, rows=rows, fits=fits)


def run_calibration(
    grid: Grid,
    store: CalibrationStore,
    seeds: Iterable[int] = CALIBRATION_SEEDS,
    r: float = 1.0,
    p: float = 1.0,
    band_high: int = 1,
    scale_count: int = 8,
) -> Dict[str, float]:
    """Record (first run) or check the Peetre and square-function constants over a seed set"""
    seeds = list(seeds)
    band = 2.0**band_high
    peetre = 0.0
    local = 0.0
    global_ = 0.0
    for seed in seeds:
        g = random_test_function(grid, seed, band_high=band_high)
        peetre = max(peetre, peetre_ratio(g, band, r)[1])
        # no zero frequency, so the global square function controls H^p
        h = random_test_function(grid, seed, band_high=band_high, band_low=band_high - 3)
        ratios = square_function_ratios(h, p, scale_count)
        local = max(local, ratios["local"])
        global_ = max(global_, ratios["global"])

    measured = {
        f"peetre_r{r:g}": peetre,
        f"square_local_p{p:g}": local,
        f"square_global_p{p:g}": global_,
    }
    constants = {key: store.check(key, value) for key, value in measured.items()}
    logger.info(f"calibration over {len(seeds)} seeds: {measured}")
    return constants


class ExperimentService:
    """Grid, symbol, operator and norm services assembled for one experiment config"""

    def __init__(self, config: ExperimentConfig, settings: Optional[Settings] = None):
        self.config = config
        self.settings = settings or get_settings()
        self.logger = get_logger("harness")

        grid_config = config.grid
        self.grid = make_grid(grid_config.d, grid_config.n, grid_config.side_length,
                              grid_config.points_per_axis, self.settings)
        self.symbol_grid = make_grid(grid_config.d, grid_config.n, config.symbol_grid.side_length,
                                     config.symbol_grid.points_per_axis, self.settings)
        self.symbol = default_registry().create(config.symbol.name, grid_config.d, grid_config.n,
                                                config.symbol.params)
        self.operators = OperatorService(self.settings)

    @property
    def x_step(self) -> float:
        return self.grid.side_length / (4.0 * self.grid.points_per_axis)

    def inputs(self, group: int = 0, sample: int = 0) -> List[SampledFunction]:
        ensemble = self.config.ensemble
        return [
            random_test_function(
                self.grid, ensemble.seed, band_high=ensemble.band_high, band_low=ensemble.band_low,
                profile=ensemble.profile, normalize=ensemble.normalize,
                stream=(group, sample, i), scale_count=self.config.norms.scale_count,
            )
            for i in range(self.grid.n)
        ]

    def plan(self):
        norms = self.config.norms
        return self.operators.make_plan(self.grid, self.symbol, norms.J, norms.K)

    def apply(self) -> SampledFunction:
        return self.operators.apply(self.plan(), self.inputs())

    def output_frame(self, output: SampledFunction) -> pd.DataFrame:
        points = self.grid.space_points()
        frame = pd.DataFrame(points, columns=[f"x{l + 1}" for l in range(self.grid.d)])
        frame["real"] = output.flat.real
        frame["imag"] = output.flat.imag
        return frame

    def symbol_norm(self) -> SymbolNormReport:
        norms = self.config.norms
        probes, subsampled = make_x_probes(self.grid, self.settings, seed=self.config.ensemble.seed)
        return symbol_norm_s_delta(
            self.symbol, norms.s, norms.delta, probes, norms.j_max, self.symbol_grid,
            x_step=self.x_step, probes_subsampled=subsampled,
        )

    def classify(self) -> MihlinReport:
        norms = self.config.norms
        return mihlin_estimate(
            self.symbol, norms.rho, norms.delta, norms.order, norms.max_beta_order,
            self.grid, j_max=norms.j_max,
        )

    def region(self) -> pd.DataFrame:
        alpha, step, upper = self.config.region.fractions()
        return region_sweep(self.config.region.n, alpha, step, upper)

    def decompose(self) -> DecomposeReport:
        result = self.operators.split(self.plan(), self.inputs())
        report = DecomposeReport(
            config_hash=self.config.config_hash(),
            seed=self.config.ensemble.seed,
            symbol=self.symbol.name,
            diagnostics=result.diagnostics,
        )
        return report.finalize()

    def _ratio(self, plan, index: int, group: int, sample: int) -> float:
        norms = self.config.norms
        try:
            fs = self.inputs(group, sample)
            output = self.operators.apply(plan, fs)
            denominator = 1.0
            for f, p_i in zip(fs, norms.p_inputs):
                denominator *= hp_quasinorm(f, p_i, norms.scale_count)
            return lp_quasinorm(output, norms.resolved_p) / denominator
        except HormanderError as exc:
            exc.details["sample"] = index
            raise
        except Exception as exc:
            raise HormanderError(f"sample {index} failed: {exc}", sample=index) from exc

    def region_verdicts(self) -> RegionVerdicts:
        norms = self.config.norms
        d = self.grid.d
        point = [1.0 / p for p in norms.p_inputs]
        admissible, witness = False, None
        if norms.order <= 0.0:
            admissible, witness = admissible_theorem21(point, norms.rho, norms.delta, norms.order, d)
        return RegionVerdicts(
            point=point,
            alpha=norms.s / d,
            in_A=in_A(point, norms.s / d),
            kato=kato_condition(point, norms.order, d),
            admissible=admissible,
            witness_s=float(witness) if admissible else None,
        )

    def boundedness_experiment(self) -> BoundednessReport:
        """Ratios ||T(f)||_p / prod ||f_i||_{h^p_i} over the seeded ensemble"""
        norms = self.config.norms
        ensemble = self.config.ensemble
        plan = self.plan()
        jobs = [(group, sample) for group in range(ensemble.groups) for sample in range(ensemble.size)]

        with ThreadPoolExecutor(max_workers=self.settings.threads) as pool:
            ratios = list(pool.map(lambda item: self._ratio(plan, item[0], *item[1]), enumerate(jobs)))
        self.logger.info(f"{len(ratios)} ratios over {ensemble.groups} groups")

        group_maxima = [max(ratios[g * ensemble.size:(g + 1) * ensemble.size]) for g in range(ensemble.groups)]
        for group, maximum in enumerate(group_maxima):
            self.logger.debug(f"group {group}: max ratio {maximum:.6g}")
        median_group = statistics.median(group_maxima)
        stability = max(group_maxima) / median_group if median_group > 0 else float("inf")
        symbol_norm = self.symbol_norm().total
        report = BoundednessReport(
            config_hash=self.config.config_hash(),
            seed=ensemble.seed,
            symbol=self.symbol.name,
            p_inputs=list(norms.p_inputs),
            p=norms.resolved_p,
            scale_count=norms.scale_count,
            effective_scale_count=len(effective_scales(self.grid, local_scales(norms.scale_count))),
            ratios=ratios,
            group_maxima=group_maxima,
            summary=RatioSummary(
                max=max(ratios),
                median=statistics.median(ratios),
                mean=statistics.fmean(ratios),
            ),
            stability_ratio=stability,
            stable=stability < STABILITY_FACTOR,
            symbol_norm=symbol_norm,
            normalized_ratio=max(ratios) / symbol_norm if symbol_norm > 0.0 else float("inf"),
            regions=self.region_verdicts(),
        )
        return report.finalize()

    def norm_scan(self, s_values: Sequence[float], tail: Optional[Tuple[int, int]] = None) -> NormScanResult:
        norms = self.config.norms
        probes, _ = make_x_probes(self.grid, self.settings, seed=self.config.ensemble.seed)
        return norm_scan(self.symbol, s_values, range(0, norms.j_max + 1), norms.delta,
                         probes, self.symbol_grid, x_step=self.x_step, tail=tail)
