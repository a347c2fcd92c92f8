import numpy as np
import pytest

from hormander.core.config import Settings
from hormander.core.exceptions import BandLimitError
from hormander.schemas.config import ExperimentConfig
from hormander.services.experiment_service import ExperimentService, band_envelope, random_test_function
from hormander.services.grid_service import forward_transform
from hormander.services.norm_service import hp_quasinorm


def _config(symbol="constant", params=None, **sections):
    raw = {
        "grid": {"d": 1, "n": 2, "side_length": 16.0, "points_per_axis": 128},
        "symbol": {"name": symbol, "params": params or {}},
        "norms": {"s": 1.5, "p_inputs": [2.0, 2.0], "J": 4, "K": 14, "j_max": 4},
        "symbol_grid": {"side_length": 4.0, "points_per_axis": 128},
        "ensemble": {"size": 4, "groups": 2, "seed": 3},
    }
    for name, values in sections.items():
        raw.setdefault(name, {}).update(values)
    return ExperimentConfig.from_mapping(raw)


def test_inputs_are_deterministic(scalar_grid):
    a = random_test_function(scalar_grid, 12, band_high=1, stream=(0, 1))
    b = random_test_function(scalar_grid, 12, band_high=1, stream=(0, 1))
    c = random_test_function(scalar_grid, 12, band_high=1, stream=(0, 2))
    np.testing.assert_array_equal(a.values, b.values)
    assert not np.allclose(a.values, c.values)


@pytest.mark.parametrize("profile", ["smooth", "flat"])
def test_inputs_respect_their_band(scalar_grid, profile):
    f = random_test_function(scalar_grid, 1, band_high=1, band_low=-1, profile=profile)
    spectrum = np.abs(forward_transform(f).values)
    radius = scalar_grid.frequency_norms(1)
    outside = (radius >= 2.0) | (radius <= 0.5)
    assert np.all(spectrum[outside] <= 1e-12 * spectrum.max())


def test_envelope_shapes():
    radius = np.array([0.0, 0.4, 1.0, 1.9, 2.5])
    np.testing.assert_array_equal(band_envelope(radius, None, 1, "flat"), [1.0, 1.0, 1.0, 1.0, 0.0])
    np.testing.assert_array_equal(band_envelope(radius, -1, 1, "flat"), [0.0, 0.0, 1.0, 1.0, 0.0])
    smooth = band_envelope(radius, -1, 1)
    assert smooth[0] == 0.0 and smooth[2] == 1.0 and smooth[-1] == 0.0


def test_normalized_inputs(scalar_grid):
    f = random_test_function(scalar_grid, 2, band_high=1, normalize=True)
    assert hp_quasinorm(f, 2.0) == pytest.approx(1.0, rel=1e-12)


def test_empty_bands(scalar_grid):
    with pytest.raises(BandLimitError):
        random_test_function(scalar_grid, 0, band_high=1, band_low=1)
    with pytest.raises(BandLimitError):
        random_test_function(scalar_grid, 0, band_high=3)
    with pytest.raises(BandLimitError):
        random_test_function(scalar_grid, 0, band_high=-9, band_low=-10, profile="flat")


def test_service_builds_from_config():
    service = ExperimentService(_config())
    assert service.grid.points_per_axis == 128
    assert service.symbol_grid.side_length == 4.0
    assert service.symbol.name == "constant"
    assert service.x_step == pytest.approx(16.0 / 512)
    f1, f2 = service.inputs()
    assert not np.allclose(f1.values, f2.values)


def test_apply_frame():
    service = ExperimentService(_config())
    frame = service.output_frame(service.apply())
    assert list(frame.columns) == ["x1", "real", "imag"]
    assert len(frame) == 128


def test_decompose_constant():
    report = ExperimentService(_config()).decompose()
    assert report.diagnostics.within_tolerance
    assert report.content_hash == report.compute_content_hash()
    assert report.baseline_label == "self-generated"


def test_region_sweep_from_config():
    frame = ExperimentService(_config(region={"n": 2, "alpha": "3/2", "step": "1/8", "upper": "2"})).region()
    assert len(frame) == 16**2
    assert (frame["in_A"] == frame["in_B"]).all()


def test_constant_symbol_bench():
    report = ExperimentService(_config()).boundedness_experiment()
    assert len(report.ratios) == 8
    assert len(report.group_maxima) == 2
    assert report.summary.max == max(report.ratios)
    assert 0.0 < report.summary.max < 2.0
    assert report.symbol_norm > 0.0
    assert report.p == pytest.approx(1.0)
    assert report.scale_count == 8
    assert report.effective_scale_count == 4
    regions = report.regions
    assert regions.in_A and regions.admissible and not regions.kato
    assert regions.alpha == pytest.approx(1.5)


def test_bench_is_reproducible():
    config = _config()
    first = ExperimentService(config).boundedness_experiment()
    second = ExperimentService(config, Settings(threads=2)).boundedness_experiment()
    assert first.ratios == second.ratios
    assert first.content_hash == second.content_hash
    assert first.config_hash == config.config_hash()


def test_seed_override_changes_inputs():
    config = _config()
    other = config.with_seed(4)
    assert other.ensemble.seed == 4
    assert config.config_hash() != other.config_hash()
    a = ExperimentService(config).inputs()[0]
    b = ExperimentService(other).inputs()[0]
    assert not np.allclose(a.values, b.values)


@pytest.mark.slow
def test_coifman_meyer_bench_is_stable():
    config = _config("coifman_meyer", {"epsilon": 0.5}, ensemble={"size": 32, "groups": 3, "seed": 0})
    report = ExperimentService(config).boundedness_experiment()
    assert report.stable
    assert report.stability_ratio < 3.0
    assert np.isfinite(report.normalized_ratio)
