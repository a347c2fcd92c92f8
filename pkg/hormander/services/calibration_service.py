"""
Self-generated empirical constants: recorded on the first run, then used as
regression baselines.
"""
from pathlib import Path
from typing import Optional

from pydantic import ValidationError

from hormander.core.config import Settings, get_settings
from hormander.core.exceptions import ConfigurationError, ToleranceError
from hormander.core.logging import get_logger
from hormander.schemas.reports import CalibrationBaseline


class CalibrationStore:
    """JSON file of named constants; check() records or compares"""

    def __init__(self, path: Optional[Path] = None, drift: Optional[float] = None,
                 settings: Optional[Settings] = None):
        settings = settings or get_settings()
        self.path = Path(path) if path is not None else settings.calibration_path
        self.drift = settings.calibration_drift if drift is None else drift
        self.logger = get_logger("calibration")
        self.baseline = self._load()

    def _load(self) -> CalibrationBaseline:
        if not self.path.exists():
            return CalibrationBaseline()
        try:
            return CalibrationBaseline.model_validate_json(self.path.read_text(encoding="utf-8"))
        except ValidationError as exc:
            raise ConfigurationError(f"corrupt calibration file {self.path}", field="calibration_path") from exc

    def save(self) -> None:
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self.path.write_text(self.baseline.model_dump_json(indent=2) + "\n", encoding="utf-8")

    def __contains__(self, key: str) -> bool:
        return key in self.baseline.entries

    def get(self, key: str) -> Optional[float]:
        return self.baseline.entries.get(key)

    def record(self, key: str, value: float) -> None:
        self.baseline.entries[key] = float(value)
        self.save()
        self.logger.info(f"recorded baseline {key} = {value:.6g}")

    def check(self, key: str, value: float) -> float:
        """Record the first value seen for key; afterwards require value <= (1 + drift) * baseline"""
        baseline = self.get(key)
        if baseline is None:
            self.record(key, value)
            return float(value)
        threshold = (1.0 + self.drift) * baseline
        if value > threshold:
            self.logger.warning(f"{key}: {value:.6g} exceeds calibrated {baseline:.6g}")
            raise ToleranceError(
                f"{key} drifted above its calibrated baseline",
                measured=float(value),
                threshold=float(threshold),
            )
        return baseline
