"""
Command line entry: one subcommand per experiment kind, driven by a TOML config
"""
import json
import sys
from pathlib import Path
from typing import List, Optional

import click
import pandas as pd
import typer
from pydantic import BaseModel
from rich.console import Console
from rich.table import Table

from hormander.core.config import get_settings
from hormander.core.exceptions import ConfigurationError, HormanderError, ToleranceError
from hormander.core.logging import get_logger, setup_logging
from hormander.schemas.config import ExperimentConfig
from hormander.services.experiment_service import ExperimentService

app = typer.Typer(
    name="hormander",
    help="Numerical experiments for multilinear pseudo-differential operators",
    add_completion=False,
    no_args_is_help=True,
)
console = Console(stderr=True)
logger = get_logger("cli")

ConfigOption = typer.Option(..., "--config", "-c", help="Experiment TOML file")
OutOption = typer.Option(None, "--out", "-o", help="Output directory (defaults to output.directory)")
ThreadsOption = typer.Option(None, "--threads", min=1, help="Worker threads")
SeedOption = typer.Option(None, "--seed-override", min=0, help="Replace ensemble.seed")
LogLevelOption = typer.Option("INFO", "--log-level", help="Log level")


def _prepare(config: Path, threads: Optional[int], seed_override: Optional[int], log_level: str) -> ExperimentService:
    settings = get_settings()
    if threads is not None:
        settings = settings.model_copy(update={"threads": threads})
    setup_logging(log_level, json=settings.log_json)
    experiment = ExperimentConfig.from_toml(config).with_seed(seed_override)
    logger.info(f"config {config} ({experiment.config_hash()[:12]}), symbol {experiment.symbol.name}")
    return ExperimentService(experiment, settings)


def _output_dir(service: ExperimentService, out: Optional[Path]) -> Path:
    directory = out if out is not None else service.config.output.directory
    directory.mkdir(parents=True, exist_ok=True)
    return directory


def write_table(frame: pd.DataFrame, path: Path) -> Path:
    frame.to_csv(path, index=False, float_format="%.17g", lineterminator="\n", encoding="utf-8")
    return path


def write_report(report: BaseModel, path: Path) -> Path:
    path.write_text(report.model_dump_json(indent=2) + "\n", encoding="utf-8")
    return path


def _summary(title: str, rows: dict) -> None:
    table = Table(title=title)
    table.add_column("field", style="cyan")
    table.add_column("value", style="green")
    for key, value in rows.items():
        table.add_row(key, f"{value:.6g}" if isinstance(value, float) else str(value))
    console.print(table)


@app.command()
def apply(
    config: Path = ConfigOption,
    out: Optional[Path] = OutOption,
    threads: Optional[int] = ThreadsOption,
    seed_override: Optional[int] = SeedOption,
    log_level: str = LogLevelOption,
):
    """Apply the configured operator to one seeded input tuple and write the output samples"""
    service = _prepare(config, threads, seed_override, log_level)
    output = service.apply()
    path = write_table(service.output_frame(output), _output_dir(service, out) / "apply.csv")
    _summary("apply", {"symbol": service.symbol.name, "samples": output.values.size, "written": path})


@app.command()
def norm(
    config: Path = ConfigOption,
    out: Optional[Path] = OutOption,
    threads: Optional[int] = ThreadsOption,
    seed_override: Optional[int] = SeedOption,
    log_level: str = LogLevelOption,
):
    """Symbol norm table: low piece and the supremal band piece"""
    service = _prepare(config, threads, seed_override, log_level)
    report = service.symbol_norm()
    directory = _output_dir(service, out)
    path = write_table(report.to_frame(), directory / "norm.csv")
    write_table(report.to_frame(per_level=True), directory / "norm_levels.csv")
    _summary("norm", {
        "symbol": report.symbol, "low": report.low, "band sup": report.band_sup,
        "total": report.total, "probes": report.probe_count,
        "subsampled": report.probes_subsampled, "written": path,
    })


@app.command()
def classify(
    config: Path = ConfigOption,
    out: Optional[Path] = OutOption,
    threads: Optional[int] = ThreadsOption,
    seed_override: Optional[int] = SeedOption,
    log_level: str = LogLevelOption,
):
    """Finite-difference Mihlin class estimate"""
    service = _prepare(config, threads, seed_override, log_level)
    report = service.classify()
    path = write_report(report, _output_dir(service, out) / "classify.json")
    _summary("classify", {"symbol": report.symbol, "verdict": report.verdict,
                          "probes": report.probe_count, "written": path})


@app.command()
def region(
    config: Path = ConfigOption,
    out: Optional[Path] = OutOption,
    threads: Optional[int] = ThreadsOption,
    seed_override: Optional[int] = SeedOption,
    log_level: str = LogLevelOption,
):
    """Exact rational sweep of both descriptions of the exponent region"""
    service = _prepare(config, threads, seed_override, log_level)
    frame = service.region()
    path = write_table(frame, _output_dir(service, out) / "region.csv")
    _summary("region", {
        "points": len(frame),
        "inside": int(frame["in_A"].sum()),
        "disagreements": int((frame["in_A"] != frame["in_B"]).sum()),
        "written": path,
    })


@app.command()
def decompose(
    config: Path = ConfigOption,
    out: Optional[Path] = OutOption,
    threads: Optional[int] = ThreadsOption,
    seed_override: Optional[int] = SeedOption,
    log_level: str = LogLevelOption,
):
    """Three-term splitting diagnostics; fails with exit code 2 above tolerance"""
    service = _prepare(config, threads, seed_override, log_level)
    report = service.decompose()
    path = write_report(report, _output_dir(service, out) / "decompose.json")
    diagnostics = report.diagnostics
    _summary("decompose", {"residual": diagnostics.residual, "tolerance": diagnostics.tolerance,
                           "outside band": diagnostics.energy_outside_band, "written": path})
    if not diagnostics.within_tolerance:
        raise ToleranceError(
            "splitting residual above tolerance",
            measured=diagnostics.residual,
            threshold=diagnostics.tolerance,
        )


@app.command()
def bench(
    config: Path = ConfigOption,
    out: Optional[Path] = OutOption,
    threads: Optional[int] = ThreadsOption,
    seed_override: Optional[int] = SeedOption,
    log_level: str = LogLevelOption,
):
    """Boundedness ratios over the seeded ensemble"""
    service = _prepare(config, threads, seed_override, log_level)
    report = service.boundedness_experiment()
    path = write_report(report, _output_dir(service, out) / "bench.json")
    _summary("bench", {
        "samples": len(report.ratios), "max": report.summary.max, "median": report.summary.median,
        "stability": report.stability_ratio, "stable": report.stable,
        "normalized": report.normalized_ratio, "written": path,
    })


def _fail(exc: HormanderError, code: int) -> int:
    print(json.dumps(exc.to_dict(), default=str))
    return code


def cli(argv: Optional[List[str]] = None) -> int:
    """Run the command line and return its exit code.

    0 on success, 1 on configuration, usage or input errors, 2 when a numerical
    tolerance check fails.
    """
    command = typer.main.get_command(app)
    try:
        result = command.main(args=argv, prog_name="hormander", standalone_mode=False)
    except click.UsageError as exc:
        exc.show()
        return _fail(ConfigurationError(exc.format_message(), field="argv"), 1)
    except click.Abort:
        return 1
    except ConfigurationError as exc:
        logger.error(exc.message)
        return _fail(exc, 1)
    except ToleranceError as exc:
        logger.warning(exc.message)
        return _fail(exc, 2)
    except HormanderError as exc:
        logger.error(exc.message)
        return _fail(exc, 1)
    return result if isinstance(result, int) else 0


def main() -> None:
    sys.exit(cli())


if __name__ == "__main__":
    main()
