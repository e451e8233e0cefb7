"""Execution of the harness subcommands: sweeps split in independent cells, run
in worker processes and cached on disk.
"""

from __future__ import annotations

import json
import os
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict
from itertools import repeat
from pathlib import Path
from typing import Any, Callable

import numpy as np
from tqdm import tqdm

from fluxsim.analytics import (
    half_flux_detuning,
    hybridize,
    pi_time,
    plasmon_dispersion,
    raman_rate,
    scaling_laws,
    stark_minimum,
)
from fluxsim.circuit import derive_energies, reduce_circuit, validate_chain
from fluxsim.classes import CellError, ConfigError, TwoLevelModel
from fluxsim.constants import (
    CACHE_DIR_ENV_VAR,
    CURRENT_FLUXSIM_VERSION,
    DEFAULT_CACHE_DIR,
    SUBCOMMANDS,
)
from fluxsim.coupled import CATALOG_COLUMNS, catalog_rows, transition_catalog
from fluxsim.dissipation import map_row
from fluxsim.fluxonium import diagonalize

from .config import RunConfig
from .export import (
    MAP_COLUMNS,
    RunManifest,
    export_csv,
    export_heatmap,
    export_json,
    file_checksum,
    map_from_rows,
)

SPECTRUM_COLUMNS = ["flux", "level", "energy_ghz", "well", "plasmon", "confidence"]


def cache_dir() -> Path:
    """Root of the cell cache, ``$FLUXSIM_CACHE_DIR`` or ``~/.cache/fluxsim``."""
    return Path(os.environ.get(CACHE_DIR_ENV_VAR, DEFAULT_CACHE_DIR)).expanduser()


def _cache_path(config_hash: str, subcommand: str, index: int) -> Path:
    return cache_dir() / config_hash / subcommand / f"{index}.json"


def _read_cache(path: Path) -> dict[str, Any] | None:
    try:
        with path.open() as file:
            return json.load(file)
    except (OSError, json.JSONDecodeError):
        return None


def _write_cache(path: Path, result: dict[str, Any]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp_path = path.with_suffix(".tmp")
    with tmp_path.open("w") as file:
        json.dump(result, file)
    tmp_path.replace(path)


# CELLS
# Each cell returns {"rows": [...], "failures": [[index, reason], ...]} and must be
# picklable so that it can run in a worker process.


def _spectrum_cell(flux: float, config: RunConfig) -> dict[str, Any]:
    spec = diagonalize(config.fluxonium_params(flux), config.basis_config())
    rows = [
        {
            "flux": float(flux),
            "level": level,
            "energy_ghz": float(energy),
            "well": label.well,
            "plasmon": label.plasmon,
            "confidence": label.confidence,
        }
        for level, (energy, label) in enumerate(zip(spec.energies, spec.labels))
    ]
    return {"rows": rows, "failures": []}


def _lines_cell(flux: float, config: RunConfig) -> dict[str, Any]:
    catalog = transition_catalog(
        config.coupled_model(),
        flux,
        initial=config.catalog["initial"],
        max_photon_order=config.catalog["max_photon_order"],
        basis=config.basis_config(),
    )
    return {"rows": catalog_rows(catalog), "failures": []}


def _single_tone_cell(flux: float, config: RunConfig) -> dict[str, Any]:
    freq_grid = config.freq_grid()
    amplitudes, failures = map_row(
        config.coupled_model(),
        config.lindblad_config(),
        flux,
        freq_grid,
        basis=config.basis_config(),
    )
    rows = [
        {"flux": float(flux), "freq_GHz": float(freq), "amplitude": float(amplitude)}
        for freq, amplitude in zip(freq_grid, amplitudes)
    ]
    return {"rows": rows, "failures": [[j, reason] for j, reason in failures]}


def _reduce_cell(_: float, config: RunConfig) -> dict[str, Any]:
    circuit = config.circuit_model()
    reduced = reduce_circuit(circuit)
    chain = validate_chain(circuit)
    report = {
        "reduced": asdict(reduced),
        "energies": asdict(derive_energies(reduced)),
        "chain": asdict(chain),
    }
    return {"rows": [report], "failures": []}


def _analytics_cell(_: float, config: RunConfig) -> dict[str, Any]:
    params = config.fluxonium_params()
    analytics = config.analytics
    two_level = config.two_level_model()
    zero_flux = hybridize(two_level, a=analytics["a_resonator_ghz"])
    half_detuning = half_flux_detuning(
        analytics["detuning_ghz"],
        analytics["a_resonator_ghz"],
        zero_flux.qubit_quadratic_fraction,
    )
    half_flux = hybridize(TwoLevelModel(0.0, half_detuning, two_level.m))
    dispersion = plasmon_dispersion(
        params,
        analytics["e_p_ghz"],
        analytics["e_p_prime_ghz"],
        analytics["phi_zpf"],
        hybridization=zero_flux,
    )
    rate = raman_rate(config.raman_config())
    scaling = scaling_laws(params, config.flux_grid(), config.basis_config())

    def hybridization_report(hyb: Any, detuning: float) -> dict[str, Any]:
        return {
            "detuning_ghz": detuning,
            "eigenvalues_ghz": list(hyb.eigenvalues),
            "intensity_ratio": hyb.intensity_ratio,
            "decoupled": hyb.decoupled,
            "resonator_quadratic_fraction": hyb.resonator_quadratic_fraction,
            "qubit_quadratic_fraction": hyb.qubit_quadratic_fraction,
            "resonator_quartic_ghz": hyb.resonator_quartic,
            "qubit_quartic_ghz": hyb.qubit_quartic,
        }

    report = {
        "stark_minimum_rad": {
            f"{flux:.6g}": stark_minimum(params.at_flux(flux))
            for flux in config.flux_grid()
        }
        if params.e_j > params.e_l
        else None,
        "plasmon_dispersion": asdict(dispersion),
        "hybridization": {
            "zero_flux": hybridization_report(zero_flux, analytics["detuning_ghz"]),
            "half_flux": hybridization_report(half_flux, half_detuning),
        },
        "raman": {
            "config": asdict(config.raman_config()),
            "rate_ghz": rate,
            "pi_time_ns": pi_time(rate) if rate != 0 else None,
        },
        "scaling_laws": scaling.to_dict(),
    }
    return {"rows": [report], "failures": []}


CELLS: dict[str, Callable[[float, RunConfig], dict[str, Any]]] = {
    "reduce": _reduce_cell,
    "spectrum": _spectrum_cell,
    "lines": _lines_cell,
    "single-tone": _single_tone_cell,
    "analytics": _analytics_cell,
}


def _run_cell(
    index: int, flux: float, config: RunConfig, subcommand: str
) -> dict[str, Any]:
    try:
        return CELLS[subcommand](flux, config)
    except Exception as err:  # noqa: BLE001
        error = CellError((index,), err)
        return {"rows": [], "failures": [[None, str(error)]], "failed": True}


def _cell_grid(subcommand: str, config: RunConfig) -> np.ndarray:
    if subcommand in ("reduce", "analytics"):
        return np.zeros(1)
    return config.flux_grid()


def _check_subcommand(subcommand: str, config: RunConfig) -> None:
    if subcommand not in SUBCOMMANDS:
        raise ValueError(f"subcommand must be one of {SUBCOMMANDS}, got {subcommand}")
    if subcommand == "reduce" and config.circuit is None:
        raise ConfigError("circuit", "the reduce subcommand needs a circuit section")
    if subcommand == "single-tone":
        for key in ("kappa_ghz", "zeta_ghz"):
            if config.lindblad[key] <= 0:
                raise ConfigError(
                    f"lindblad.{key}",
                    "must be strictly positive to normalize transmission maps",
                )


def compute_cells(
    subcommand: str,
    config: RunConfig,
    jobs: int = 1,
    use_cache: bool = True,
    verbose: bool = False,
) -> tuple[list[dict[str, Any]], int]:
    r"""Computes the cells of a subcommand, reading and filling the cache. Cells
    missing from the cache are dispatched to ``jobs`` worker processes, results
    being gathered in grid order whatever their completion order.

    :param subcommand: harness subcommand.
    :param config: run configuration.
    :param jobs: number of worker processes, 1 runs in the current process.
    :param use_cache: reads and writes cached cells. (default: True)
    :param verbose: shows a progress bar. (default: False)
    :return: the result of each cell, and the number of cache hits.
    """
    grid = _cell_grid(subcommand, config)
    config_hash = config.config_hash()
    results: list[dict[str, Any] | None] = [None] * len(grid)
    if use_cache:
        for index in range(len(grid)):
            results[index] = _read_cache(_cache_path(config_hash, subcommand, index))
    pending = [index for index, result in enumerate(results) if result is None]
    cache_hits = len(grid) - len(pending)

    desc = f"Running {subcommand} ({len(pending)} cells)"
    fluxes = [float(grid[index]) for index in pending]
    if jobs > 1 and len(pending) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as executor:
            computed = list(
                tqdm(
                    executor.map(
                        _run_cell, pending, fluxes, repeat(config), repeat(subcommand)
                    ),
                    total=len(pending),
                    desc=desc,
                    disable=not verbose,
                )
            )
    else:
        computed = [
            _run_cell(index, flux, config, subcommand)
            for index, flux in tqdm(
                zip(pending, fluxes), total=len(pending), desc=desc, disable=not verbose
            )
        ]

    for index, result in zip(pending, computed):
        results[index] = result
        if use_cache and not result.get("failed") and not result["failures"]:
            _write_cache(_cache_path(config_hash, subcommand, index), result)
    return results, cache_hits


def run(
    subcommand: str,
    config: RunConfig,
    out_dir: str | Path | None = None,
    jobs: int | None = None,
    use_cache: bool = True,
    verbose: bool = False,
) -> RunManifest:
    r"""Runs a harness subcommand and writes its artifacts and manifest.

    * ``reduce``: effective circuit, energies and chain advisories (``reduce.json``);
    * ``spectrum``: fluxonium levels along the flux sweep (``spectrum.csv``);
    * ``lines``: transition catalogs along the flux sweep (``lines.csv``);
    * ``single-tone``: steady-state transmission map (``single_tone.csv``, and
      ``single_tone.png`` when the ``heatmap`` format is requested);
    * ``analytics``: closed-form models (``analytics.json``).

    A failing cell does not abort the run, it is recorded in the manifest.

    :param subcommand: one of ``SUBCOMMANDS``.
    :param config: run configuration.
    :param out_dir: output directory. (default: ``config.output["directory"]``)
    :param jobs: number of worker processes. (default: ``config.output["parallelism"]``)
    :param use_cache: reads and writes cached cells. (default: True)
    :param verbose: shows progress bars. (default: False)
    :return: the run manifest.
    """
    start = time.perf_counter()
    _check_subcommand(subcommand, config)
    out_dir = Path(config.output["directory"] if out_dir is None else out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    jobs = config.output["parallelism"] if jobs is None else jobs
    if jobs < 1:
        raise ValueError(f"jobs must be at least 1, got {jobs}")

    results, cache_hits = compute_cells(subcommand, config, jobs, use_cache, verbose)
    compute_end = time.perf_counter()

    grid = _cell_grid(subcommand, config)
    failed_cells = []
    for index, result in enumerate(results):
        for sub_index, reason in result["failures"]:
            cell = {"flux_index": index, "flux": float(grid[index]), "reason": reason}
            if sub_index is not None:
                cell["freq_index"] = int(sub_index)
            failed_cells.append(cell)
    rows = [row for result in results for row in result["rows"]]

    outputs = []
    if subcommand in ("reduce", "analytics"):
        name = f"{subcommand}.json"
        outputs.append(export_json(rows[0] if rows else {}, out_dir / name))
    elif subcommand == "spectrum":
        outputs.append(export_csv(rows, SPECTRUM_COLUMNS, out_dir / "spectrum.csv"))
    elif subcommand == "lines":
        outputs.append(export_csv(rows, CATALOG_COLUMNS, out_dir / "lines.csv"))
    else:
        rows = _single_tone_rows(results, config)
        outputs.append(export_csv(rows, MAP_COLUMNS, out_dir / "single_tone.csv"))
        if "heatmap" in config.output["formats"]:
            transmission = map_from_rows(rows, config.flux_grid(), config.freq_grid())
            outputs.append(export_heatmap(transmission, out_dir / "single_tone.png"))
    if "heatmap" in config.output["formats"] and subcommand != "single-tone":
        warnings.warn(
            f"The heatmap format only applies to single-tone maps, not to {subcommand}",
            stacklevel=2,
        )

    manifest = RunManifest(
        subcommand=subcommand,
        config_hash=config.config_hash(),
        version=CURRENT_FLUXSIM_VERSION,
        checksums={path.name: file_checksum(path) for path in outputs},
        timings={
            "compute_s": compute_end - start,
            "total_s": time.perf_counter() - start,
        },
        cells=len(results),
        cache_hits=cache_hits,
        failed_cells=failed_cells,
    )
    manifest.save_to_json(out_dir)
    return manifest


def _single_tone_rows(
    results: list[dict[str, Any]], config: RunConfig
) -> list[dict[str, Any]]:
    # A row whose whole cell failed is filled with NaN amplitudes
    rows = []
    freq_grid = config.freq_grid()
    for flux, result in zip(config.flux_grid(), results):
        if result["rows"]:
            rows.extend(result["rows"])
            continue
        rows.extend(
            {"flux": float(flux), "freq_GHz": float(freq), "amplitude": float("nan")}
            for freq in freq_grid
        )
    return rows
