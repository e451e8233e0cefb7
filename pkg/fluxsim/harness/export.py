"""Writing of the artifacts of a run: CSV tables, heatmaps, JSON reports and the
run manifest.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np
import pandas as pd

from fluxsim.classes import TransmissionMap
from fluxsim.constants import CSV_FLOAT_FORMAT, MANIFEST_FILE_NAME

MAP_COLUMNS = ["flux", "freq_GHz", "amplitude"]


@dataclass
class RunManifest:
    r"""Record of a harness run.

    :param subcommand: subcommand that was run.
    :param config_hash: content hash of the physics sections of the configuration.
    :param version: fluxsim version.
    :param checksums: sha256 of each output file, keyed by file name.
    :param timings: wall clock durations of the run steps, in seconds.
    :param cells: number of cells of the run.
    :param cache_hits: number of cells served from the cache.
    :param failed_cells: coordinates and reason of each failed cell.
    """

    subcommand: str
    config_hash: str
    version: str
    checksums: dict[str, str] = field(default_factory=dict)
    timings: dict[str, float] = field(default_factory=dict)
    cells: int = 0
    cache_hits: int = 0
    failed_cells: list[dict[str, Any]] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    def save_to_json(self, out_dir: str | Path) -> Path:
        out_path = Path(out_dir) / MANIFEST_FILE_NAME
        with out_path.open("w") as outfile:
            json.dump(self.to_dict(), outfile, indent=4, sort_keys=True)
        return out_path


def file_checksum(path: str | Path) -> str:
    """sha256 hex digest of a file."""
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def export_csv(
    rows: Sequence[dict[str, Any]], columns: Sequence[str], out_path: str | Path
) -> Path:
    r"""Writes rows to a CSV file with 9 significant digits, ``.`` as decimal
    separator and ``\n`` line endings. An empty sequence of rows gives a header-only
    file.

    :param rows: one dictionary per row.
    :param columns: column names, in order.
    :param out_path: path of the CSV file.
    :return: the path of the written file.
    """
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame(list(rows), columns=list(columns))
    frame.to_csv(
        out_path,
        index=False,
        float_format=CSV_FLOAT_FORMAT,
        na_rep="nan",
        lineterminator="\n",
    )
    return out_path


def map_rows(transmission: TransmissionMap) -> list[dict[str, Any]]:
    r"""Long-form rows of a transmission map, flux major.

    :param transmission: transmission map.
    :return: one row per cell.
    """
    return [
        {"flux": float(flux), "freq_GHz": float(freq), "amplitude": float(amplitude)}
        for flux, amplitudes in zip(transmission.flux, transmission.amplitudes)
        for freq, amplitude in zip(transmission.frequencies, amplitudes)
    ]


def map_from_rows(
    rows: Sequence[dict[str, Any]],
    flux_grid: np.ndarray,
    freq_grid: np.ndarray,
    failed_cells: list[tuple[int, int, str]] | None = None,
) -> TransmissionMap:
    r"""Rebuilds a transmission map from its long-form rows.

    :param rows: rows ordered flux major, as written by :func:`map_rows`.
    :param flux_grid: flux grid.
    :param freq_grid: frequency grid.
    :param failed_cells: failed cells of the map.
    :return: the transmission map.
    """
    amplitudes = np.array([row["amplitude"] for row in rows], dtype=float)
    return TransmissionMap(
        flux=flux_grid,
        frequencies=freq_grid,
        amplitudes=amplitudes.reshape(len(flux_grid), len(freq_grid)),
        failed_cells=failed_cells or [],
    )


def export_heatmap(transmission: TransmissionMap, out_path: str | Path) -> Path:
    r"""Renders a transmission map as an image, with a linear color scale of the
    amplitude normalized by the bare resonator. Failed cells are left blank.
    matplotlib is only needed when this function is called.

    :param transmission: transmission map.
    :param out_path: path of the image file.
    :return: the path of the written file.
    """
    try:
        from matplotlib.figure import Figure
    except ImportError as err:
        raise ImportError(
            "Rendering heatmaps requires matplotlib, install it with "
            "`pip install fluxsim[heatmap]`"
        ) from err

    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    fig = Figure(figsize=(6, 4.5))
    ax = fig.add_subplot()
    mesh = ax.pcolormesh(
        transmission.flux,
        transmission.frequencies,
        np.ma.masked_invalid(transmission.amplitudes.T),
        shading="nearest",
        vmin=0.0,
        cmap="viridis",
    )
    fig.colorbar(mesh, ax=ax, label="|<a>| / |<a>|_bare")
    ax.set_xlabel("External flux (flux quanta)")
    ax.set_ylabel("Drive frequency (GHz)")
    fig.savefig(out_path, dpi=150, metadata={"Software": None})
    return out_path


def export_json(report: dict[str, Any], out_path: str | Path) -> Path:
    r"""Writes a structured report as indented JSON with sorted keys.

    :param report: JSON serializable report.
    :param out_path: path of the JSON file.
    :return: the path of the written file.
    """
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    with out_path.open("w") as outfile:
        json.dump(report, outfile, indent=4, sort_keys=True)
        outfile.write("\n")
    return out_path
