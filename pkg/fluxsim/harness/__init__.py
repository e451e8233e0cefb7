"""Command line harness: run configuration, sweep execution with caching, and
export of the artifacts.
"""

from .config import RunConfig, load_config
from .export import RunManifest, export_csv, export_heatmap
from .runner import run

__all__ = [
    "RunConfig",
    "RunManifest",
    "load_config",
    "run",
    "export_csv",
    "export_heatmap",
]
