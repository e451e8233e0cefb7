"""Pytest configuration file.

Doc: https://docs.pytest.org/en/latest/reference/reference.html.
"""

from __future__ import annotations

from pathlib import Path

import pytest

from fluxsim import CoupledModel, FluxoniumParams
from fluxsim.constants import CACHE_DIR_ENV_VAR

from .utils import DEVICE_G, DEVICE_NU_R, DEVICE_PARAMS


@pytest.fixture(autouse=True)
def cache_dir(tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> Path:
    """Points the harness cell cache to a temporary directory, so that tests never
    share cached cells.
    """
    path = tmp_path / "cache"
    monkeypatch.setenv(CACHE_DIR_ENV_VAR, str(path))
    return path


@pytest.fixture()
def device_params() -> FluxoniumParams:
    return DEVICE_PARAMS


@pytest.fixture()
def device_model() -> CoupledModel:
    return CoupledModel(DEVICE_PARAMS, nu_r=DEVICE_NU_R, g=DEVICE_G)
