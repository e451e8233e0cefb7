"""Constants and helpers shared by the tests."""

from __future__ import annotations

from typing import Any

import numpy as np

from fluxsim import CoupledModel, FluxoniumParams

SEED = 777


# Reference heavy fluxonium device
DEVICE_PARAMS = FluxoniumParams(e_c=0.46, e_j=8.11, e_l=0.24)
DEVICE_NU_R = 4.95
DEVICE_G = 0.076
DEVICE_KAPPA = 0.04
DEVICE_GAMMA_Q = 0.0005
DEVICE_TEMPERATURE = 0.03

# Closed-form model inputs measured on the same device
E_P = 5.072
E_P_PRIME = 4.39
PHI_ZPF = 0.60
DETUNING = 0.089
M_ELEMENT = 0.062j
A_RESONATOR = 0.084

# Random draws of fluxonium parameters, within the heavy fluxonium regime
NUM_RANDOM_DRAWS = 20


def random_params(rng: np.random.Generator) -> FluxoniumParams:
    return FluxoniumParams(
        e_c=float(rng.uniform(0.3, 1.2)),
        e_j=float(rng.uniform(3.0, 10.0)),
        e_l=float(rng.uniform(0.2, 1.0)),
        phi_ext=float(rng.uniform(0.0, 0.5)),
    )


def small_model(
    flux: float = 0.3,
    g: float = DEVICE_G,
    n_flux_levels: int = 4,
    n_photons: int = 3,
) -> CoupledModel:
    """Truncated reference device, small enough for dense superoperators."""
    return CoupledModel(
        DEVICE_PARAMS.at_flux(flux),
        nu_r=DEVICE_NU_R,
        g=g,
        n_flux_levels=n_flux_levels,
        n_photons=n_photons,
    )


def random_density_matrix(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Random full-rank density matrix."""
    mat = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = mat @ mat.conj().T
    return rho / np.trace(rho)


def linear_fit_slope(x: Any, y: Any) -> float:
    return float(np.polyfit(np.asarray(x, float), np.asarray(y, float), 1)[0])
