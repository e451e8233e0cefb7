"""Root module.

Here we only import the value classes and the modules of each part of the model.
"""

from fluxsim import analytics, circuit, coupled, dissipation, fluxonium

from .classes import (
    BasisConfig,
    CoupledModel,
    DensityMatrix,
    DressedSpectrum,
    FluxoniumParams,
    FourNodeCircuit,
    LindbladConfig,
    Spectrum,
    TransmissionMap,
)
from .utils import utils

__version__ = "0.1.0"

__all__ = [
    "BasisConfig",
    "CoupledModel",
    "DensityMatrix",
    "DressedSpectrum",
    "FluxoniumParams",
    "FourNodeCircuit",
    "LindbladConfig",
    "Spectrum",
    "TransmissionMap",
    "analytics",
    "circuit",
    "coupled",
    "dissipation",
    "fluxonium",
    "utils",
]
