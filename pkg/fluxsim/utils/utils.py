"""Useful methods."""

from __future__ import annotations

import numpy as np
from scipy.integrate import trapezoid
from scipy.linalg import eig_banded

from fluxsim.classes import FluxoniumParams
from fluxsim.constants import BOLTZMANN_GHZ_PER_K, FD_GRID_SIZE, FD_PHI_MAX


def lowering_operator(dim: int) -> np.ndarray:
    r"""Truncated harmonic oscillator lowering operator.

    :param dim: number of Fock states kept.
    :return: the ``(dim, dim)`` matrix of ``a``.
    """
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), k=1)


def hermite_functions(n: int, x: np.ndarray) -> np.ndarray:
    r"""Normalized Hermite functions, computed with the stable three-term recurrence
    so that high orders do not overflow.

    :param n: number of functions.
    :param x: dimensionless positions.
    :return: ``(n, len(x))`` array, row ``k`` holding the k-th oscillator eigenfunction.
    """
    x = np.asarray(x, dtype=float)
    out = np.zeros((n, x.size))
    out[0] = np.pi**-0.25 * np.exp(-(x**2) / 2)
    if n > 1:
        out[1] = np.sqrt(2.0) * x * out[0]
    for k in range(1, n - 1):
        out[k + 1] = (
            np.sqrt(2.0 / (k + 1)) * x * out[k] - np.sqrt(k / (k + 1)) * out[k - 1]
        )
    return out


def thermal_occupation(frequency: float | np.ndarray, temperature: float) -> np.ndarray:
    r"""Bose-Einstein occupation of a mode, evaluated at ``|frequency|``.

    :param frequency: mode frequency, in GHz.
    :param temperature: bath temperature, in K. Zero gives an empty mode.
    :return: the mean occupation.
    """
    frequency = np.abs(np.asarray(frequency, dtype=float))
    if temperature <= 0:
        return np.zeros_like(frequency)
    with np.errstate(divide="ignore", over="ignore"):
        return 1.0 / np.expm1(frequency / (BOLTZMANN_GHZ_PER_K * temperature))


def finite_difference_spectrum(
    params: FluxoniumParams,
    num_levels: int = 6,
    grid_size: int = FD_GRID_SIZE,
    phi_max: float = FD_PHI_MAX * np.pi,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    r"""Diagonalizes the fluxonium Hamiltonian on a uniform phase grid with a
    five-point stencil, with vanishing boundary conditions at ``+/- phi_max``.
    This is independent of the oscillator basis and serves as an oracle.

    :param params: fluxonium parameters.
    :param num_levels: number of eigenpairs to compute.
    :param grid_size: number of grid points.
    :param phi_max: half width of the grid.
    :return: the energies, the grid and the wavefunctions, one column per state,
        normalized so that ``sum(psi**2) * step = 1``.
    """
    phi = np.linspace(-phi_max, phi_max, grid_size)
    step = phi[1] - phi[0]
    kinetic = 4 * params.e_c / (12 * step**2)
    potential = 0.5 * params.e_l * phi**2 - params.e_j * np.cos(
        phi - 2 * np.pi * params.phi_ext
    )
    band = np.zeros((3, grid_size))
    band[0, 2:] = kinetic
    band[1, 1:] = -16 * kinetic
    band[2] = 30 * kinetic + potential
    energies, vectors = eig_banded(band, select="i", select_range=(0, num_levels - 1))
    vectors /= np.sqrt(step)
    return energies, phi, vectors


def finite_difference_charge_element(
    phi: np.ndarray, psi_i: np.ndarray, psi_j: np.ndarray
) -> complex:
    r"""Charge matrix element ``<i| -i d/dphi |j>`` of two grid wavefunctions, by
    central differences and quadrature.

    :param phi: uniform grid.
    :param psi_i: bra wavefunction.
    :param psi_j: ket wavefunction.
    :return: the matrix element.
    """
    derivative = np.gradient(psi_j, phi)
    return complex(-1j * trapezoid(np.conj(psi_i) * derivative, phi))
