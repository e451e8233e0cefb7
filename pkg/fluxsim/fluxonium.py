"""Fluxonium Hamiltonian in a harmonic oscillator basis, its eigenstates,
wavefunctions, matrix elements and state labels.
"""

from __future__ import annotations

from dataclasses import replace
from typing import Sequence

import numpy as np
from scipy.integrate import trapezoid
from scipy.linalg import eigh, eigh_tridiagonal
from tqdm import tqdm

from .classes import (
    BasisConfig,
    ConvergenceError,
    FluxoniumParams,
    IdentificationError,
    Spectrum,
    StateLabel,
    as_array,
)
from .constants import (
    CONVERGENCE_EXTRA_BASIS,
    CONVERGENCE_TOL,
    LABEL_GRID_SIZE,
    MIXED_LABEL_THRESHOLD,
    SPLITTING_CONVENTIONS,
    TUNNEL_PAIRS,
    WELL_INDEXES,
    WELL_TIE_TOLERANCE,
)
from .utils import hermite_functions, lowering_operator

OPERATORS = ("charge", "phase")


def oscillator_length(params: FluxoniumParams, basis: BasisConfig) -> float:
    r"""Length ``s`` of the basis oscillator, such that phi = s (a + a^dagger).

    :param params: fluxonium parameters.
    :param basis: basis configuration.
    :return: the oscillator length, in radians.
    """
    stiffness = params.e_l
    if basis.zpf_scale != "inductive":
        stiffness += params.e_j
    return float((2 * params.e_c / stiffness) ** 0.25)


def _phase_and_charge(dim: int, zpf: float) -> tuple[np.ndarray, np.ndarray]:
    # The charge operator is 1j times the returned real antisymmetric matrix
    a = lowering_operator(dim)
    return zpf * (a + a.T), (a.T - a) / (2 * zpf)


def _hamiltonian_terms(
    params: FluxoniumParams, n_basis: int, zpf: float
) -> tuple[np.ndarray, np.ndarray]:
    r"""Returns the quadratic part of the Hamiltonian and cos(phi - 2 pi phi_ext),
    truncated to ``n_basis`` states. Products and the cosine are computed in a basis
    twice as large so that the kept block is not affected by the truncation.
    """
    dim = 2 * n_basis
    phi, charge = _phase_and_charge(dim, zpf)
    quadratic = -4 * params.e_c * (charge @ charge) + 0.5 * params.e_l * (phi @ phi)

    # cos of the phase operator from its spectral decomposition
    positions, vectors = eigh_tridiagonal(
        np.zeros(dim), zpf * np.sqrt(np.arange(1, dim, dtype=float))
    )
    cosine = (vectors * np.cos(positions - 2 * np.pi * params.phi_ext)) @ vectors.T
    return quadratic[:n_basis, :n_basis], cosine[:n_basis, :n_basis]


def build_hamiltonian(
    params: FluxoniumParams, basis: BasisConfig | None = None
) -> np.ndarray:
    r"""Builds the fluxonium Hamiltonian
    4 E_C n^2 + E_L phi^2 / 2 - E_J cos(phi - 2 pi phi_ext) in the oscillator basis.
    With the convention n = -i d/dphi the matrix is real symmetric.

    :param params: fluxonium parameters.
    :param basis: basis configuration. (default: ``BasisConfig()``)
    :return: the ``(n_basis, n_basis)`` Hamiltonian, in GHz.
    """
    if basis is None:
        basis = BasisConfig()
    zpf = oscillator_length(params, basis)
    quadratic, cosine = _hamiltonian_terms(params, basis.n_basis, zpf)
    ham = quadratic - params.e_j * cosine
    return (ham + ham.T) / 2


def _solve(
    params: FluxoniumParams, basis: BasisConfig
) -> tuple[np.ndarray, np.ndarray]:
    energies, vectors = eigh(
        build_hamiltonian(params, basis), subset_by_index=[0, basis.num_levels - 1]
    )
    # Fix the arbitrary sign so that the largest component is positive
    largest = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[largest, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1
    return energies, vectors * signs


def _converged(
    params: FluxoniumParams, basis: BasisConfig
) -> tuple[np.ndarray, np.ndarray, float]:
    energies, vectors = _solve(params, basis)
    larger = BasisConfig(
        basis.n_basis + CONVERGENCE_EXTRA_BASIS, basis.zpf_scale, basis.num_levels
    )
    energies_larger, _ = _solve(params, larger)
    return energies, vectors, float(np.max(np.abs(energies_larger - energies)))


def diagonalize(
    params: FluxoniumParams,
    basis: BasisConfig | None = None,
    check_convergence: bool = True,
) -> Spectrum:
    r"""Computes the lowest eigenpairs of the fluxonium Hamiltonian and labels them.
    Convergence is verified by solving again with a basis larger by 20 states. If
    the energies move by more than 1e-6 GHz, the basis size is doubled once.

    :param params: fluxonium parameters.
    :param basis: basis configuration. (default: ``BasisConfig()``)
    :param check_convergence: whether to run the convergence check. (default: True)
    :return: the labeled spectrum.
    """
    if basis is None:
        basis = BasisConfig()
    if check_convergence:
        energies, vectors, change = _converged(params, basis)
        if change >= CONVERGENCE_TOL:
            coarse = energies
            basis = BasisConfig(2 * basis.n_basis, basis.zpf_scale, basis.num_levels)
            energies, vectors, change = _converged(params, basis)
            if change >= CONVERGENCE_TOL:
                raise ConvergenceError(
                    f"Fluxonium energies did not converge with {basis.n_basis} basis "
                    f"states (change of {change:.2e} GHz)",
                    coarse,
                    energies,
                )
    else:
        energies, vectors = _solve(params, basis)

    spectrum = Spectrum(
        energies=energies,
        eigenvectors=vectors,
        labels=[],
        params=params,
        basis=basis,
        zpf=oscillator_length(params, basis),
    )
    return replace(spectrum, labels=label_states(spectrum))


def flux_sweep(
    params: FluxoniumParams,
    flux_grid: Sequence[float] | np.ndarray,
    basis: BasisConfig | None = None,
    verbose: bool = False,
) -> list[Spectrum]:
    r"""Diagonalizes the fluxonium at each point of a flux grid.

    :param params: fluxonium parameters, ``phi_ext`` is ignored.
    :param flux_grid: external flux values, in flux quanta.
    :param basis: basis configuration. (default: ``BasisConfig()``)
    :param verbose: shows a progress bar. (default: False)
    :return: one spectrum per flux point.
    """
    flux_grid = as_array(flux_grid)
    return [
        diagonalize(params.at_flux(flux), basis)
        for flux in tqdm(flux_grid, desc="Diagonalizing fluxonium", disable=not verbose)
    ]


def eval_wavefunction(
    spec: Spectrum, state_index: int, phi_grid: Sequence[float] | np.ndarray
) -> np.ndarray:
    r"""Evaluates the wavefunction of an eigenstate on a phase grid, normalized with
    the trapezoidal rule on that grid.

    :param spec: fluxonium spectrum.
    :param state_index: index of the state.
    :param phi_grid: strictly ascending phase values.
    :return: the complex amplitudes.
    """
    if not 0 <= state_index < len(spec):
        raise IndexError(
            f"state_index {state_index} out of range, {len(spec)} states computed"
        )
    phi = as_array(phi_grid)
    if phi.ndim != 1 or phi.size < 2 or np.any(np.diff(phi) <= 0):
        raise ValueError("phi_grid must be a strictly ascending 1D grid")
    psi = _wavefunctions(spec, phi)[state_index]
    psi /= np.sqrt(trapezoid(psi**2, phi))
    return psi.astype(complex)


def _wavefunctions(spec: Spectrum, phi: np.ndarray) -> np.ndarray:
    scale = np.sqrt(2) * spec.zpf
    basis_functions = hermite_functions(spec.basis.n_basis, phi / scale)
    return spec.eigenvectors.T @ basis_functions / np.sqrt(scale)


def operator_matrix(spec: Spectrum, op: str) -> np.ndarray:
    r"""Matrix of the charge or phase operator between all computed states.

    :param spec: fluxonium spectrum.
    :param op: ``"charge"`` or ``"phase"``.
    :return: the ``(len(spec), len(spec))`` complex matrix.
    """
    if op not in OPERATORS:
        raise ValueError(f"op must be one of {OPERATORS}, got {op}")
    phi, charge = _phase_and_charge(spec.basis.n_basis, spec.zpf)
    vectors = spec.eigenvectors
    if op == "phase":
        return (vectors.T @ phi @ vectors).astype(complex)
    return 1j * (vectors.T @ charge @ vectors)


def matrix_element(spec: Spectrum, op: str, i: int, j: int) -> complex:
    r"""Matrix element ``<i|op|j>`` between two eigenstates. Charge elements are
    purely imaginary.

    :param spec: fluxonium spectrum.
    :param op: ``"charge"`` or ``"phase"``.
    :param i: index of the bra state.
    :param j: index of the ket state.
    :return: the matrix element.
    """
    for index in (i, j):
        if not 0 <= index < len(spec):
            raise IndexError(f"state index {index} out of range")
    phi, charge = _phase_and_charge(spec.basis.n_basis, spec.zpf)
    bra, ket = spec.eigenvectors[:, i], spec.eigenvectors[:, j]
    if op == "phase":
        return complex(bra @ phi @ ket)
    if op == "charge":
        return complex(1j * (bra @ charge @ ket))
    raise ValueError(f"op must be one of {OPERATORS}, got {op}")


def well_centers(params: FluxoniumParams) -> dict[int, float]:
    r"""Positions of the potential minima, indexed by fluxoid number ``m``. Well
    ``m`` sits near 2 pi (phi_ext - m), pulled toward zero by the inductance.

    :param params: fluxonium parameters.
    :return: mapping from fluxoid number to phase.
    """
    shrink = params.e_j / (params.e_j + params.e_l)
    return {m: 2 * np.pi * (params.phi_ext - m) * shrink for m in WELL_INDEXES}


def well_masses(spec: Spectrum, grid_size: int = LABEL_GRID_SIZE) -> np.ndarray:
    r"""Probability of each computed state in each well. Wells are delimited by the
    midpoints between consecutive minima, the outermost ones extending to infinity.

    :param spec: fluxonium spectrum.
    :param grid_size: number of points of the integration grid.
    :return: ``(len(spec), len(WELL_INDEXES))`` array, columns in the order of
        ``WELL_INDEXES``.
    """
    centers = well_centers(spec.params)
    positions = np.array([centers[m] for m in WELL_INDEXES])
    half_width = np.pi + 4 * spec.zpf * np.sqrt(spec.basis.n_basis) / 2
    phi = np.linspace(
        positions.min() - half_width, positions.max() + half_width, grid_size
    )
    density = _wavefunctions(spec, phi) ** 2
    weights = np.full(grid_size, phi[1] - phi[0])
    weights[[0, -1]] /= 2
    density *= weights
    density /= density.sum(axis=1, keepdims=True)

    # Assign each grid point to its closest minimum
    owner = np.argmin(np.abs(phi[:, None] - positions[None, :]), axis=1)
    masses = np.zeros((len(spec), len(WELL_INDEXES)))
    for w in range(len(WELL_INDEXES)):
        masses[:, w] = density[:, owner == w].sum(axis=1)
    return masses


def label_states(spec: Spectrum) -> list[StateLabel]:
    r"""Labels each computed state with the well capturing most of its probability
    and its energy rank among the states of that well. A state shared by degenerate
    wells (tunnel doublets at integer and half flux) goes to the tied well holding
    the fewest states so far, then to the well of smallest ``|m|``, so that the two
    partners of a doublet land in distinct wells.

    :param spec: fluxonium spectrum.
    :return: one label per state.
    """
    masses = well_masses(spec)
    labels = []
    counts = {m: 0 for m in WELL_INDEXES}
    for state_masses in masses:
        best = state_masses.max()
        candidates = [
            m
            for m, mass in zip(WELL_INDEXES, state_masses)
            if mass >= best - WELL_TIE_TOLERANCE
        ]
        well = min(candidates, key=lambda m: (counts[m], abs(m), m))
        confidence = float(np.clip(state_masses[WELL_INDEXES.index(well)], 0, 1))
        labels.append(StateLabel(well, counts[well], confidence))
        counts[well] += 1
    return labels


def tunnel_splitting(
    params: FluxoniumParams,
    basis: BasisConfig | None = None,
    pair: str = "ground",
    convention: str = "gap",
) -> float:
    r"""Splitting of a tunnel doublet at half flux quantum. The doublets are the
    consecutive states living in the two degenerate wells (fluxoid 0 and 1), so the
    extraction relies on well masses and energy gaps, never on labels.

    :param params: fluxonium parameters, ``phi_ext`` is ignored.
    :param basis: basis configuration. (default: ``BasisConfig()``)
    :param pair: ``"ground"`` or ``"excited"`` doublet.
    :param convention: ``"gap"`` returns the full avoided-crossing gap,
        ``"coupling"`` half of it. (default: ``"gap"``)
    :return: the splitting, in GHz.
    """
    if pair not in TUNNEL_PAIRS:
        raise ValueError(f"pair must be one of {TUNNEL_PAIRS}")
    if convention not in SPLITTING_CONVENTIONS:
        raise ValueError(f"convention must be one of {SPLITTING_CONVENTIONS}")
    spec = diagonalize(params.at_flux(0.5), basis)
    masses = well_masses(spec)
    columns = [WELL_INDEXES.index(0), WELL_INDEXES.index(1)]
    doublet_mass = masses[:, columns].sum(axis=1)
    doublet_states = np.where(doublet_mass >= MIXED_LABEL_THRESHOLD)[0]

    first = TUNNEL_PAIRS.index(pair) * 2
    if len(doublet_states) < first + 2:
        raise IdentificationError(
            f"The {pair} doublet could not be identified among the {len(spec)} "
            f"computed states"
        )
    i, j = doublet_states[first], doublet_states[first + 1]
    gap = float(spec.energies[j] - spec.energies[i])
    return gap if convention == "gap" else gap / 2


def charge_sum_rule(spec: Spectrum) -> tuple[float, float]:
    r"""Both sides of the sum rule sum_j (E_j - E_0) |<0|n|j>|^2 = <0|V''|0> / 2,
    the left side being evaluated over the complete truncated basis.

    :param spec: fluxonium spectrum.
    :return: the spectral sum and half of the mean potential curvature, in GHz.
    """
    params = spec.params
    quadratic, cosine = _hamiltonian_terms(params, spec.basis.n_basis, spec.zpf)
    ham = quadratic - params.e_j * cosine
    _, charge = _phase_and_charge(spec.basis.n_basis, spec.zpf)
    ground = spec.eigenvectors[:, 0]
    kicked = charge @ ground
    spectral = kicked @ ham @ kicked - spec.energies[0] * (kicked @ kicked)
    curvature = params.e_l + params.e_j * (ground @ cosine @ ground)
    return float(spectral), float(curvature / 2)
