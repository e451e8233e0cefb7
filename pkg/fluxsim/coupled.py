"""Fluxonium coupled to a readout resonator: dressed spectra, state following along
flux sweeps and transition catalogs.
"""

from __future__ import annotations

import warnings
from dataclasses import replace
from typing import Any, Sequence

import numpy as np
from scipy.linalg import eigh
from scipy.optimize import linear_sum_assignment
from tqdm import tqdm

from .classes import (
    BasisConfig,
    CoupledModel,
    DressedLabel,
    DressedSpectrum,
    Spectrum,
    Transition,
    TransitionCatalog,
    as_array,
)
from .constants import FOLLOWING_AMBIGUITY, NUM_LEVELS, TWO_PHOTON_DETUNING_FLOOR
from .fluxonium import diagonalize, operator_matrix
from .utils import lowering_operator

CATALOG_COLUMNS = [
    "flux",
    "frequency_GHz",
    "weight",
    "order",
    "initial_label",
    "final_label",
]


def fluxonium_basis(
    model: CoupledModel, basis: BasisConfig | None = None
) -> BasisConfig:
    r"""Basis configuration computing enough fluxonium levels for the model.

    :param model: coupled model.
    :param basis: basis to start from. (default: ``BasisConfig()``)
    :return: the basis configuration.
    """
    if basis is None:
        basis = BasisConfig()
    num_levels = max(basis.num_levels, model.n_flux_levels, NUM_LEVELS)
    return replace(basis, num_levels=min(num_levels, basis.n_basis))


def build_coupled(model: CoupledModel, spec: Spectrum) -> np.ndarray:
    r"""Builds the coupled Hamiltonian
    sum_j E_j |j><j| + nu_r a^dagger a + g sum_jk <j|n|k> |j><k| (a + a^dagger),
    in the product basis of fluxonium eigenstates and photon numbers, fluxonium
    index major.

    :param model: coupled model.
    :param spec: fluxonium spectrum with at least ``model.n_flux_levels`` states.
    :return: the ``(dim, dim)`` complex Hermitian matrix, in GHz.
    """
    n_flux, n_photons = model.n_flux_levels, model.n_photons
    if len(spec) < n_flux:
        raise ValueError(
            f"The fluxonium spectrum has {len(spec)} states, the model needs "
            f"{n_flux}"
        )
    charge = operator_matrix(spec, "charge")[:n_flux, :n_flux]
    a = lowering_operator(n_photons)
    eye_flux, eye_photons = np.eye(n_flux), np.eye(n_photons)

    ham = np.kron(np.diag(spec.energies[:n_flux]), eye_photons).astype(complex)
    ham += model.nu_r * np.kron(eye_flux, a.T @ a)
    ham += model.g * np.kron(charge, a + a.T)
    return (ham + ham.conj().T) / 2


def bare_operators(model: CoupledModel, spec: Spectrum) -> dict[str, np.ndarray]:
    r"""Charge, resonator lowering and photon number operators in the bare product
    basis.

    :param model: coupled model.
    :param spec: fluxonium spectrum.
    :return: dictionary with the ``charge``, ``a`` and ``photons`` matrices.
    """
    n_flux, n_photons = model.n_flux_levels, model.n_photons
    a = lowering_operator(n_photons)
    return {
        "charge": np.kron(
            operator_matrix(spec, "charge")[:n_flux, :n_flux], np.eye(n_photons)
        ),
        "a": np.kron(np.eye(n_flux), a).astype(complex),
        "photons": np.kron(np.eye(n_flux), a.T @ a),
    }


def dressed_operator(dressed: DressedSpectrum, bare: np.ndarray) -> np.ndarray:
    """Expresses a bare product basis operator in the dressed eigenbasis."""
    vectors = dressed.eigenvectors
    return vectors.conj().T @ bare @ vectors


def diagonalize_coupled(
    model: CoupledModel,
    spec: Spectrum | None = None,
    basis: BasisConfig | None = None,
) -> DressedSpectrum:
    r"""Diagonalizes the coupled Hamiltonian and labels each dressed state by its
    dominant bare product state.

    :param model: coupled model.
    :param spec: fluxonium spectrum at the model flux, computed when not given.
    :param basis: fluxonium basis configuration, used when ``spec`` is not given.
    :return: the dressed spectrum.
    """
    if spec is None:
        spec = diagonalize(model.fluxonium, fluxonium_basis(model, basis))
    energies, vectors = eigh(build_coupled(model, spec))

    # Global phase: largest component real and positive
    largest = np.argmax(np.abs(vectors), axis=0)
    phases = vectors[largest, np.arange(vectors.shape[1])]
    vectors = vectors * (np.abs(phases) / phases)

    weights = np.abs(vectors) ** 2
    dominant = np.argmax(weights, axis=0)
    provenance = []
    for state, index in enumerate(dominant):
        bare_index, photons = divmod(int(index), model.n_photons)
        overlap = float(np.clip(weights[index, state], np.finfo(float).tiny, 1.0))
        provenance.append(
            DressedLabel(spec.labels[bare_index], bare_index, photons, overlap)
        )
    return DressedSpectrum(
        flux=model.fluxonium.phi_ext,
        energies=energies,
        eigenvectors=vectors,
        provenance=provenance,
        fluxonium=spec,
        model=model,
    )


def _oscillator_basis_vectors(dressed: DressedSpectrum, n_basis: int) -> np.ndarray:
    # Dressed states in the flux-independent oscillator x Fock basis
    model = dressed.model
    flux_vectors = np.zeros((n_basis, model.n_flux_levels))
    source = dressed.fluxonium.eigenvectors[:, : model.n_flux_levels]
    flux_vectors[: source.shape[0]] = source
    dressed_vectors = dressed.eigenvectors.reshape(
        model.n_flux_levels, model.n_photons, -1
    )
    return np.einsum("bj,jnd->bnd", flux_vectors, dressed_vectors).reshape(
        n_basis * model.n_photons, -1
    )


def follow_states(
    previous: DressedSpectrum, current: DressedSpectrum
) -> DressedSpectrum:
    r"""Assigns the branches of ``previous`` to the states of ``current`` by
    maximizing the total eigenvector overlap. Two candidates whose overlaps with
    the same predecessor are within 1% are reported as ambiguous, and their
    continuity is lowered to the overlap margin separating them.

    :param previous: dressed spectrum of the previous flux point, with branches.
    :param current: dressed spectrum of the current flux point.
    :return: ``current`` with its branches, continuity and ambiguities.
    """
    n_basis = max(
        previous.fluxonium.basis.n_basis, current.fluxonium.basis.n_basis
    )
    overlaps = (
        np.abs(
            _oscillator_basis_vectors(previous, n_basis).conj().T
            @ _oscillator_basis_vectors(current, n_basis)
        )
        ** 2
    )
    rows, cols = linear_sum_assignment(-overlaps)
    prev_branches = (
        previous.branches
        if previous.branches is not None
        else np.arange(len(previous))
    )
    branches = np.empty(len(current), dtype=int)
    continuity = np.empty(len(current))
    ambiguous, margins = [], []
    for row, col in zip(rows, cols):
        branches[col] = prev_branches[row]
        continuity[col] = overlaps[row, col]
        ranked = np.argsort(overlaps[row])[::-1]
        best, second = overlaps[row, ranked[0]], overlaps[row, ranked[1]]
        if best - second < FOLLOWING_AMBIGUITY * best:
            ambiguous.append((int(ranked[0]), int(ranked[1])))
            margins.append(best - second)
    for pair, margin in zip(ambiguous, margins):
        continuity[list(pair)] = np.minimum(continuity[list(pair)], margin)
    if ambiguous:
        warnings.warn(
            f"Ambiguous state following at flux {current.flux}: candidate pairs "
            f"{ambiguous}",
            stacklevel=2,
        )
    return replace(
        current, branches=branches, continuity=continuity, ambiguous=ambiguous
    )


def dressed_sweep(
    model: CoupledModel,
    flux_grid: Sequence[float] | np.ndarray,
    basis: BasisConfig | None = None,
    verbose: bool = False,
) -> list[DressedSpectrum]:
    r"""Dressed spectra along a flux sweep, with states followed from one point to
    the next by eigenvector overlap. The branch id of a state is its index at the
    first flux point.

    :param model: coupled model, its flux is ignored.
    :param flux_grid: external flux values, in flux quanta.
    :param basis: fluxonium basis configuration. (default: ``BasisConfig()``)
    :param verbose: shows a progress bar. (default: False)
    :return: one dressed spectrum per flux point.
    """
    flux_grid = as_array(flux_grid)
    sweep = []
    for flux in tqdm(flux_grid, desc="Dressed sweep", disable=not verbose):
        dressed = diagonalize_coupled(model.at_flux(flux), basis=basis)
        if sweep:
            dressed = follow_states(sweep[-1], dressed)
        else:
            dressed = replace(
                dressed,
                branches=np.arange(len(dressed)),
                continuity=np.ones(len(dressed)),
            )
        sweep.append(dressed)
    return sweep


def branch_label(sweep: list[DressedSpectrum], branch: int) -> DressedLabel:
    """Provenance label of a branch, as seen at the first point of the sweep."""
    return sweep[0].provenance[branch]


def transition_catalog(
    model: CoupledModel,
    flux: float,
    initial: str | tuple[int, int, int] | DressedLabel = "g0,0",
    max_photon_order: int = 2,
    detuning_floor: float = TWO_PHOTON_DETUNING_FLOOR,
    dressed: DressedSpectrum | None = None,
    basis: BasisConfig | None = None,
) -> TransitionCatalog:
    r"""Lists the transitions from one dressed state to every higher dressed state.
    One-photon lines are weighted by the charge drive and photon drive matrix
    elements. Two-photon lines appear at half the transition frequency, weighted
    by the second order amplitude of the charge drive, whose energy denominators
    are kept away from zero by ``detuning_floor``.

    :param model: coupled model, its flux is ignored.
    :param flux: external flux, in flux quanta.
    :param initial: provenance label of the initial dressed state, e.g. ``"g0,0"``.
    :param max_photon_order: 1 or 2.
    :param detuning_floor: smallest energy denominator magnitude, in GHz.
    :param dressed: precomputed dressed spectrum of ``model`` at ``flux``.
    :param basis: fluxonium basis configuration, used when ``dressed`` is not given.
        (default: ``BasisConfig()``)
    :return: the transition catalog.
    """
    if max_photon_order not in (1, 2):
        raise ValueError(f"max_photon_order must be 1 or 2, got {max_photon_order}")
    if dressed is None:
        dressed = diagonalize_coupled(model.at_flux(flux), basis=basis)
    elif dressed.model != model.at_flux(flux):
        raise ValueError(
            f"The dressed spectrum was computed at flux {dressed.flux} for another "
            f"model than the one requested at flux {flux}"
        )
    start = dressed.find(initial)
    bare = bare_operators(dressed.model, dressed.fluxonium)
    charge = dressed_operator(dressed, bare["charge"])
    photon_drive = dressed_operator(dressed, bare["a"] + bare["a"].conj().T)

    energies = dressed.energies
    finals = np.where(energies > energies[start])[0]
    entries = []
    for final in finals:
        frequency = float(energies[final] - energies[start])
        charge_weight = float(np.abs(charge[final, start]) ** 2)
        photon_weight = float(np.abs(photon_drive[final, start]) ** 2)
        entries.append(
            Transition(
                initial=dressed.provenance[start],
                final=dressed.provenance[final],
                final_index=int(final),
                frequency=frequency,
                order=1,
                weight=charge_weight + photon_weight,
                charge_weight=charge_weight,
                photon_weight=photon_weight,
            )
        )

    if max_photon_order == 2:
        for final in finals:
            half = (energies[final] - energies[start]) / 2
            detunings = energies - energies[start] - half
            small = np.abs(detunings) < detuning_floor
            detunings[small] = np.where(detunings[small] < 0, -1, 1) * detuning_floor
            amplitude = np.sum(charge[final, :] * charge[:, start] / detunings)
            weight = float(np.abs(amplitude) ** 2)
            entries.append(
                Transition(
                    initial=dressed.provenance[start],
                    final=dressed.provenance[final],
                    final_index=int(final),
                    frequency=float(half),
                    order=2,
                    weight=weight,
                    charge_weight=weight,
                )
            )
    return TransitionCatalog(
        flux=float(dressed.flux), initial=dressed.provenance[start], entries=entries
    )


def catalog_rows(catalog: TransitionCatalog) -> list[dict[str, Any]]:
    r"""Converts a catalog to CSV rows.

    :param catalog: transition catalog.
    :return: one dictionary per line, keyed by ``CATALOG_COLUMNS``.
    """
    return [
        {
            "flux": catalog.flux,
            "frequency_GHz": entry.frequency,
            "weight": entry.weight,
            "order": entry.order,
            "initial_label": str(entry.initial),
            "final_label": str(entry.final),
        }
        for entry in catalog
    ]
