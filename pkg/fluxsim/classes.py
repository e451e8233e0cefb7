"""Common value classes and errors."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import TYPE_CHECKING, Any, Sequence

import numpy as np

from .constants import (
    GAMMA_PHI,
    GAMMA_Q,
    KAPPA,
    MIXED_LABEL_THRESHOLD,
    N_BASIS,
    N_FLUX_LEVELS,
    N_PHOTONS,
    NUM_LEVELS,
    POSITIVITY_TOL,
    TEMPERATURE,
    TRACE_TOL,
    ZETA,
    ZPF_SCALES,
)

if TYPE_CHECKING:
    from scipy.sparse import csr_matrix

PLASMON_LETTERS = "gefh"


# ERRORS


class DegenerateCircuitError(ValueError):
    """The four-node circuit has a vanishing total capacitance."""


class ConvergenceError(RuntimeError):
    r"""The fluxonium eigensolver did not converge, even after doubling the basis.

    :param message: error message.
    :param coarse: energies computed with the smaller basis.
    :param fine: energies computed with the larger basis.
    """

    def __init__(self, message: str, coarse: np.ndarray, fine: np.ndarray) -> None:
        super().__init__(message)
        self.coarse = coarse
        self.fine = fine


class IdentificationError(RuntimeError):
    """A tunnel doublet could not be identified among the computed states."""


class LabelError(KeyError):
    """No dressed state carries the requested provenance label."""


class DegenerateSteadyStateError(RuntimeError):
    r"""The Liouvillian kernel is not one-dimensional.

    :param kernel_dim: dimension of the kernel.
    """

    def __init__(self, kernel_dim: int) -> None:
        super().__init__(
            f"The steady state is not unique, the Liouvillian kernel has dimension "
            f"{kernel_dim}"
        )
        self.kernel_dim = kernel_dim


class CellError(RuntimeError):
    r"""A grid cell of a sweep failed.

    :param coordinates: indexes of the cell in the grid.
    :param cause: original exception.
    """

    def __init__(self, coordinates: tuple[int, ...], cause: Exception) -> None:
        super().__init__(f"Cell {coordinates} failed: {cause!r}")
        self.coordinates = coordinates
        self.cause = cause


class ConfigError(ValueError):
    r"""Invalid run configuration.

    :param key_path: dotted path of the offending key, e.g. ``sweep.flux_steps``.
    :param message: what is wrong with it.
    """

    def __init__(self, key_path: str, message: str) -> None:
        super().__init__(f"{key_path}: {message}")
        self.key_path = key_path


# CIRCUIT


@dataclass(frozen=True)
class ChainRecord:
    r"""Josephson junction array forming the superinductance.

    :param n_junctions: number of junctions of the array.
    :param l_j_single: inductance of one junction, in nH.
    :param c_g_single: ground capacitance of one junction island, in fF.
    """

    n_junctions: int
    l_j_single: float
    c_g_single: float = 0.0

    def __post_init__(self) -> None:
        if self.n_junctions < 1:
            raise ValueError("n_junctions must be at least 1")
        if self.l_j_single <= 0:
            raise ValueError("l_j_single must be strictly positive")
        if self.c_g_single < 0:
            raise ValueError("c_g_single must be positive")


@dataclass(frozen=True)
class FourNodeCircuit:
    r"""Physical circuit of the resonator (node R), the coupling island (node 1) and
    the qubit (node Q). Capacitances are in fF, energies in GHz.
    """

    c_r: float
    c_c: float
    c_1: float
    c_2: float
    e_lr: float
    e_l_chain: float
    e_j: float
    chain: ChainRecord | None = None

    def __post_init__(self) -> None:
        for name in ("c_r", "c_c", "c_1", "c_2"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        for name in ("e_lr", "e_l_chain", "e_j"):
            if getattr(self, name) <= 0:
                raise ValueError(
                    f"{name} must be strictly positive, got {getattr(self, name)}"
                )


@dataclass(frozen=True)
class ThreeNodeCircuit:
    """Effective circuit after eliminating the coupling island."""

    c_r_eff: float
    c_q_eff: float
    c_c_eff: float
    e_lr: float
    e_l_chain: float
    e_j: float

    def validate(self, c_2: float | None = None, c_c: float | None = None) -> None:
        r"""Checks the invariants of the effective circuit.

        :param c_2: original qubit capacitance, to bound ``c_c_eff`` (optional).
        :param c_c: original coupling capacitance, to bound ``c_c_eff`` (optional).
        """
        if self.c_r_eff <= 0:
            raise ValueError("c_r_eff must be strictly positive")
        if self.c_q_eff <= 0:
            raise ValueError("c_q_eff must be strictly positive")
        if self.c_c_eff < 0:
            raise ValueError("c_c_eff must be positive")
        bounds = [c for c in (c_2, c_c) if c is not None]
        if bounds and self.c_c_eff > min(bounds) * (1 + 1e-12):
            raise ValueError("c_c_eff can not exceed min(c_2, c_c)")


@dataclass(frozen=True)
class CircuitEnergies:
    """Energy scales of the effective circuit, in GHz."""

    e_c: float
    e_l: float
    e_j: float
    nu_r: float


@dataclass(frozen=True)
class ChainReport:
    r"""Findings of the junction-array validity check.

    :param applicable: ``False`` when the circuit has no chain record.
    :param advisories: human readable findings, empty when the chain looks sound.
    :param inductance_ratio: total over single-junction inductance.
    :param stray_fraction: total ground capacitance over ``c_q_eff``.
    """

    applicable: bool
    advisories: list[str] = field(default_factory=list)
    inductance_ratio: float | None = None
    stray_fraction: float | None = None


# FLUXONIUM


@dataclass(frozen=True)
class FluxoniumParams:
    r"""Parameters of the fluxonium Hamiltonian, energies in GHz and the external
    flux ``phi_ext`` in units of the flux quantum.
    """

    e_c: float
    e_j: float
    e_l: float
    phi_ext: float = 0.0

    def __post_init__(self) -> None:
        for name in ("e_c", "e_j", "e_l"):
            if not getattr(self, name) > 0:
                raise ValueError(
                    f"{name} must be strictly positive, got {getattr(self, name)}"
                )
        if not np.isfinite(self.phi_ext):
            raise ValueError("phi_ext must be finite")

    def at_flux(self, phi_ext: float) -> FluxoniumParams:
        """Copy of these parameters at another external flux."""
        return replace(self, phi_ext=float(phi_ext))


@dataclass(frozen=True)
class BasisConfig:
    r"""Harmonic oscillator basis used to represent the fluxonium Hamiltonian.

    :param n_basis: number of oscillator states kept.
    :param zpf_scale: ``"inductive"`` uses the oscillator of the inductive term,
        ``"plasma"`` the local oscillator of a well (E_J + E_L).
    :param num_levels: number of eigenpairs returned by the eigensolver.
    """

    n_basis: int = N_BASIS
    zpf_scale: str = "inductive"
    num_levels: int = NUM_LEVELS

    def __post_init__(self) -> None:
        if self.n_basis < 10:
            raise ValueError(f"n_basis must be at least 10, got {self.n_basis}")
        if self.zpf_scale not in ZPF_SCALES:
            raise ValueError(f"zpf_scale must be one of {ZPF_SCALES}")
        if not 1 <= self.num_levels <= self.n_basis:
            raise ValueError("num_levels must be within [1, n_basis]")


@dataclass(frozen=True)
class StateLabel:
    r"""Well (fluxoid number) and plasmon level of a fluxonium eigenstate.

    :param well: fluxoid index of the well holding most of the probability.
    :param plasmon: rank of the state among the states of the same well.
    :param confidence: probability mass captured by the well.
    """

    well: int
    plasmon: int
    confidence: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError(f"confidence must be in [0, 1], got {self.confidence}")

    @property
    def mixed(self) -> bool:
        return self.confidence < MIXED_LABEL_THRESHOLD

    def __str__(self) -> str:
        if self.plasmon < len(PLASMON_LETTERS):
            return f"{PLASMON_LETTERS[self.plasmon]}{self.well}"
        return f"p{self.plasmon}_{self.well}"


@dataclass(frozen=True)
class Spectrum:
    r"""Lowest eigenpairs of the fluxonium Hamiltonian.

    :param energies: ascending eigenenergies, in GHz.
    :param eigenvectors: oscillator basis coefficients, one column per state.
    :param labels: well / plasmon label of each state.
    :param params: parameters the spectrum was computed with.
    :param basis: basis the spectrum was computed in.
    :param zpf: oscillator length ``s`` such that phi = s (a + a^dagger).
    """

    energies: np.ndarray
    eigenvectors: np.ndarray
    labels: list[StateLabel]
    params: FluxoniumParams
    basis: BasisConfig
    zpf: float

    def __post_init__(self) -> None:
        self.energies.flags.writeable = False
        self.eigenvectors.flags.writeable = False

    def __len__(self) -> int:
        return len(self.energies)

    def index_of(self, well: int, plasmon: int) -> int:
        r"""Returns the index of the state with the given label.

        :param well: fluxoid index.
        :param plasmon: plasmon level.
        :return: index of the state.
        """
        for i, label in enumerate(self.labels):
            if label.well == well and label.plasmon == plasmon:
                return i
        raise LabelError(f"no state labeled ({well}, {plasmon})")


# COUPLED SYSTEM


@dataclass(frozen=True)
class CoupledModel:
    """Fluxonium capacitively coupled to a single resonator mode."""

    fluxonium: FluxoniumParams
    nu_r: float
    g: float
    n_flux_levels: int = N_FLUX_LEVELS
    n_photons: int = N_PHOTONS

    def __post_init__(self) -> None:
        if self.nu_r <= 0:
            raise ValueError("nu_r must be strictly positive")
        if self.g < 0:
            raise ValueError("g must be positive")
        if self.n_flux_levels < 3:
            raise ValueError("n_flux_levels must be at least 3")
        if self.n_photons < 2:
            raise ValueError("n_photons must be at least 2")

    @property
    def dim(self) -> int:
        return self.n_flux_levels * self.n_photons

    def at_flux(self, phi_ext: float) -> CoupledModel:
        return replace(self, fluxonium=self.fluxonium.at_flux(phi_ext))


@dataclass(frozen=True)
class DressedLabel:
    r"""Dominant bare product state of a dressed state.

    :param state: label of the fluxonium state.
    :param bare_index: index of the fluxonium eigenstate.
    :param photons: number of resonator photons.
    :param overlap: weight of the bare product state in the dressed state.
    """

    state: StateLabel
    bare_index: int
    photons: int
    overlap: float

    def __str__(self) -> str:
        return f"{self.state},{self.photons}"


@dataclass(frozen=True)
class DressedSpectrum:
    r"""Eigensystem of the coupled fluxonium-resonator Hamiltonian at one flux.

    :param flux: external flux, in flux quanta.
    :param energies: ascending dressed energies, in GHz.
    :param eigenvectors: dressed states in the bare product basis (fluxonium-major).
    :param provenance: dominant bare product state of each dressed state.
    :param fluxonium: bare fluxonium spectrum the product basis is built from.
    :param model: coupled model at this flux.
    :param branches: branch id of each state when following states along a sweep.
    :param continuity: overlap of each state with its predecessor along a sweep.
    :param ambiguous: (state, other candidate) pairs whose overlaps with the same
        predecessor were within 1%.
    """

    flux: float
    energies: np.ndarray
    eigenvectors: np.ndarray
    provenance: list[DressedLabel]
    fluxonium: Spectrum
    model: CoupledModel
    branches: np.ndarray | None = None
    continuity: np.ndarray | None = None
    ambiguous: list[tuple[int, int]] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.energies)

    def find(self, selector: str | tuple[int, int, int] | DressedLabel) -> int:
        r"""Finds the dressed state matching a provenance label. When several states
        match, the one with the largest overlap is returned.

        :param selector: a label string (``"g0,1"``), a ``(well, plasmon, photons)``
            tuple or a :class:`DressedLabel`.
        :return: index of the dressed state.
        """
        if isinstance(selector, DressedLabel):
            key = (selector.state.well, selector.state.plasmon, selector.photons)
        elif isinstance(selector, str):
            key = parse_dressed_label(selector)
        else:
            key = tuple(selector)
        candidates = [
            (label.overlap, i)
            for i, label in enumerate(self.provenance)
            if (label.state.well, label.state.plasmon, label.photons) == key
        ]
        if not candidates:
            raise LabelError(f"no dressed state labeled {selector} at flux {self.flux}")
        return max(candidates)[1]


def parse_dressed_label(label: str) -> tuple[int, int, int]:
    r"""Parses a dressed label such as ``"g0,1"`` or ``"e-1,0"``.

    :param label: label string, plasmon letter then well index, comma, photons.
    :return: the ``(well, plasmon, photons)`` tuple.
    """
    try:
        state, photons = label.replace(" ", "").split(",")
        plasmon = PLASMON_LETTERS.index(state[0])
        return int(state[1:]), plasmon, int(photons)
    except (ValueError, IndexError) as err:
        raise LabelError(f"invalid dressed label {label!r}") from err


@dataclass(frozen=True)
class Transition:
    """Line of a transition catalog, frequencies in GHz."""

    initial: DressedLabel
    final: DressedLabel
    final_index: int
    frequency: float
    order: int
    weight: float
    charge_weight: float = 0.0
    photon_weight: float = 0.0


@dataclass(frozen=True)
class TransitionCatalog:
    """Lines reachable from one dressed state at one flux."""

    flux: float
    initial: DressedLabel
    entries: list[Transition] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):  # noqa: ANN204
        return iter(self.entries)


# DISSIPATION


@dataclass(frozen=True)
class LindbladConfig:
    r"""Bath and drive parameters of the master equation. Rates and frequencies in
    GHz, temperature in K.

    :param temperature: bath temperature shared by every channel.
    :param kappa: resonator rate constant.
    :param gamma_q: fluxonium charge-channel rate constant.
    :param zeta: drive amplitude.
    :param omega_d: drive frequency.
    :param gamma_phi: white flux-noise dephasing rate, acting on the fluxoid number.
    """

    temperature: float = TEMPERATURE
    kappa: float = KAPPA
    gamma_q: float = GAMMA_Q
    zeta: float = ZETA
    omega_d: float = 0.0
    gamma_phi: float = GAMMA_PHI

    def __post_init__(self) -> None:
        for name in ("temperature", "kappa", "gamma_q", "zeta", "gamma_phi"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")

    def with_drive(self, omega_d: float, zeta: float | None = None) -> LindbladConfig:
        return replace(
            self, omega_d=float(omega_d), zeta=self.zeta if zeta is None else zeta
        )


@dataclass(frozen=True)
class CollapseOperator:
    r"""Lindblad channel in the dressed basis. Either a transition jump
    ``|final><initial|`` or, when ``diagonal`` is given, a dephasing operator.

    :param rate: non-negative rate, in GHz.
    :param final: index of the final dressed state.
    :param initial: index of the initial dressed state.
    :param diagonal: diagonal of a dephasing jump operator.
    """

    rate: float
    final: int = -1
    initial: int = -1
    diagonal: np.ndarray | None = None

    def matrix(self, dim: int) -> np.ndarray:
        if self.diagonal is not None:
            return np.diag(self.diagonal).astype(complex)
        op = np.zeros((dim, dim), dtype=complex)
        op[self.final, self.initial] = 1.0
        return op


@dataclass(frozen=True)
class RotatingFrame:
    r"""Static Hamiltonian of the driven system in the frame of the drive.

    :param h_eff: effective Hamiltonian in the dressed basis, in GHz.
    :param frame_numbers: integer excitation number of each dressed state.
    :param omega_d: drive frequency.
    :param drive: ``"resonator"`` or ``"fluxon"``.
    :param lowering: co-rotating part of the driven operator, lowering the frame
        number by one.
    """

    h_eff: np.ndarray
    frame_numbers: np.ndarray
    omega_d: float
    drive: str
    lowering: np.ndarray


@dataclass(frozen=True)
class Liouvillian:
    r"""Superoperator acting on row-major vectorized density matrices, in GHz.

    :param superoperator: sparse ``dim**2 x dim**2`` matrix.
    :param dim: Hilbert space dimension.
    :param max_scale: largest frequency or rate of the generator.
    :param graph: ``(dim, dim)`` adjacency of the dressed states connected by a jump
        (initial to final) or by a coherent coupling.
    """

    superoperator: csr_matrix
    dim: int
    max_scale: float
    graph: csr_matrix | None = None

    def __call__(self, rho: np.ndarray) -> np.ndarray:
        out = self.superoperator @ np.asarray(rho, dtype=complex).reshape(-1)
        return out.reshape(self.dim, self.dim)


@dataclass(frozen=True)
class DensityMatrix:
    """Density matrix in the dressed basis."""

    matrix: np.ndarray

    def violations(self) -> list[str]:
        r"""Lists the broken density matrix invariants.

        :return: description of each violation, empty for a valid state.
        """
        issues = []
        rho = self.matrix
        if abs(np.trace(rho) - 1) > TRACE_TOL:
            issues.append(f"trace is {np.trace(rho).real:.3e}")
        if np.max(np.abs(rho - rho.conj().T)) > 1e-10:
            issues.append("not Hermitian")
        min_eig = np.linalg.eigvalsh((rho + rho.conj().T) / 2)[0]
        if min_eig < -POSITIVITY_TOL:
            issues.append(f"minimum eigenvalue {min_eig:.3e}")
        return issues

    @property
    def populations(self) -> np.ndarray:
        return np.real(np.diag(self.matrix))

    def expectation(self, operator: np.ndarray) -> complex:
        return complex(np.trace(operator @ self.matrix))

    def trace_distance(self, other: DensityMatrix) -> float:
        eigs = np.linalg.eigvalsh(self.matrix - other.matrix)
        return float(0.5 * np.sum(np.abs(eigs)))


@dataclass(frozen=True)
class Trajectory:
    """States sampled along a time evolution, times in ns."""

    times: np.ndarray
    states: list[DensityMatrix]

    def __len__(self) -> int:
        return len(self.times)

    @property
    def final(self) -> DensityMatrix:
        return self.states[-1]


@dataclass(frozen=True)
class TransmissionMap:
    r"""Normalized steady-state transmission over a flux x frequency grid.

    :param flux: flux grid, in flux quanta.
    :param frequencies: drive frequency grid, in GHz.
    :param amplitudes: ``(len(flux), len(frequencies))`` array, NaN for failed cells.
    :param failed_cells: coordinates and reason of each failed cell.
    """

    flux: np.ndarray
    frequencies: np.ndarray
    amplitudes: np.ndarray
    failed_cells: list[tuple[int, int, str]] = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.amplitudes.shape != (len(self.flux), len(self.frequencies)):
            raise ValueError("amplitude grid shape does not match the flux/freq grids")


# ANALYTICS


@dataclass(frozen=True)
class TwoLevelModel:
    """Resonator and qubit branches coupled by the complex element ``m``, in GHz."""

    eps_r: float
    eps_q: float
    m: complex


@dataclass(frozen=True)
class Hybridization:
    r"""Eigen-decomposition of a :class:`TwoLevelModel`.

    The resonator-like branch is the eigenvector with the largest resonator weight.
    Dispersion fractions are in units of the bare qubit dispersion ``a``.
    """

    eigenvalues: tuple[float, float]
    resonator_branch: tuple[complex, complex]
    qubit_branch: tuple[complex, complex]
    intensity_ratio: float
    decoupled: bool
    resonator_quadratic_fraction: float
    qubit_quadratic_fraction: float
    resonator_quartic: float | None = None
    qubit_quartic: float | None = None

    @property
    def alpha_beta_ratios(self) -> tuple[complex, complex]:
        """alpha / beta of the resonator and qubit branches."""
        return tuple(
            alpha / beta if beta != 0 else complex(np.inf)
            for alpha, beta in (self.resonator_branch, self.qubit_branch)
        )


@dataclass(frozen=True)
class RamanConfig:
    r"""Drives of a Raman transition through a Lambda system, in GHz.

    :param omega_probe: probe Rabi rate.
    :param omega_pump: pump Rabi rate.
    :param delta: detuning from the two-photon resonance.
    :param delta_2gamma: detuning of the pump from the intermediate state.
    """

    omega_probe: float
    omega_pump: float
    delta: float
    delta_2gamma: float

    def __post_init__(self) -> None:
        if self.delta == 0:
            raise ValueError("delta can not be zero")
        if self.delta_2gamma == 0:
            raise ValueError("delta_2gamma can not be zero")


@dataclass(frozen=True)
class DispersionReport:
    r"""Quadratic flux dispersion of the plasmon transition, in GHz per flux
    quantum squared. ``phi_min_coefficient`` is the slope of the Stark shifted
    minimum of the central well, in rad per flux quantum.
    """

    phi_min_coefficient: float
    symmetric: float
    antisymmetric: float
    total: float
    resonator_fraction: float | None = None
    qubit_fraction: float | None = None
    resonator_quartic_fraction: float | None = None
    qubit_quartic_fraction: float | None = None


@dataclass(frozen=True)
class ScalingLaws:
    r"""Closed-form scaling laws.

    :param slope: fluxon line slope 4 pi^2 E_L, GHz per flux quantum.
    :param renormalized_slope: slope with the junction renormalization of the well
        positions, 4 pi^2 E_L E_J / (E_J + E_L).
    :param suppression: tunneling suppression factor.
    :param flux: flux grid of ``t1_relative``.
    :param t1_relative: relative fluxon lifetime on the flux grid.
    :param reference_flux: flux at which ``t1_relative`` equals 1.
    """

    slope: float
    renormalized_slope: float
    suppression: float
    flux: np.ndarray
    t1_relative: np.ndarray
    reference_flux: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "slope": self.slope,
            "renormalized_slope": self.renormalized_slope,
            "suppression": self.suppression,
            "flux": self.flux.tolist(),
            "t1_relative": [
                float(value) if np.isfinite(value) else None
                for value in self.t1_relative
            ],
            "reference_flux": self.reference_flux,
        }


def as_array(values: Sequence[float] | np.ndarray) -> np.ndarray:
    """Converts a grid to a float array, checking it is finite."""
    arr = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError("grid values must be finite")
    return arr
