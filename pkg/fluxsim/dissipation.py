"""Driven-dissipative dynamics of the coupled system: Lindblad channels between
dressed states, rotating frame of the drive, steady states, time evolution and
single-tone transmission maps.
"""

from __future__ import annotations

import warnings
from typing import Sequence

import numpy as np
from scipy import sparse
from scipy.linalg import expm
from scipy.sparse.csgraph import connected_components
from scipy.sparse.linalg import expm_multiply, splu
from scipy.sparse.linalg import norm as sparse_norm
from tqdm import tqdm

from .classes import (
    BasisConfig,
    CollapseOperator,
    CoupledModel,
    DegenerateSteadyStateError,
    DensityMatrix,
    DressedSpectrum,
    LindbladConfig,
    Liouvillian,
    RotatingFrame,
    TransmissionMap,
    Trajectory,
    as_array,
)
from .constants import (
    DENSE_PROPAGATOR_MAX_DIM,
    DT_SCALE_FACTOR,
    MAX_MAP_CELLS,
    RESIDUAL_TOL,
)
from .coupled import bare_operators, diagonalize_coupled, dressed_operator
from .utils import thermal_occupation

DRIVES = ("resonator", "fluxon")
# Matrix elements below this fraction of the largest one are numerical noise
ZERO_TOL = 1e-12


def _denoise(operator: np.ndarray) -> np.ndarray:
    largest = np.abs(operator).max(initial=0.0)
    return np.where(np.abs(operator) < ZERO_TOL * largest, 0.0, operator)


def collapse_operators(
    dressed: DressedSpectrum, model: CoupledModel, cfg: LindbladConfig
) -> list[CollapseOperator]:
    r"""Jump operators ``|n><m|`` between dressed eigenstates. The resonator and
    the fluxonium charge couple to baths at the same temperature:
    rate = [kappa |<n|a|m>|^2 + gamma_q |<n|N|m>|^2] x (nbar + 1) for downward
    transitions and [kappa |<n|a^dagger|m>|^2 + gamma_q |<n|N|m>|^2] x nbar for
    upward ones, nbar being the Bose occupation at the transition frequency. A
    white flux-noise channel dephasing the fluxoid number is added when
    ``gamma_phi > 0``.

    :param dressed: dressed spectrum.
    :param model: coupled model of the dressed spectrum.
    :param cfg: Lindblad configuration.
    :return: the collapse operators with a non-zero rate.
    """
    bare = bare_operators(model, dressed.fluxonium)
    lowering = _denoise(dressed_operator(dressed, bare["a"]))
    charge = _denoise(dressed_operator(dressed, bare["charge"]))
    charge_part = cfg.gamma_q * np.abs(charge) ** 2
    emission = cfg.kappa * np.abs(lowering) ** 2 + charge_part
    # <n|a^dagger|m> = conj(<m|a|n>)
    absorption = cfg.kappa * np.abs(lowering.T) ** 2 + charge_part

    # omega[n, m] = E_m - E_n, positive when m -> n releases energy to the bath
    energies = dressed.energies
    omega = energies[None, :] - energies[:, None]
    occupation = thermal_occupation(np.where(omega == 0, 1.0, omega), cfg.temperature)
    rates = np.where(omega > 0, emission * (occupation + 1), absorption * occupation)
    # Degenerate pairs exchange no energy with the bath
    rates[omega == 0] = 0.0
    np.fill_diagonal(rates, 0.0)

    finals, initials = np.nonzero(rates)
    operators = [
        CollapseOperator(rate=float(rates[n, m]), final=int(n), initial=int(m))
        for n, m in zip(finals, initials)
    ]
    if cfg.gamma_phi > 0:
        fluxoids = np.array([label.state.well for label in dressed.provenance], float)
        operators.append(CollapseOperator(rate=cfg.gamma_phi, diagonal=fluxoids))
    return operators


def frame_numbers(dressed: DressedSpectrum, drive: str = "resonator") -> np.ndarray:
    r"""Integer excitation number of each dressed state in the frame of the drive.
    For a resonator drive it is the number of resonator quanta closest to the
    excitation energy of the state, for a fluxon drive the fluxoid number.

    :param dressed: dressed spectrum.
    :param drive: ``"resonator"`` or ``"fluxon"``.
    :return: the frame numbers.
    """
    if drive not in DRIVES:
        raise ValueError(f"drive must be one of {DRIVES}, got {drive}")
    if drive == "fluxon":
        return np.array([label.state.well for label in dressed.provenance])
    excitation = dressed.energies - dressed.energies[0]
    return np.rint(excitation / dressed.model.nu_r).astype(int)


def rotating_frame(
    model: CoupledModel,
    dressed: DressedSpectrum,
    omega_d: float,
    zeta: float = 0.0,
    drive: str = "resonator",
) -> RotatingFrame:
    r"""Static Hamiltonian in the frame rotating at the drive frequency, within the
    rotating wave approximation: H_eff = H_dressed - omega_d K + zeta (A + A^dagger),
    ``K`` being the frame number and ``A`` the part of the driven operator lowering
    ``K`` by one. The resonator drive acts through ``a``, the fluxon drive through
    the fluxonium charge. Energies are measured from the dressed ground state.

    :param model: coupled model of the dressed spectrum.
    :param dressed: dressed spectrum.
    :param omega_d: drive frequency, in GHz.
    :param zeta: drive amplitude, in GHz. (default: 0)
    :param drive: ``"resonator"`` or ``"fluxon"``. (default: ``"resonator"``)
    :return: the rotating frame Hamiltonian.
    """
    numbers = frame_numbers(dressed, drive)
    bare = bare_operators(model, dressed.fluxonium)
    driven = dressed_operator(dressed, bare["a" if drive == "resonator" else "charge"])

    co_rotating = (numbers[:, None] - numbers[None, :]) == -1
    lowering = np.where(co_rotating, driven, 0.0)
    lowering = _denoise(lowering)

    h_eff = np.diag(dressed.energies - dressed.energies[0] - omega_d * numbers)
    h_eff = h_eff + zeta * (lowering + lowering.conj().T)
    return RotatingFrame(
        h_eff=h_eff.astype(complex),
        frame_numbers=numbers,
        omega_d=float(omega_d),
        drive=drive,
        lowering=lowering,
    )


def build_liouvillian(
    frame: RotatingFrame, operators: Sequence[CollapseOperator]
) -> Liouvillian:
    r"""Assembles the sparse Lindblad superoperator
    L(rho) = -i [H, rho] + sum_k rate_k (L_k rho L_k^dagger - {L_k^dagger L_k, rho} / 2)
    acting on row-major vectorized density matrices.

    :param frame: rotating frame Hamiltonian.
    :param operators: collapse operators.
    :return: the Liouvillian.
    """
    ham = sparse.csr_matrix(frame.h_eff)
    dim = ham.shape[0]
    eye = sparse.identity(dim, format="csr")
    generator = -1j * (sparse.kron(ham, eye) - sparse.kron(eye, ham.T))

    decay = np.zeros((dim, dim))
    out_rates = np.zeros(dim)
    transfer_rows, transfer_cols, transfer_rates = [], [], []
    for op in operators:
        if op.diagonal is not None:
            diff = op.diagonal[:, None] - op.diagonal[None, :]
            decay -= 0.5 * op.rate * np.abs(diff) ** 2
            continue
        out_rates[op.initial] += op.rate
        transfer_rows.append(op.final * dim + op.final)
        transfer_cols.append(op.initial * dim + op.initial)
        transfer_rates.append(op.rate)
    decay -= 0.5 * (out_rates[:, None] + out_rates[None, :])

    generator = generator + sparse.diags(decay.reshape(-1))
    generator = generator + sparse.csr_matrix(
        (transfer_rates, (transfer_rows, transfer_cols)), shape=(dim**2, dim**2)
    )

    # States connected by jumps or coherent couplings
    jumps = [(op.initial, op.final) for op in operators if op.diagonal is None]
    coherent = np.argwhere(np.abs(frame.h_eff - np.diag(np.diag(frame.h_eff))) > 0)
    edges = np.array(jumps + [tuple(e) for e in coherent], dtype=int).reshape(-1, 2)
    graph = sparse.csr_matrix(
        (np.ones(len(edges)), (edges[:, 0], edges[:, 1])), shape=(dim, dim)
    )

    scales = [np.abs(frame.h_eff).max() if dim else 0.0, out_rates.max(initial=0.0)]
    scales.append(np.abs(decay).max(initial=0.0))
    return Liouvillian(
        superoperator=generator.tocsr(),
        dim=dim,
        max_scale=float(max(scales)),
        graph=graph,
    )


def closed_classes(liouvillian: Liouvillian) -> int:
    r"""Number of closed classes of the graph of dressed states, i.e. strongly
    connected components that nothing leaves. Each one carries its own stationary
    state, so this is the dimension of the Liouvillian kernel in absence of
    decoherence-free subspaces.

    :param liouvillian: Liouvillian.
    :return: the number of closed classes.
    """
    graph = liouvillian.graph
    if graph is None:
        return 1
    n_comp, components = connected_components(graph, directed=True, connection="strong")
    leaking = np.zeros(n_comp, dtype=bool)
    rows, cols = graph.nonzero()
    for src, dst in zip(components[rows], components[cols]):
        if src != dst:
            leaking[src] = True
    return int(np.count_nonzero(~leaking))


def steady_state(liouvillian: Liouvillian) -> DensityMatrix:
    r"""Solves L(rho) = 0 with tr(rho) = 1, imposed by replacing the equation of
    ``rho[0, 0]`` with the trace condition.

    :param liouvillian: Liouvillian with a unique stationary state.
    :return: the steady state.
    """
    kernel_dim = closed_classes(liouvillian)
    if kernel_dim > 1:
        raise DegenerateSteadyStateError(kernel_dim)

    dim = liouvillian.dim
    superop = liouvillian.superoperator
    keep = np.ones(dim**2)
    keep[0] = 0.0
    trace_row = sparse.csr_matrix(
        (np.ones(dim), (np.zeros(dim, dtype=int), np.arange(dim) * (dim + 1))),
        shape=(dim**2, dim**2),
    )
    system = (sparse.diags(keep) @ superop + trace_row).tocsc()
    rhs = np.zeros(dim**2, dtype=complex)
    rhs[0] = 1.0
    try:
        solution = splu(system).solve(rhs)
    except RuntimeError as err:
        # Singular factorization: the kernel is degenerate beyond the graph count
        rank = np.linalg.matrix_rank(superop.toarray())
        raise DegenerateSteadyStateError(dim**2 - rank) from err

    rho = solution.reshape(dim, dim)
    rho = (rho + rho.conj().T) / 2
    rho /= np.trace(rho)
    state = DensityMatrix(rho)

    residual = steady_state_residual(liouvillian, state)
    if residual > RESIDUAL_TOL:
        warnings.warn(
            f"Steady state residual {residual:.2e} above {RESIDUAL_TOL:.0e}",
            stacklevel=2,
        )
    for issue in state.violations():
        warnings.warn(
            f"Steady state is not a valid density matrix: {issue}", stacklevel=2
        )
    return state


def steady_state_residual(liouvillian: Liouvillian, state: DensityMatrix) -> float:
    r"""Relative residual ||L(rho)|| / (||L|| ||rho||), with Frobenius norms.

    :param liouvillian: Liouvillian.
    :param state: candidate stationary state.
    :return: the relative residual.
    """
    norm = sparse_norm(liouvillian.superoperator) * np.linalg.norm(state.matrix)
    if norm == 0:
        return 0.0
    return float(np.linalg.norm(liouvillian(state.matrix)) / norm)


def time_evolve(
    liouvillian: Liouvillian,
    rho0: DensityMatrix | np.ndarray,
    duration: float,
    dt: float,
    num_samples: int = 101,
) -> Trajectory:
    r"""Integrates d rho / dt = 2 pi L(rho), time in ns and L in GHz. The propagator
    over ``dt`` is exponentiated exactly, and powers of it advance the state
    between samples, which makes durations far above the slowest rate affordable.
    Systems larger than a few tens of states use sparse Krylov exponentiation.

    :param liouvillian: Liouvillian.
    :param rho0: initial state.
    :param duration: total evolution time, in ns.
    :param dt: time step, must resolve the fastest scale of the Liouvillian.
    :param num_samples: number of states returned, including both ends.
    :return: the trajectory.
    """
    if dt <= 0 or duration < 0:
        raise ValueError("dt must be strictly positive and duration positive")
    if dt * liouvillian.max_scale > DT_SCALE_FACTOR:
        raise ValueError(
            f"dt = {dt:g} ns does not resolve the fastest scale of the Liouvillian, "
            f"it must be at most {DT_SCALE_FACTOR / liouvillian.max_scale:.3e} ns"
        )
    if num_samples < 2:
        raise ValueError("num_samples must be at least 2")

    rho0 = rho0.matrix if isinstance(rho0, DensityMatrix) else np.asarray(rho0)
    dim = liouvillian.dim
    vec = rho0.astype(complex).reshape(-1)
    total_steps = int(np.ceil(duration / dt))
    sample_steps = np.rint(np.linspace(0, total_steps, num_samples)).astype(np.int64)
    generator = 2 * np.pi * liouvillian.superoperator

    if dim <= DENSE_PROPAGATOR_MAX_DIM:
        propagator = expm(generator.toarray() * dt)
        powers = {}
        states = [vec]
        for increment in np.diff(sample_steps):
            if increment not in powers:
                powers[increment] = np.linalg.matrix_power(propagator, int(increment))
            states.append(powers[increment] @ states[-1])
    else:
        states = list(
            expm_multiply(
                generator.tocsc(),
                vec,
                start=0.0,
                stop=total_steps * dt,
                num=num_samples,
                endpoint=True,
            )
        )
    return Trajectory(
        times=sample_steps * dt,
        states=[DensityMatrix(state.reshape(dim, dim)) for state in states],
    )


def liouvillian_apply(
    liouvillian: Liouvillian, rho: DensityMatrix | np.ndarray
) -> np.ndarray:
    """Applies the Liouvillian to a density matrix, returning L(rho) as a matrix."""
    return liouvillian(rho.matrix if isinstance(rho, DensityMatrix) else rho)


def photon_expectation(state: DensityMatrix, dressed: DressedSpectrum) -> complex:
    r"""Expectation value of the resonator lowering operator, tr(a rho), for a state
    expressed in the dressed basis in the laboratory frame.

    :param state: density matrix in the dressed basis.
    :param dressed: dressed spectrum defining the basis.
    :return: the complex expectation value.
    """
    bare = bare_operators(dressed.model, dressed.fluxonium)
    return state.expectation(dressed_operator(dressed, bare["a"]))


def photon_amplitude(frame: RotatingFrame, state: DensityMatrix) -> complex:
    r"""Component of the driven operator oscillating at the drive frequency,
    tr(A rho) in the rotating frame. For a resonator drive this is the field
    radiated at the drive frequency.

    :param frame: rotating frame the state was computed in.
    :param state: density matrix.
    :return: the complex amplitude.
    """
    return state.expectation(frame.lowering)


def driven_steady_state(
    dressed: DressedSpectrum,
    cfg: LindbladConfig,
    operators: Sequence[CollapseOperator] | None = None,
    drive: str = "resonator",
) -> tuple[DensityMatrix, RotatingFrame]:
    r"""Steady state of the system driven at ``cfg.omega_d`` with amplitude
    ``cfg.zeta``.

    :param dressed: dressed spectrum.
    :param cfg: Lindblad configuration.
    :param operators: precomputed collapse operators of ``dressed``.
    :param drive: ``"resonator"`` or ``"fluxon"``.
    :return: the steady state and the frame it is expressed in.
    """
    if operators is None:
        operators = collapse_operators(dressed, dressed.model, cfg)
    frame = rotating_frame(dressed.model, dressed, cfg.omega_d, cfg.zeta, drive)
    return steady_state(build_liouvillian(frame, operators)), frame


def bare_resonator_amplitude(cfg: LindbladConfig) -> float:
    r"""Steady state field of an empty resonator driven on resonance, 2 zeta / kappa.

    :param cfg: Lindblad configuration.
    :return: the amplitude.
    """
    if cfg.kappa <= 0 or cfg.zeta <= 0:
        raise ValueError("kappa and zeta must be strictly positive to normalize maps")
    return 2 * cfg.zeta / cfg.kappa


def map_row(
    model: CoupledModel,
    cfg: LindbladConfig,
    flux: float,
    freq_grid: Sequence[float] | np.ndarray,
    basis: BasisConfig | None = None,
) -> tuple[np.ndarray, list[tuple[int, str]]]:
    r"""Normalized transmission at one flux over a drive frequency grid. The dressed
    spectrum and collapse operators are shared by all the cells of the row.

    :param model: coupled model, its flux is ignored.
    :param cfg: Lindblad configuration, ``omega_d`` is ignored.
    :param flux: external flux, in flux quanta.
    :param freq_grid: drive frequencies, in GHz.
    :param basis: fluxonium basis configuration. (default: ``BasisConfig()``)
    :return: the amplitudes (NaN for failed cells) and the failed cell indexes with
        the reason of the failure.
    """
    freq_grid = as_array(freq_grid)
    norm = bare_resonator_amplitude(cfg)
    amplitudes = np.full(len(freq_grid), np.nan)
    failures = []
    try:
        dressed = diagonalize_coupled(model.at_flux(flux), basis=basis)
        operators = collapse_operators(dressed, dressed.model, cfg)
    except Exception as err:  # noqa: BLE001
        return amplitudes, [(j, repr(err)) for j in range(len(freq_grid))]

    for j, omega_d in enumerate(freq_grid):
        try:
            state, frame = driven_steady_state(
                dressed, cfg.with_drive(omega_d), operators
            )
            amplitudes[j] = abs(photon_amplitude(frame, state)) / norm
        except Exception as err:  # noqa: BLE001
            failures.append((j, repr(err)))
    return amplitudes, failures


def single_tone_map(
    model: CoupledModel,
    cfg: LindbladConfig,
    flux_grid: Sequence[float] | np.ndarray,
    freq_grid: Sequence[float] | np.ndarray,
    max_cells: int = MAX_MAP_CELLS,
    verbose: bool = False,
    basis: BasisConfig | None = None,
) -> TransmissionMap:
    r"""Steady-state single-tone transmission over a flux x frequency grid,
    normalized by the bare resonator driven on resonance. Cells are independent:
    a failing cell is left as NaN and recorded, the rest of the map is computed.

    :param model: coupled model, its flux is ignored.
    :param cfg: Lindblad configuration, ``omega_d`` is ignored.
    :param flux_grid: external flux values, in flux quanta.
    :param freq_grid: drive frequencies, in GHz.
    :param max_cells: largest number of cells allowed. (default: 100000)
    :param verbose: shows a progress bar. (default: False)
    :param basis: fluxonium basis configuration. (default: ``BasisConfig()``)
    :return: the transmission map.
    """
    flux_grid, freq_grid = as_array(flux_grid), as_array(freq_grid)
    if len(flux_grid) * len(freq_grid) > max_cells:
        raise ValueError(
            f"The map has {len(flux_grid) * len(freq_grid)} cells, above the budget "
            f"of {max_cells}"
        )
    bare_resonator_amplitude(cfg)
    amplitudes = np.full((len(flux_grid), len(freq_grid)), np.nan)
    failed = []
    for i, flux in enumerate(
        tqdm(flux_grid, desc="Single tone map", disable=not verbose)
    ):
        amplitudes[i], failures = map_row(model, cfg, flux, freq_grid, basis)
        failed.extend((i, j, reason) for j, reason in failures)
    return TransmissionMap(
        flux=flux_grid,
        frequencies=freq_grid,
        amplitudes=amplitudes,
        failed_cells=failed,
    )
