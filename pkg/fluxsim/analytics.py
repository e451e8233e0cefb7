"""Closed-form models: Stark shifted minimum, perturbative plasmon dispersion,
two-level hybridization of the plasmon with the resonator, Raman rates and scaling
laws. Numerical fits of the same quantities are provided for cross-checks.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .classes import (
    BasisConfig,
    DispersionReport,
    FluxoniumParams,
    Hybridization,
    LabelError,
    RamanConfig,
    ScalingLaws,
    Spectrum,
    TwoLevelModel,
    as_array,
)
from .constants import T1_REFERENCE_FLUX
from .fluxonium import diagonalize, flux_sweep, matrix_element
from .utils import lowering_operator


def stark_minimum(params: FluxoniumParams) -> float:
    r"""Position of the central well minimum to lowest order in E_L / E_J,
    2 pi phi_ext (1 - E_L / E_J).

    :param params: fluxonium parameters.
    :return: the phase of the minimum, in rad.
    """
    if params.e_j <= params.e_l:
        raise ValueError("The expansion requires e_j > e_l")
    return 2 * np.pi * params.phi_ext * (1 - params.e_l / params.e_j)


def cubic_matrix_elements(phi_zpf: float) -> tuple[float, float]:
    r"""Matrix elements of phi^3 between the lowest oscillator states, with
    phi = phi_zpf (a + a^dagger).

    :param phi_zpf: zero point fluctuations of the phase in the well.
    :return: ``<e|phi^3|g>`` and ``<f|phi^3|e>``.
    """
    a = lowering_operator(6)
    cube = np.linalg.matrix_power(phi_zpf * (a + a.T), 3)
    return float(cube[1, 0]), float(cube[2, 1])


def plasmon_dispersion(
    params: FluxoniumParams,
    e_p: float,
    e_p_prime: float,
    phi_zpf: float,
    hybridization: Hybridization | None = None,
) -> DispersionReport:
    r"""Quadratic flux dispersion of the plasmon transition from second order
    perturbation theory in the central well. The symmetric term comes from the
    curvature change of the shifted well, the antisymmetric one from the cubic
    term of the expanded cosine mixing the plasmon ladder.

    Coefficients are transition frequency shifts in GHz per flux quantum squared;
    both are negative, the plasmon softening as the flux moves away from zero.

    :param params: fluxonium parameters.
    :param e_p: plasmon transition frequency, in GHz.
    :param e_p_prime: frequency of the next plasmon transition, in GHz.
    :param phi_zpf: zero point fluctuations of the phase in the well.
    :param hybridization: hybridization with the resonator, to share the total
        dispersion between the two branches. Its quartic coefficients are reported
        as fractions of the magnitude of the total. (optional)
    :return: the dispersion report.
    """
    if e_p <= 0 or e_p_prime <= 0:
        raise ValueError("e_p and e_p_prime must be strictly positive")
    element_eg, element_fe = cubic_matrix_elements(phi_zpf)
    symmetric = -((np.pi * params.e_l / params.e_j) ** 2) * e_p
    antisymmetric = -((np.pi * params.e_l / 3) ** 2) * (
        element_fe**2 / e_p_prime - 2 * element_eg**2 / e_p
    )

    fractions = {}
    if hybridization is not None:
        fractions = {
            "resonator_fraction": hybridization.resonator_quadratic_fraction,
            "qubit_fraction": hybridization.qubit_quadratic_fraction,
        }
        if hybridization.resonator_quartic is not None:
            bare = abs(symmetric + antisymmetric)
            fractions["resonator_quartic_fraction"] = (
                hybridization.resonator_quartic / bare
            )
            fractions["qubit_quartic_fraction"] = hybridization.qubit_quartic / bare
    return DispersionReport(
        phi_min_coefficient=2 * np.pi * (1 - params.e_l / params.e_j),
        symmetric=float(symmetric),
        antisymmetric=float(antisymmetric),
        total=float(symmetric + antisymmetric),
        **fractions,
    )


def numerical_plasmon_dispersion(
    params: FluxoniumParams,
    flux_max: float = 0.2,
    steps: int = 21,
    basis: BasisConfig | None = None,
) -> float:
    r"""Least-squares fit of the bare g0 -> e0 transition frequency to
    c0 + c2 phi_ext^2 over [0, flux_max].

    :param params: fluxonium parameters, ``phi_ext`` is ignored.
    :param flux_max: upper bound of the fitted flux range.
    :param steps: number of flux points.
    :param basis: basis configuration. (default: ``BasisConfig()``)
    :return: the quadratic coefficient c2, in GHz per flux quantum squared.
    """
    flux = np.linspace(0.0, flux_max, steps)
    frequencies = [
        spec.energies[spec.index_of(0, 1)] - spec.energies[spec.index_of(0, 0)]
        for spec in flux_sweep(params, flux, basis)
    ]
    design = np.stack([np.ones_like(flux), flux**2], axis=1)
    coefficients, *_ = np.linalg.lstsq(design, np.array(frequencies), rcond=None)
    return float(coefficients[1])


def fluxon_slope(
    params: FluxoniumParams,
    flux_grid: Sequence[float] | np.ndarray | None = None,
    basis: BasisConfig | None = None,
) -> float:
    r"""Linear fit of the g0 -> g1 fluxon transition frequency against flux.

    :param params: fluxonium parameters, ``phi_ext`` is ignored.
    :param flux_grid: flux points. (default: 31 points over [0.1, 0.4])
    :param basis: basis configuration. (default: ``BasisConfig()``)
    :return: the slope, in GHz per flux quantum.
    """
    flux = np.linspace(0.1, 0.4, 31) if flux_grid is None else as_array(flux_grid)
    frequencies = [
        spec.energies[spec.index_of(1, 0)] - spec.energies[spec.index_of(0, 0)]
        for spec in flux_sweep(params, flux, basis)
    ]
    return float(np.polyfit(flux, frequencies, 1)[0])


def hybridize(model: TwoLevelModel, a: float | None = None) -> Hybridization:
    r"""Diagonalizes the two-level model [[eps_r, m], [m*, eps_q]] of the resonator
    coupled to the plasmon. A branch alpha |R> + beta |Q> is resonator-like when
    ``|alpha| > |beta|``. The intensity ratio is |alpha_R / alpha_Q|^2.

    When the qubit energy disperses as eps_q(phi) = eps_q - a phi^2, the resonator
    branch inherits the fraction |beta_R|^2 of the quadratic dispersion and the
    qubit branch the rest. Quartic coefficients follow from the curvature of the
    eigenvalues with respect to eps_q.

    :param model: two-level model.
    :param a: bare quadratic dispersion of the qubit, in GHz. (optional)
    :return: the hybridization record.
    """
    matrix = np.array(
        [[model.eps_r, model.m], [np.conj(model.m), model.eps_q]], dtype=complex
    )
    eigenvalues, vectors = np.linalg.eigh(matrix)
    resonator_col = int(np.argmax(np.abs(vectors[0])))
    if abs(abs(vectors[0, 0]) - abs(vectors[0, 1])) < 1e-12:
        # Equal weights at resonance, the upper branch is taken as resonator-like
        resonator_col = 1
    qubit_col = 1 - resonator_col
    resonator = vectors[:, resonator_col]
    qubit = vectors[:, qubit_col]

    decoupled = model.m == 0
    alpha_r2, alpha_q2 = abs(resonator[0]) ** 2, abs(qubit[0]) ** 2
    ratio = np.inf if decoupled or alpha_q2 == 0 else alpha_r2 / alpha_q2

    resonator_quartic = qubit_quartic = None
    if a is not None:
        half_gap = np.sqrt(((model.eps_r - model.eps_q) / 2) ** 2 + abs(model.m) ** 2)
        curvature = 0.0 if decoupled else abs(model.m) ** 2 / (4 * half_gap**3)
        # Second derivative with respect to eps_q: positive for the upper branch
        sign = 1.0 if resonator_col == 1 else -1.0
        resonator_quartic = float(0.5 * sign * curvature * a**2)
        qubit_quartic = float(-0.5 * sign * curvature * a**2)

    return Hybridization(
        eigenvalues=(float(eigenvalues[0]), float(eigenvalues[1])),
        resonator_branch=(complex(resonator[0]), complex(resonator[1])),
        qubit_branch=(complex(qubit[0]), complex(qubit[1])),
        intensity_ratio=float(ratio),
        decoupled=bool(decoupled),
        resonator_quadratic_fraction=float(abs(resonator[1]) ** 2),
        qubit_quadratic_fraction=float(abs(qubit[1]) ** 2),
        resonator_quartic=resonator_quartic,
        qubit_quartic=qubit_quartic,
    )


def half_flux_detuning(
    detuning: float, a_resonator: float, qubit_fraction: float
) -> float:
    r"""Qubit to resonator detuning at half flux quantum. The observed qubit branch
    dispersion ``a_resonator`` is the share ``qubit_fraction`` of the bare one,
    which lowers the qubit by a_bare / 4 at half flux.

    :param detuning: eps_q - eps_r at zero flux, in GHz.
    :param a_resonator: quadratic dispersion observed on the qubit-like line, in
        GHz per flux quantum squared.
    :param qubit_fraction: share of the bare dispersion carried by that line.
    :return: the detuning at half flux, in GHz.
    """
    if not 0 < qubit_fraction <= 1:
        raise ValueError("qubit_fraction must be in (0, 1]")
    return detuning - abs(a_resonator) / qubit_fraction / 4


def raman_rate(cfg: RamanConfig) -> float:
    r"""Effective Rabi rate of the two-photon pump / one-photon probe Raman process,
    omega_probe omega_pump^2 / (delta delta_2gamma).

    :param cfg: Raman drive configuration.
    :return: the rate, in GHz.
    """
    return cfg.omega_probe * cfg.omega_pump**2 / (cfg.delta * cfg.delta_2gamma)


def pi_time(rate: float) -> float:
    r"""Duration of a pi pulse at the Rabi frequency ``rate``, 1 / (2 |rate|).

    :param rate: Rabi frequency, in GHz.
    :return: the duration, in ns.
    """
    if rate == 0:
        raise ValueError("A zero rate has no pi time")
    return 1 / (2 * abs(rate))


def raman_config_from_spectrum(
    spec: Spectrum, nu_pump: float, omega_probe: float, omega_pump: float
) -> RamanConfig:
    r"""Raman configuration for a pump at ``nu_pump``, the detunings being read from
    the central well levels of a fluxonium spectrum: delta = 2 nu_pump - E_f0 and
    delta_2gamma = E_e0 - nu_pump, energies from g0.

    :param spec: fluxonium spectrum.
    :param nu_pump: pump frequency, in GHz.
    :param omega_probe: probe Rabi rate, in GHz.
    :param omega_pump: pump Rabi rate, in GHz.
    :return: the Raman configuration.
    """
    ground = spec.energies[spec.index_of(0, 0)]
    e_e0 = spec.energies[spec.index_of(0, 1)] - ground
    e_f0 = spec.energies[spec.index_of(0, 2)] - ground
    return RamanConfig(
        omega_probe=omega_probe,
        omega_pump=omega_pump,
        delta=float(2 * nu_pump - e_f0),
        delta_2gamma=float(e_e0 - nu_pump),
    )


def fluxon_charge_element(spec: Spectrum) -> float:
    """Magnitude of the g0 -> g1 charge matrix element."""
    return abs(matrix_element(spec, "charge", spec.index_of(1, 0), spec.index_of(0, 0)))


def _resolved_charge_element(spec: Spectrum) -> float:
    # NaN where g0 or g1 is not among the computed states
    try:
        return fluxon_charge_element(spec)
    except LabelError:
        return np.nan


def scaling_laws(
    params: FluxoniumParams,
    flux_grid: Sequence[float] | np.ndarray | None = None,
    basis: BasisConfig | None = None,
    reference_flux: float = T1_REFERENCE_FLUX,
) -> ScalingLaws:
    r"""Fluxon line slope, tunneling suppression factor and fluxon lifetime trend.
    The lifetime scales as the inverse square of the g0 -> g1 charge element and is
    given relative to its value at ``reference_flux``. Flux points where g0 or g1
    cannot be identified are reported as NaN.

    :param params: fluxonium parameters, ``phi_ext`` is ignored.
    :param flux_grid: flux points of the lifetime trend.
        (default: 9 points over [0.05, 0.45])
    :param basis: basis configuration. (default: ``BasisConfig()``)
    :param reference_flux: flux where the relative lifetime is 1. (default: 0.078)
    :return: the scaling laws.
    """
    flux = np.linspace(0.05, 0.45, 9) if flux_grid is None else as_array(flux_grid)
    reference_spec = diagonalize(params.at_flux(reference_flux), basis)
    reference = fluxon_charge_element(reference_spec)
    elements = np.array(
        [_resolved_charge_element(spec) for spec in flux_sweep(params, flux, basis)]
    )
    slope = 4 * np.pi**2 * params.e_l
    return ScalingLaws(
        slope=float(slope),
        renormalized_slope=float(slope * params.e_j / (params.e_j + params.e_l)),
        suppression=float(np.exp(-(np.pi**2) * np.sqrt(params.e_j / (8 * params.e_c)))),
        flux=flux,
        t1_relative=(reference / elements) ** 2,
        reference_flux=float(reference_flux),
    )
