#!/usr/bin/python3 python

"""Tests of the closed-form models, checked against their formulas and against the
numerical eigensolver where one exists.
"""

from __future__ import annotations

import numpy as np
import pytest
from scipy.optimize import minimize_scalar

from fluxsim.analytics import (
    cubic_matrix_elements,
    fluxon_charge_element,
    fluxon_slope,
    half_flux_detuning,
    hybridize,
    numerical_plasmon_dispersion,
    pi_time,
    plasmon_dispersion,
    raman_config_from_spectrum,
    raman_rate,
    scaling_laws,
    stark_minimum,
)
from fluxsim.classes import BasisConfig, FluxoniumParams, RamanConfig, TwoLevelModel
from fluxsim.fluxonium import diagonalize, matrix_element

from .utils import (
    A_RESONATOR,
    DETUNING,
    DEVICE_PARAMS,
    E_P,
    E_P_PRIME,
    M_ELEMENT,
    PHI_ZPF,
)

DEVICE_RAMAN = RamanConfig(
    omega_probe=0.035, omega_pump=0.035, delta=0.03, delta_2gamma=0.3
)


def test_stark_minimum():
    assert stark_minimum(DEVICE_PARAMS) == 0.0
    params = DEVICE_PARAMS.at_flux(0.1)
    assert stark_minimum(params) == pytest.approx(0.6097, abs=1e-4)

    def potential(phi: float) -> float:
        return params.e_l * phi**2 / 2 - params.e_j * np.cos(phi - 2 * np.pi * 0.1)

    numerical = minimize_scalar(potential, bounds=(-1.0, 2.0), method="bounded")
    assert stark_minimum(params) == pytest.approx(numerical.x, abs=1e-3)


def test_stark_minimum_requires_heavy_junction():
    with pytest.raises(ValueError):
        stark_minimum(FluxoniumParams(e_c=0.5, e_j=0.2, e_l=0.3, phi_ext=0.1))


def test_cubic_matrix_elements():
    element_eg, element_fe = cubic_matrix_elements(0.6)
    assert element_eg == pytest.approx(3 * 0.6**3, rel=1e-12)
    assert element_fe == pytest.approx(6 * np.sqrt(2) * 0.6**3, rel=1e-12)
    flipped = cubic_matrix_elements(-0.6)
    assert flipped == pytest.approx((-element_eg, -element_fe), rel=1e-12)


def test_plasmon_dispersion():
    report = plasmon_dispersion(DEVICE_PARAMS, E_P, E_P_PRIME, PHI_ZPF)
    assert report.symmetric < 0
    assert report.antisymmetric < 0
    assert abs(report.symmetric) == pytest.approx(0.045, abs=0.002)
    assert abs(report.antisymmetric) == pytest.approx(0.039, abs=0.002)
    assert abs(report.total) == pytest.approx(0.084, abs=0.003)
    assert report.total == report.symmetric + report.antisymmetric
    assert report.phi_min_coefficient == pytest.approx(2 * np.pi * (1 - 0.24 / 8.11))
    assert report.resonator_fraction is None


def test_plasmon_dispersion_cubic_sign_flip():
    forward = plasmon_dispersion(DEVICE_PARAMS, E_P, E_P_PRIME, PHI_ZPF)
    backward = plasmon_dispersion(DEVICE_PARAMS, E_P, E_P_PRIME, -PHI_ZPF)
    assert backward.antisymmetric == pytest.approx(forward.antisymmetric, rel=1e-12)


def test_plasmon_dispersion_vanishes_without_inductance():
    params = FluxoniumParams(e_c=0.46, e_j=8.11, e_l=1e-8)
    report = plasmon_dispersion(params, E_P, E_P_PRIME, PHI_ZPF)
    assert abs(report.symmetric) < 1e-12
    assert abs(report.antisymmetric) < 1e-12


@pytest.mark.parametrize(("e_p", "e_p_prime"), [(0.0, 4.39), (5.072, -1.0)])
def test_plasmon_dispersion_errors(e_p: float, e_p_prime: float):
    with pytest.raises(ValueError):
        plasmon_dispersion(DEVICE_PARAMS, e_p, e_p_prime, PHI_ZPF)


def test_plasmon_dispersion_shared_between_branches():
    hybridization = hybridize(TwoLevelModel(0.0, DETUNING, M_ELEMENT), a=A_RESONATOR)
    report = plasmon_dispersion(
        DEVICE_PARAMS, E_P, E_P_PRIME, PHI_ZPF, hybridization=hybridization
    )
    assert report.resonator_fraction + report.qubit_fraction == pytest.approx(1.0)
    assert report.resonator_fraction > 0
    assert report.qubit_fraction > 0
    assert report.resonator_quartic_fraction < 0
    assert report.qubit_quartic_fraction == pytest.approx(
        -report.resonator_quartic_fraction
    )


def test_numerical_plasmon_dispersion():
    report = plasmon_dispersion(DEVICE_PARAMS, E_P, E_P_PRIME, PHI_ZPF)
    numerical = numerical_plasmon_dispersion(DEVICE_PARAMS)
    assert numerical < 0
    assert numerical == pytest.approx(report.total, rel=0.15)


def test_fluxon_slope_fit():
    slope = abs(fluxon_slope(DEVICE_PARAMS, np.linspace(0.1, 0.4, 11)))
    laws = scaling_laws(DEVICE_PARAMS, [0.1, 0.2])
    assert slope == pytest.approx(laws.renormalized_slope, rel=0.01)


def test_hybridize_device_inputs():
    hyb = hybridize(TwoLevelModel(0.0, DETUNING, M_ELEMENT), a=A_RESONATOR)
    assert not hyb.decoupled
    assert sum(hyb.eigenvalues) == pytest.approx(DETUNING, abs=1e-12)
    assert abs(hyb.resonator_branch[1]) ** 2 == pytest.approx(0.21, rel=0.05)
    assert hyb.intensity_ratio == pytest.approx(3.8, rel=0.05)
    assert hyb.resonator_quadratic_fraction == pytest.approx(0.21, abs=0.01)
    assert hyb.qubit_quadratic_fraction == pytest.approx(0.79, abs=0.01)
    assert hyb.resonator_quadratic_fraction + hyb.qubit_quadratic_fraction == (
        pytest.approx(1.0)
    )
    # The resonator sits below the plasmon and is the lower branch
    assert hyb.resonator_quartic < 0
    assert hyb.qubit_quartic == -hyb.resonator_quartic
    resonator_ratio, qubit_ratio = hyb.alpha_beta_ratios
    assert abs(resonator_ratio) ** 2 == pytest.approx(0.79 / 0.21, rel=0.05)
    assert abs(qubit_ratio) ** 2 == pytest.approx(0.21 / 0.79, rel=0.05)


def test_hybridize_decoupled():
    hyb = hybridize(TwoLevelModel(0.0, DETUNING, 0.0), a=A_RESONATOR)
    assert hyb.decoupled
    assert hyb.intensity_ratio == np.inf
    assert hyb.eigenvalues == pytest.approx((0.0, DETUNING), abs=1e-15)
    assert hyb.resonator_quadratic_fraction == 0.0
    assert hyb.resonator_quartic == 0.0


def test_hybridize_on_resonance():
    hyb = hybridize(TwoLevelModel(0.05, 0.05, M_ELEMENT))
    assert hyb.eigenvalues[1] - hyb.eigenvalues[0] == pytest.approx(
        2 * abs(M_ELEMENT), rel=1e-12
    )
    assert hyb.intensity_ratio == pytest.approx(1.0, rel=1e-9)
    assert hyb.resonator_quartic is None


def test_half_flux_intensity_ratio():
    zero_flux = hybridize(TwoLevelModel(0.0, DETUNING, M_ELEMENT), a=A_RESONATOR)
    detuning = half_flux_detuning(
        DETUNING, A_RESONATOR, zero_flux.qubit_quadratic_fraction
    )
    assert detuning == pytest.approx(0.0624, abs=5e-4)
    half_flux = hybridize(TwoLevelModel(0.0, detuning, M_ELEMENT))
    assert half_flux.intensity_ratio == pytest.approx(2.6, rel=0.1)
    assert half_flux.intensity_ratio < zero_flux.intensity_ratio


@pytest.mark.parametrize("fraction", [0.0, 1.5])
def test_half_flux_detuning_errors(fraction: float):
    with pytest.raises(ValueError):
        half_flux_detuning(DETUNING, A_RESONATOR, fraction)


def test_raman_rate():
    rate = raman_rate(DEVICE_RAMAN)
    assert rate == pytest.approx(4.764e-3, rel=1e-3)
    assert pi_time(rate) == pytest.approx(104.95, rel=1e-3)


def test_raman_rate_scaling():
    rate = raman_rate(DEVICE_RAMAN)
    doubled = RamanConfig(0.07, 0.035, 0.03, 0.3)
    assert raman_rate(doubled) == pytest.approx(2 * rate, rel=1e-12)
    detuned = RamanConfig(0.035, 0.035, 0.3, 0.3)
    assert raman_rate(detuned) == pytest.approx(rate / 10, rel=1e-12)
    for signs in ((1, 1, -1, 1), (-1, 1, 1, 1), (1, -1, 1, -1), (1, 1, -1, -1)):
        values = np.array([0.035, 0.035, 0.03, 0.3]) * signs
        flipped = raman_rate(RamanConfig(*values))
        expected_sign = np.sign(values[0] * values[1] ** 2 * values[2] * values[3])
        assert np.sign(flipped) == expected_sign
        assert abs(flipped) == pytest.approx(rate, rel=1e-12)


@pytest.mark.parametrize(("delta", "delta_2gamma"), [(0.0, 0.3), (0.03, 0.0)])
def test_raman_config_errors(delta: float, delta_2gamma: float):
    with pytest.raises(ValueError):
        RamanConfig(0.035, 0.035, delta, delta_2gamma)


def test_pi_time_error():
    with pytest.raises(ValueError):
        pi_time(0.0)
    assert pi_time(-0.25) == 2.0


def test_raman_config_from_spectrum():
    spec = diagonalize(DEVICE_PARAMS.at_flux(0.078))
    ground = spec.energies[spec.index_of(0, 0)]
    e_e0 = spec.energies[spec.index_of(0, 1)] - ground
    e_f0 = spec.energies[spec.index_of(0, 2)] - ground
    nu_pump = e_f0 / 2 + 0.03
    cfg = raman_config_from_spectrum(spec, nu_pump, 0.035, 0.035)
    assert cfg.delta == pytest.approx(0.06, abs=1e-9)
    assert cfg.delta_2gamma == pytest.approx(e_e0 - nu_pump, abs=1e-12)
    assert cfg.delta_2gamma > 0


def test_fluxon_charge_element():
    spec = diagonalize(DEVICE_PARAMS.at_flux(0.2))
    expected = abs(
        matrix_element(spec, "charge", spec.index_of(0, 0), spec.index_of(1, 0))
    )
    assert fluxon_charge_element(spec) == pytest.approx(expected, rel=1e-12)
    assert 0 < fluxon_charge_element(spec) < 0.1


def test_scaling_laws():
    laws = scaling_laws(DEVICE_PARAMS)
    assert laws.slope == pytest.approx(4 * np.pi**2 * 0.24, rel=1e-12)
    assert laws.slope == pytest.approx(9.475, abs=1e-3)
    assert laws.slope == pytest.approx(9.59, rel=0.02)
    assert laws.renormalized_slope < laws.slope
    np.testing.assert_allclose(laws.flux, np.linspace(0.05, 0.45, 9))
    assert np.all(laws.t1_relative > 0)
    assert laws.t1_relative[-1] > laws.t1_relative[0]
    assert laws.reference_flux == 0.078

    serialized = laws.to_dict()
    assert list(serialized) == [
        "slope",
        "renormalized_slope",
        "suppression",
        "flux",
        "t1_relative",
        "reference_flux",
    ]
    assert len(serialized["t1_relative"]) == 9


def test_t1_relative_at_reference_flux():
    laws = scaling_laws(DEVICE_PARAMS, [0.078, 0.2])
    assert laws.t1_relative[0] == pytest.approx(1.0, rel=1e-9)


def test_unresolved_flux_points_are_nan():
    # With two levels, g1 is not computed once g-1 lies below it
    laws = scaling_laws(DEVICE_PARAMS, [-0.1, 0.1], BasisConfig(num_levels=2))
    assert np.isnan(laws.t1_relative[0])
    assert np.isfinite(laws.t1_relative[1])
    assert laws.to_dict()["t1_relative"][0] is None


def test_scaling_laws_up_to_half_flux():
    laws = scaling_laws(DEVICE_PARAMS, [0.45, 0.49, 0.5])
    assert np.all(np.isfinite(laws.t1_relative))
    assert np.all(laws.t1_relative > 0)


def test_suppression_factor():
    params = FluxoniumParams(e_c=0.45, e_j=8.1, e_l=0.24)
    laws = scaling_laws(params, [0.2])
    assert laws.suppression == pytest.approx(np.exp(-(np.pi**2) * 1.5), rel=1e-12)
    assert laws.suppression == pytest.approx(3.7e-7, rel=0.02)
