#!/usr/bin/python3 python

"""Test methods."""

from __future__ import annotations

from math import factorial

import numpy as np
import pytest
from scipy.special import eval_hermite

from fluxsim.classes import FluxoniumParams
from fluxsim.constants import BOLTZMANN_GHZ_PER_K
from fluxsim.utils import (
    finite_difference_charge_element,
    finite_difference_spectrum,
    hermite_functions,
    lowering_operator,
    thermal_occupation,
)

# Inductive oscillator: frequency sqrt(8 E_C E_L) = 2 GHz,
# length (8 E_C / E_L)^(1/4) = 2
HARMONIC = FluxoniumParams(e_c=1.0, e_j=1e-9, e_l=0.5)


def test_lowering_operator():
    a = lowering_operator(6)
    np.testing.assert_allclose(np.diag(a.T @ a), np.arange(6))
    commutator = a @ a.T - a.T @ a
    np.testing.assert_allclose(np.diag(commutator)[:-1], np.ones(5))


def test_hermite_functions_closed_form():
    x = np.linspace(-4.0, 4.0, 33)
    functions = hermite_functions(6, x)
    for k in range(6):
        norm = 1 / np.sqrt(2**k * factorial(k) * np.sqrt(np.pi))
        expected = norm * eval_hermite(k, x) * np.exp(-(x**2) / 2)
        np.testing.assert_allclose(functions[k], expected, atol=1e-12)


def test_hermite_functions_orthonormal():
    x = np.linspace(-20.0, 20.0, 8001)
    functions = hermite_functions(60, x)
    overlaps = functions @ functions.T * (x[1] - x[0])
    np.testing.assert_allclose(overlaps, np.eye(60), atol=1e-8)


def test_hermite_functions_high_order():
    functions = hermite_functions(400, np.linspace(-40.0, 40.0, 101))
    assert np.all(np.isfinite(functions))


def test_thermal_occupation():
    assert thermal_occupation(4.95, 0.0) == 0.0
    expected = 1 / np.expm1(4.95 / (BOLTZMANN_GHZ_PER_K * 0.03))
    assert thermal_occupation(4.95, 0.03) == pytest.approx(expected, rel=1e-12)
    assert thermal_occupation(-4.95, 0.03) == thermal_occupation(4.95, 0.03)
    # Classical limit
    assert thermal_occupation(0.01, 1.0) == pytest.approx(
        BOLTZMANN_GHZ_PER_K / 0.01, rel=1e-2
    )
    occupations = thermal_occupation(np.array([0.1, 1.0, 10.0]), 0.05)
    assert np.all(np.diff(occupations) < 0)


def test_finite_difference_harmonic_limit():
    energies, phi, vectors = finite_difference_spectrum(HARMONIC, num_levels=4)
    np.testing.assert_allclose(energies, 2.0 * (np.arange(4) + 0.5), atol=1e-5)
    step = phi[1] - phi[0]
    np.testing.assert_allclose((vectors**2).sum(axis=0) * step, np.ones(4), atol=1e-9)


def test_finite_difference_charge_element():
    _, phi, vectors = finite_difference_spectrum(HARMONIC, num_levels=3)
    element = finite_difference_charge_element(phi, vectors[:, 0], vectors[:, 1])
    assert abs(element) == pytest.approx(1 / (2 * np.sqrt(2)), rel=1e-3)
    forbidden = finite_difference_charge_element(phi, vectors[:, 0], vectors[:, 2])
    assert abs(forbidden) < 1e-6
