#!/usr/bin/python3 python

"""Tests of the reduction of the four-node circuit and of the derived energies."""

from __future__ import annotations

import numpy as np
import pytest

from fluxsim.circuit import (
    capacitance_matrix,
    chain_inductive_energy,
    charging_energy,
    derive_energies,
    reduce_circuit,
    resonator_inductive_energy,
    validate_chain,
)
from fluxsim.classes import (
    ChainRecord,
    DegenerateCircuitError,
    FourNodeCircuit,
    ThreeNodeCircuit,
)

from .utils import SEED

ENERGIES = {"e_lr": 20.0, "e_l_chain": 0.24, "e_j": 8.11}


def make_circuit(c_r=400.0, c_c=2.0, c_1=10.0, c_2=12.0, chain=None):
    return FourNodeCircuit(c_r=c_r, c_c=c_c, c_1=c_1, c_2=c_2, chain=chain, **ENERGIES)


def test_vanishing_qubit_capacitance():
    reduced = reduce_circuit(make_circuit(c_2=0.0))
    assert reduced.c_c_eff == 0.0
    assert reduced.c_q_eff == 0.0


def test_balanced_island_halves_coupling():
    # c_2 = c_1 + c_c
    reduced = reduce_circuit(make_circuit(c_c=2.0, c_1=10.0, c_2=12.0))
    assert reduced.c_c_eff == pytest.approx(1.0, rel=1e-12)


def test_large_qubit_capacitance_limit():
    reduced = reduce_circuit(make_circuit(c_c=2.0, c_2=1e6))
    assert reduced.c_c_eff == pytest.approx(2.0, rel=1e-4)


def test_degenerate_circuit():
    with pytest.raises(DegenerateCircuitError):
        reduce_circuit(make_circuit(c_c=0.0, c_1=0.0, c_2=0.0))


def test_negative_capacitance_rejected():
    with pytest.raises(ValueError, match="c_1"):
        make_circuit(c_1=-1.0)


def test_energies_pass_through():
    reduced = reduce_circuit(make_circuit())
    assert (reduced.e_lr, reduced.e_l_chain, reduced.e_j) == (20.0, 0.24, 8.11)


def test_schur_complement_equivalence():
    rng = np.random.default_rng(SEED)
    for _ in range(50):
        c_r, c_c, c_1, c_2 = rng.uniform(0.1, 100.0, size=4)
        circuit = make_circuit(c_r=c_r, c_c=c_c, c_1=c_1, c_2=c_2)
        matrix = capacitance_matrix(circuit)
        keep = [0, 2]
        coupling = np.outer(matrix[keep, 1], matrix[1, keep]) / matrix[1, 1]
        schur = matrix[np.ix_(keep, keep)] - coupling
        reduced = reduce_circuit(circuit)
        # Effective capacitance matrix of the (R, Q) nodes
        effective = np.array(
            [
                [reduced.c_r_eff, -reduced.c_c_eff],
                [-reduced.c_c_eff, reduced.c_q_eff],
            ]
        )
        np.testing.assert_allclose(effective, schur, rtol=1e-12)


def test_coupling_bounds_and_monotonicity():
    rng = np.random.default_rng(SEED)
    for _ in range(50):
        c_r, c_c, c_1 = rng.uniform(0.0, 50.0, size=3)
        c_2_values = np.sort(rng.uniform(0.0, 200.0, size=10))
        previous = -np.inf
        for c_2 in c_2_values:
            if c_1 + c_2 + c_c == 0:
                continue
            reduced = reduce_circuit(make_circuit(c_r=c_r, c_c=c_c, c_1=c_1, c_2=c_2))
            assert 0.0 <= reduced.c_c_eff <= c_c * (1 + 1e-12)
            assert reduced.c_c_eff >= previous - 1e-12
            previous = reduced.c_c_eff


def test_charging_energy():
    assert charging_energy(43.0) == pytest.approx(0.4505, rel=1e-3)
    assert charging_energy(86.0) == pytest.approx(charging_energy(43.0) / 2, rel=1e-15)


def test_derive_energies():
    reduced = reduce_circuit(make_circuit())
    energies = derive_energies(reduced)
    assert energies.e_c == pytest.approx(charging_energy(reduced.c_q_eff), rel=1e-12)
    assert energies.e_l == 0.24
    assert energies.e_j == 8.11


def test_resonator_frequency_round_trip():
    c_r_eff = 400.0
    e_lr = resonator_inductive_energy(4.95, c_r_eff)
    reduced = ThreeNodeCircuit(
        c_r_eff=c_r_eff, c_q_eff=43.0, c_c_eff=1.0, e_lr=e_lr, e_l_chain=0.24, e_j=8.11
    )
    assert derive_energies(reduced).nu_r == pytest.approx(4.95, abs=1e-9)


def test_derive_energies_rejects_empty_qubit():
    reduced = reduce_circuit(make_circuit(c_2=0.0))
    with pytest.raises(ValueError, match="c_q_eff"):
        derive_energies(reduced)


def test_chain_inductive_energy():
    # 100 junctions of 6.81 nH give E_L close to 0.24 GHz
    assert chain_inductive_energy(100, 6.81) == pytest.approx(0.24, rel=1e-2)
    assert chain_inductive_energy(200, 6.81) == pytest.approx(
        chain_inductive_energy(100, 6.81) / 2, rel=1e-15
    )


@pytest.mark.parametrize(
    ("n_junctions", "c_g_single", "expected"),
    [
        (100, 0.0, []),
        (1, 0.0, ["chain inductance ratio"]),
        (100, 0.43, ["stray capacitance"]),
    ],
)
def test_validate_chain(n_junctions: int, c_g_single: float, expected: list[str]):
    circuit = make_circuit(
        c_c=2.0,
        c_1=41.0,
        c_2=45.0,
        chain=ChainRecord(n_junctions, l_j_single=6.81, c_g_single=c_g_single),
    )
    report = validate_chain(circuit)
    assert report.applicable
    assert len(report.advisories) == len(expected)
    for advisory, start in zip(report.advisories, expected):
        assert advisory.startswith(start)


def test_validate_chain_total_stray_equal_to_qubit_capacitance():
    circuit = make_circuit(c_c=2.0, c_1=41.0, c_2=45.0)
    c_q_eff = reduce_circuit(circuit).c_q_eff
    circuit = make_circuit(
        c_c=2.0, c_1=41.0, c_2=45.0, chain=ChainRecord(100, 6.81, c_q_eff / 100)
    )
    report = validate_chain(circuit)
    assert report.stray_fraction == pytest.approx(1.0)
    assert any("stray capacitance" in advisory for advisory in report.advisories)


def test_validate_chain_not_applicable():
    report = validate_chain(make_circuit())
    assert not report.applicable
    assert report.advisories == []


def test_validate_chain_warnings():
    circuit = make_circuit(chain=ChainRecord(1, 6.81))
    with pytest.warns(UserWarning, match="chain inductance ratio"):
        validate_chain(circuit, verbose=True)
