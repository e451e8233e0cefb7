"""Reduction of the four-node circuit to the effective three-node circuit, and energy
scales of the resulting fluxonium and resonator.
"""

from __future__ import annotations

import warnings

import numpy as np

from .classes import (
    ChainReport,
    CircuitEnergies,
    DegenerateCircuitError,
    FourNodeCircuit,
    ThreeNodeCircuit,
)
from .constants import (
    CHAIN_INDUCTANCE_RATIO_MIN,
    CHAIN_STRAY_FRACTION_MAX,
    CHARGING_ENERGY_GHZ_FF,
    INDUCTIVE_ENERGY_GHZ_NH,
)


def charging_energy(capacitance: float) -> float:
    r"""Charging energy e^2 / 2C of a capacitance.

    :param capacitance: capacitance in fF.
    :return: the charging energy in GHz.
    """
    return CHARGING_ENERGY_GHZ_FF / capacitance


def chain_inductive_energy(n_junctions: int, l_j_single: float) -> float:
    r"""Inductive energy of an array of ``n_junctions`` junctions in series.

    :param n_junctions: number of junctions.
    :param l_j_single: inductance of a single junction, in nH.
    :return: E_L in GHz.
    """
    return INDUCTIVE_ENERGY_GHZ_NH / (n_junctions * l_j_single)


def capacitance_matrix(circuit: FourNodeCircuit) -> np.ndarray:
    r"""Maxwell capacitance matrix of the circuit, node order (R, 1, Q), in fF.

    :param circuit: four-node circuit.
    :return: the 3x3 symmetric capacitance matrix.
    """
    c_r, c_c, c_1, c_2 = circuit.c_r, circuit.c_c, circuit.c_1, circuit.c_2
    return np.array(
        [
            [c_r + c_c, -c_c, 0.0],
            [-c_c, c_c + c_1 + c_2, -c_2],
            [0.0, -c_2, c_2],
        ]
    )


def reduce_circuit(circuit: FourNodeCircuit) -> ThreeNodeCircuit:
    r"""Eliminates the coupling island (node 1), whose conjugate charge is a constant
    of motion set to zero. The result is the Schur complement of
    :py:func:`capacitance_matrix` on the (R, Q) block.

    :param circuit: four-node circuit.
    :return: the effective three-node circuit.
    """
    c_t = circuit.c_1 + circuit.c_2 + circuit.c_c
    if c_t <= 0:
        raise DegenerateCircuitError(
            "The total capacitance C_1 + C_2 + C_C of the coupling island is zero"
        )
    return ThreeNodeCircuit(
        c_r_eff=circuit.c_r + circuit.c_c * (circuit.c_1 + circuit.c_2) / c_t,
        c_q_eff=circuit.c_2 * (circuit.c_1 + circuit.c_c) / c_t,
        c_c_eff=circuit.c_2 * circuit.c_c / c_t,
        e_lr=circuit.e_lr,
        e_l_chain=circuit.e_l_chain,
        e_j=circuit.e_j,
    )


def derive_energies(reduced: ThreeNodeCircuit) -> CircuitEnergies:
    r"""Charging energy of the qubit branch and LC frequency of the resonator branch.

    :param reduced: effective circuit.
    :return: E_C, E_L, E_J and the bare resonator frequency, in GHz.
    """
    reduced.validate()
    e_cr = charging_energy(reduced.c_r_eff)
    return CircuitEnergies(
        e_c=charging_energy(reduced.c_q_eff),
        e_l=reduced.e_l_chain,
        e_j=reduced.e_j,
        nu_r=float(np.sqrt(8 * e_cr * reduced.e_lr)),
    )


def resonator_inductive_energy(nu_r: float, c_r_eff: float) -> float:
    r"""Inverse of the LC frequency formula used by :py:func:`derive_energies`.

    :param nu_r: resonator frequency, in GHz.
    :param c_r_eff: effective resonator capacitance, in fF.
    :return: E_LR in GHz.
    """
    return nu_r**2 / (8 * charging_energy(c_r_eff))


def validate_chain(
    circuit: FourNodeCircuit,
    ratio_min: float = CHAIN_INDUCTANCE_RATIO_MIN,
    stray_fraction_max: float = CHAIN_STRAY_FRACTION_MAX,
    verbose: bool = False,
) -> ChainReport:
    r"""Checks that the junction array behaves as a superinductance. Findings are
    advisories only: nothing is rejected.

    :param circuit: four-node circuit, with its ``chain`` record.
    :param ratio_min: minimum ratio of the total array inductance over the
        inductance of one junction. (default: 10)
    :param stray_fraction_max: maximum total ground capacitance of the array, as a
        fraction of the effective qubit capacitance. (default: 0.1)
    :param verbose: will also emit the advisories as warnings. (default: False)
    :return: the chain report.
    """
    chain = circuit.chain
    if chain is None:
        return ChainReport(applicable=False)

    advisories = []
    ratio = float(chain.n_junctions)
    if ratio < ratio_min:
        advisories.append(
            f"chain inductance ratio {ratio:g} is below {ratio_min:g}: the array "
            f"does not dominate the inductance of a single junction"
        )

    c_q_eff = reduce_circuit(circuit).c_q_eff
    stray = chain.n_junctions * chain.c_g_single
    fraction = stray / c_q_eff if c_q_eff > 0 else np.inf
    if fraction > stray_fraction_max:
        advisories.append(
            f"stray capacitance of the array is {fraction:.1%} of c_q_eff, above "
            f"{stray_fraction_max:.0%}"
        )

    if verbose:
        for advisory in advisories:
            warnings.warn(advisory, stacklevel=2)
    return ChainReport(
        applicable=True,
        advisories=advisories,
        inductance_ratio=ratio,
        stray_fraction=float(fraction),
    )
