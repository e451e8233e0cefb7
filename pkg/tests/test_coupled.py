#!/usr/bin/python3 python

"""Tests of the coupled fluxonium-resonator model, dressed sweeps and catalogs."""

from __future__ import annotations

import numpy as np
import pytest

from fluxsim.classes import (
    BasisConfig,
    CoupledModel,
    LabelError,
    TransitionCatalog,
    parse_dressed_label,
)
from fluxsim.coupled import (
    CATALOG_COLUMNS,
    branch_label,
    build_coupled,
    catalog_rows,
    diagonalize_coupled,
    dressed_sweep,
    follow_states,
    transition_catalog,
)
from fluxsim.fluxonium import diagonalize, matrix_element, tunnel_splitting

from .utils import DEVICE_G, DEVICE_NU_R, DEVICE_PARAMS, small_model


def test_coupled_hamiltonian_is_hermitian():
    model = small_model()
    spec = diagonalize(model.fluxonium)
    ham = build_coupled(model, spec)
    assert ham.shape == (model.dim, model.dim) == (12, 12)
    np.testing.assert_allclose(ham, ham.conj().T, atol=1e-12)


def test_truncation_mismatch():
    model = CoupledModel(DEVICE_PARAMS, nu_r=DEVICE_NU_R, g=DEVICE_G, n_flux_levels=9)
    spec = diagonalize(DEVICE_PARAMS, BasisConfig(num_levels=6))
    with pytest.raises(ValueError):
        build_coupled(model, spec)


@pytest.mark.parametrize(
    "kwargs",
    [{"nu_r": 0.0}, {"g": -0.1}, {"n_flux_levels": 2}, {"n_photons": 1}],
)
def test_invalid_model(kwargs: dict):
    params = {"fluxonium": DEVICE_PARAMS, "nu_r": DEVICE_NU_R, "g": DEVICE_G, **kwargs}
    with pytest.raises(ValueError):
        CoupledModel(**params)


def test_decoupled_energies_are_sums():
    model = small_model(flux=0.2, g=0.0)
    dressed = diagonalize_coupled(model)
    bare = dressed.fluxonium.energies[: model.n_flux_levels]
    sums = np.sort(
        (bare[:, None] + DEVICE_NU_R * np.arange(model.n_photons)[None, :]).ravel()
    )
    np.testing.assert_allclose(dressed.energies, sums, atol=1e-9)


def test_vacuum_rabi_gap():
    # Resonator tuned on the plasmon, weak coupling
    spec = diagonalize(DEVICE_PARAMS.at_flux(0.02))
    e0 = spec.index_of(0, 1)
    plasmon = spec.energies[e0] - spec.energies[0]
    model = CoupledModel(DEVICE_PARAMS.at_flux(0.02), nu_r=plasmon, g=0.01)
    dressed = diagonalize_coupled(model, spec)
    weights = (
        np.abs(dressed.eigenvectors[e0 * model.n_photons]) ** 2
        + np.abs(dressed.eigenvectors[1]) ** 2
    )
    pair = np.argsort(weights)[-2:]
    gap = abs(dressed.energies[pair[1]] - dressed.energies[pair[0]])
    expected = 2 * model.g * abs(matrix_element(spec, "charge", e0, 0))
    assert gap == pytest.approx(expected, rel=0.05)


def test_dressed_resonator_shift(device_model: CoupledModel):
    dressed = diagonalize_coupled(device_model)
    resonator = dressed.energies[dressed.find("g0,1")] - dressed.energies[0]
    shift = resonator - DEVICE_NU_R
    # The plasmon sits above the resonator and repels it downward
    assert shift < 0
    assert abs(shift) == pytest.approx(0.033, rel=0.15)


def test_plasmon_resonator_separation(device_model: CoupledModel):
    dressed = diagonalize_coupled(device_model)
    separation = (
        dressed.energies[dressed.find("e0,0")] - dressed.energies[dressed.find("g0,1")]
    )
    assert separation == pytest.approx(0.155, rel=0.15)


def test_flux_reversal_symmetry(device_model: CoupledModel):
    forward = diagonalize_coupled(device_model.at_flux(0.13))
    backward = diagonalize_coupled(device_model.at_flux(-0.13))
    np.testing.assert_allclose(forward.energies, backward.energies, atol=1e-9)


def test_truncation_stability(device_model: CoupledModel):
    reference = diagonalize_coupled(device_model.at_flux(0.1))
    larger = CoupledModel(
        DEVICE_PARAMS.at_flux(0.1),
        nu_r=DEVICE_NU_R,
        g=DEVICE_G,
        n_flux_levels=14,
        n_photons=8,
    )
    enlarged = diagonalize_coupled(larger)
    np.testing.assert_allclose(enlarged.energies[:5], reference.energies[:5], atol=1e-5)
    np.testing.assert_allclose(
        enlarged.energies[:10], reference.energies[:10], atol=1e-4
    )


def test_dressed_states_provenance(device_model: CoupledModel):
    dressed = diagonalize_coupled(device_model.at_flux(0.2))
    assert np.all(np.diff(dressed.energies) >= 0)
    assert str(dressed.provenance[0]) == "g0,0"
    for label in dressed.provenance:
        assert 0.0 < label.overlap <= 1.0
    assert dressed.find((0, 0, 0)) == 0
    assert dressed.find(dressed.provenance[0]) == 0


def test_find_errors(device_model: CoupledModel):
    dressed = diagonalize_coupled(device_model.at_flux(0.2))
    with pytest.raises(LabelError):
        dressed.find("g0,99")
    with pytest.raises(LabelError):
        dressed.find("z0,0")
    with pytest.raises(LabelError):
        dressed.find("g0")


def test_parse_dressed_label():
    assert parse_dressed_label("e-1,0") == (-1, 1, 0)
    assert parse_dressed_label("g0, 1") == (0, 0, 1)


def test_dressed_sweep():
    sweep = dressed_sweep(small_model(), [0.1, 0.101, 0.102])
    assert len(sweep) == 3
    np.testing.assert_array_equal(sweep[0].branches, np.arange(len(sweep[0])))
    for dressed in sweep[1:]:
        assert sorted(dressed.branches) == list(range(len(dressed)))
        assert np.all(dressed.continuity > 0.9)
        assert dressed.ambiguous == []
    assert [dressed.flux for dressed in sweep] == [0.1, 0.101, 0.102]
    assert str(branch_label(sweep, 0)) == "g0,0"


def test_followed_levels_do_not_jump():
    flux = np.linspace(0.2, 0.21, 11)
    sweep = dressed_sweep(small_model(), flux)
    # Energies of each branch along the sweep, rows in branch order
    branch_energies = np.array(
        [dressed.energies[np.argsort(dressed.branches)] for dressed in sweep]
    )
    sorted_energies = np.array([dressed.energies for dressed in sweep])
    branch_steps = np.abs(np.diff(branch_energies, axis=0))
    local_scale = np.abs(np.diff(sorted_energies, axis=0)).max()
    assert local_scale > 0
    assert branch_steps.max() <= 5 * local_scale
    for dressed in sweep[1:]:
        assert np.all(dressed.continuity > 0.9)


def test_following_reports_ambiguity():
    # Half flux doublets overlap equally with both localized states nearby
    model = small_model(flux=0.5, n_photons=2)
    previous = diagonalize_coupled(model)
    current = diagonalize_coupled(model.at_flux(0.49))
    with pytest.warns(UserWarning, match="Ambiguous"):
        followed = follow_states(previous, current)
    assert followed.ambiguous
    assert followed.continuity.min() < 0.6
    for pair in followed.ambiguous:
        # Lowered to the overlap margin, below 1% of the best overlap
        assert followed.continuity[list(pair)].max() < 0.01


def test_two_photon_line(device_model: CoupledModel):
    catalog = transition_catalog(device_model, 0.05, "g0,0", max_photon_order=2)
    lines = [
        entry
        for entry in catalog
        if entry.order == 2 and str(entry.final) == "f0,0"
    ]
    assert lines
    assert min(abs(entry.frequency - 4.73) for entry in lines) < 0.1


def test_photon_assisted_family(device_model: CoupledModel):
    catalog = transition_catalog(device_model, 0.2, "g0,1", max_photon_order=1)
    assert str(catalog.initial) == "g0,1"
    finals = {str(entry.final) for entry in catalog}
    assert "g1,1" in finals
    for entry in catalog:
        assert entry.frequency > 0
        assert entry.weight >= 0
        assert entry.order == 1


def test_decoupled_photon_line():
    model = small_model(flux=0.2, g=0.0)
    catalog = transition_catalog(model, 0.2, "g0,0", max_photon_order=1)
    photon_lines = [entry for entry in catalog if entry.photon_weight > 1e-12]
    assert len(photon_lines) == 1
    assert photon_lines[0].frequency == pytest.approx(DEVICE_NU_R, abs=1e-9)
    assert photon_lines[0].photon_weight == pytest.approx(1.0)


def test_catalog_errors(device_model: CoupledModel):
    with pytest.raises(ValueError):
        transition_catalog(device_model, 0.2, "g0,0", max_photon_order=3)
    with pytest.raises(LabelError):
        transition_catalog(device_model, 0.2, "g2,4")


def test_catalog_rows():
    model = small_model()
    catalog = transition_catalog(model, 0.3, "g0,0")
    rows = catalog_rows(catalog)
    assert len(rows) == len(catalog) > 0
    for row in rows:
        assert list(row) == CATALOG_COLUMNS
        assert row["flux"] == 0.3
        assert row["order"] in (1, 2)
        assert row["initial_label"] == "g0,0"
    empty = TransitionCatalog(flux=0.3, initial=catalog.initial)
    assert catalog_rows(empty) == []


def test_catalog_with_precomputed_spectrum():
    model = small_model()
    dressed = diagonalize_coupled(model.at_flux(0.25))
    catalog = transition_catalog(model, 0.25, "g0,0", dressed=dressed)
    assert catalog.flux == 0.25
    assert catalog.entries == transition_catalog(model, 0.25, "g0,0").entries
    with pytest.raises(ValueError):
        transition_catalog(model, 0.3, "g0,0", dressed=dressed)
    with pytest.raises(ValueError):
        transition_catalog(small_model(g=0.05), 0.25, "g0,0", dressed=dressed)


def test_half_flux_plasmon_branches_split_by_tunneling():
    weak = CoupledModel(DEVICE_PARAMS, nu_r=DEVICE_NU_R, g=1e-3)
    catalog = transition_catalog(weak, 0.5, "g0,0", max_photon_order=1)
    frequencies = {str(entry.final): entry.frequency for entry in catalog}
    assert frequencies["e0,0"] == pytest.approx(5.0, abs=0.1)
    separation = frequencies["e1,0"] - frequencies["e0,0"]
    excited = tunnel_splitting(DEVICE_PARAMS, pair="excited")
    assert separation == pytest.approx(excited, rel=0.1)
    # The ground doublet partner sits a tunnel splitting above the initial state
    ground = tunnel_splitting(DEVICE_PARAMS, pair="ground")
    assert frequencies["g1,0"] == pytest.approx(ground, rel=0.1)
