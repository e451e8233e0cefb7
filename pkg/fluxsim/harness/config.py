"""Run configuration of the command line harness."""

from __future__ import annotations

import hashlib
import json
from copy import deepcopy
from importlib.resources import files
from pathlib import Path
from typing import Any, Callable

import numpy as np

from fluxsim.circuit import derive_energies, reduce_circuit
from fluxsim.classes import (
    BasisConfig,
    ChainRecord,
    ConfigError,
    CoupledModel,
    FluxoniumParams,
    FourNodeCircuit,
    LabelError,
    LindbladConfig,
    RamanConfig,
    TwoLevelModel,
    parse_dressed_label,
)
from fluxsim.constants import (
    CURRENT_FLUXSIM_VERSION,
    DEFAULT_OUTPUT_DIR,
    GAMMA_PHI,
    GAMMA_Q,
    KAPPA,
    N_BASIS,
    N_FLUX_LEVELS,
    N_PHOTONS,
    NUM_LEVELS,
    OUTPUT_FORMATS,
    TEMPERATURE,
    ZETA,
    ZPF_SCALES,
)

SHIPPED_CONFIGS = {
    "paper-device": "paper_device.json",
    "heavy-fluxonium": "paper_device.json",
}
IGNORED_CONFIG_KEYS = ["fluxsim_version"]
# Sections left out of the cache key
NON_PHYSICS_SECTIONS = ["output"]


# Validators, returning the normalized value or raising ValueError


def _finite(value: Any) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValueError(f"expected a number, got {value!r}")
    if not np.isfinite(value):
        raise ValueError(f"expected a finite number, got {value!r}")
    return float(value)


def _non_negative(value: Any) -> float:
    value = _finite(value)
    if value < 0:
        raise ValueError(f"must be positive, got {value}")
    return value


def _positive(value: Any) -> float:
    value = _finite(value)
    if value <= 0:
        raise ValueError(f"must be strictly positive, got {value}")
    return value


def _count(value: Any) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValueError(f"expected an integer, got {value!r}")
    if value < 1:
        raise ValueError(f"must be at least 1, got {value}")
    return value


def _zpf_scale(value: Any) -> str:
    if value not in ZPF_SCALES:
        raise ValueError(f"must be one of {ZPF_SCALES}, got {value!r}")
    return value


def _label(value: Any) -> str:
    if not isinstance(value, str):
        raise ValueError(f"expected a label string such as 'g0,0', got {value!r}")
    try:
        parse_dressed_label(value)
    except LabelError as err:
        raise ValueError(err.args[0]) from err
    return value


def _photon_order(value: Any) -> int:
    if value not in (1, 2):
        raise ValueError(f"must be 1 or 2, got {value!r}")
    return value


def _complex_pair(value: Any) -> list[float]:
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise ValueError(f"expected [real, imag], got {value!r}")
    return [_finite(value[0]), _finite(value[1])]


def _formats(value: Any) -> list[str]:
    if isinstance(value, str) or not isinstance(value, (list, tuple)) or not value:
        raise ValueError(f"expected a non-empty list of formats, got {value!r}")
    unknown = [fmt for fmt in value if fmt not in OUTPUT_FORMATS]
    if unknown:
        raise ValueError(
            f"unknown formats {unknown}, expected a subset of {OUTPUT_FORMATS}"
        )
    return list(value)


def _directory(value: Any) -> str:
    if not isinstance(value, str) or not value:
        raise ValueError(f"expected a directory path, got {value!r}")
    return value


# Schema of each section: key -> (validator, default), None default means required
SCHEMA: dict[str, dict[str, tuple[Callable[[Any], Any], Any]]] = {
    "energies": {
        "e_c_ghz": (_positive, None),
        "e_j_ghz": (_positive, None),
        "e_l_ghz": (_positive, None),
        "nu_r_ghz": (_positive, None),
        "g_ghz": (_non_negative, None),
    },
    "circuit": {
        "c_r_ff": (_non_negative, None),
        "c_c_ff": (_non_negative, None),
        "c_1_ff": (_non_negative, None),
        "c_2_ff": (_non_negative, None),
        "e_lr_ghz": (_positive, None),
        "e_l_chain_ghz": (_positive, None),
        "e_j_ghz": (_positive, None),
        "g_ghz": (_non_negative, None),
    },
    "chain": {
        "n_junctions": (_count, None),
        "l_j_single_nh": (_positive, None),
        "c_g_single_ff": (_non_negative, 0.0),
    },
    "basis": {
        "n_basis": (_count, N_BASIS),
        "zpf_scale": (_zpf_scale, "inductive"),
        "num_levels": (_count, NUM_LEVELS),
    },
    "coupling": {
        "n_flux_levels": (_count, N_FLUX_LEVELS),
        "n_photons": (_count, N_PHOTONS),
    },
    "sweep": {
        "flux_min": (_finite, 0.0),
        "flux_max": (_finite, 0.5),
        "flux_steps": (_count, 51),
        "freq_min_ghz": (_positive, 4.8),
        "freq_max_ghz": (_positive, 5.2),
        "freq_steps": (_count, 101),
    },
    "lindblad": {
        "temperature_k": (_non_negative, TEMPERATURE),
        "kappa_ghz": (_non_negative, KAPPA),
        "gamma_q_ghz": (_non_negative, GAMMA_Q),
        "zeta_ghz": (_non_negative, ZETA),
        "gamma_phi_ghz": (_non_negative, GAMMA_PHI),
    },
    "catalog": {
        "initial": (_label, "g0,0"),
        "max_photon_order": (_photon_order, 2),
    },
    # Inputs of the closed-form models, measured on the reference device
    "analytics": {
        "e_p_ghz": (_positive, 5.072),
        "e_p_prime_ghz": (_positive, 4.39),
        "phi_zpf": (_positive, 0.60),
        "detuning_ghz": (_finite, 0.089),
        "m_ghz": (_complex_pair, [0.0, 0.062]),
        "a_resonator_ghz": (_non_negative, 0.084),
        "omega_probe_ghz": (_finite, 0.035),
        "omega_pump_ghz": (_finite, 0.035),
        "delta_ghz": (_finite, 0.030),
        "delta_2gamma_ghz": (_finite, 0.30),
    },
    "output": {
        "directory": (_directory, DEFAULT_OUTPUT_DIR),
        "formats": (_formats, ["csv"]),
        "parallelism": (_count, 1),
    },
}
DEFAULTED_SECTIONS = [
    "basis",
    "coupling",
    "sweep",
    "lindblad",
    "catalog",
    "analytics",
    "output",
]


def _validate_section(name: str, values: Any, path: str | None = None) -> dict:
    path = name if path is None else path
    if not isinstance(values, dict):
        raise ConfigError(path, f"expected a section, got {values!r}")
    schema = SCHEMA[name]
    unknown = [key for key in values if key not in schema and key != "chain"]
    if unknown or ("chain" in values and name != "circuit"):
        raise ConfigError(f"{path}.{(unknown or ['chain'])[0]}", "unknown key")

    section = {}
    for key, (validator, default) in schema.items():
        if key not in values:
            if default is None:
                raise ConfigError(f"{path}.{key}", "missing required key")
            section[key] = deepcopy(default)
            continue
        try:
            section[key] = validator(values[key])
        except ValueError as err:
            raise ConfigError(f"{path}.{key}", str(err)) from err
    if name == "circuit" and values.get("chain") is not None:
        section["chain"] = _validate_section("chain", values["chain"], "circuit.chain")
    return section


class RunConfig:
    r"""Configuration of a harness run. The device is given either as a physical
    ``circuit`` section or as a direct ``energies`` section, never both. Every other
    section is optional and completed with defaults. Keys carry their unit in
    their name (``_ghz``, ``_ff``, ``_nh``, ``_k``), flux is in flux quanta.

    All sections are validated when the object is created, a :class:`ConfigError`
    naming the offending key (e.g. ``sweep.flux_steps``) being raised otherwise.

    :param circuit: four-node circuit section: ``c_r_ff``, ``c_c_ff``, ``c_1_ff``,
        ``c_2_ff``, ``e_lr_ghz``, ``e_l_chain_ghz``, ``e_j_ghz``, ``g_ghz`` and an
        optional ``chain`` (``n_junctions``, ``l_j_single_nh``, ``c_g_single_ff``).
    :param energies: direct energies section: ``e_c_ghz``, ``e_j_ghz``, ``e_l_ghz``,
        ``nu_r_ghz`` and ``g_ghz``.
    :param basis: fluxonium oscillator basis: ``n_basis``, ``zpf_scale``,
        ``num_levels``.
    :param coupling: truncation of the coupled system: ``n_flux_levels``,
        ``n_photons``.
    :param sweep: grids: ``flux_min``, ``flux_max``, ``flux_steps``,
        ``freq_min_ghz``, ``freq_max_ghz``, ``freq_steps``.
    :param lindblad: baths and drive: ``temperature_k``, ``kappa_ghz``,
        ``gamma_q_ghz``, ``zeta_ghz``, ``gamma_phi_ghz``.
    :param catalog: transition catalogs: ``initial`` label, ``max_photon_order``.
    :param analytics: inputs of the closed-form models.
    :param output: ``directory``, ``formats`` (subset of ``csv`` and ``heatmap``)
        and ``parallelism`` (number of worker processes).
    """

    def __init__(
        self,
        circuit: dict[str, Any] | None = None,
        energies: dict[str, Any] | None = None,
        basis: dict[str, Any] | None = None,
        coupling: dict[str, Any] | None = None,
        sweep: dict[str, Any] | None = None,
        lindblad: dict[str, Any] | None = None,
        catalog: dict[str, Any] | None = None,
        analytics: dict[str, Any] | None = None,
        output: dict[str, Any] | None = None,
        **kwargs,
    ) -> None:
        if kwargs:
            raise ConfigError(next(iter(kwargs)), "unknown section")
        if (circuit is None) == (energies is None):
            raise ConfigError(
                "circuit" if circuit is not None else "energies",
                "exactly one of the circuit and energies sections must be given",
            )
        self.circuit = (
            None if circuit is None else _validate_section("circuit", circuit)
        )
        self.energies = (
            None if energies is None else _validate_section("energies", energies)
        )
        given = {
            "basis": basis,
            "coupling": coupling,
            "sweep": sweep,
            "lindblad": lindblad,
            "catalog": catalog,
            "analytics": analytics,
            "output": output,
        }
        for name in DEFAULTED_SECTIONS:
            setattr(self, name, _validate_section(name, given[name] or {}))

        for low, high in (("flux_min", "flux_max"), ("freq_min_ghz", "freq_max_ghz")):
            if self.sweep[high] < self.sweep[low]:
                raise ConfigError(f"sweep.{high}", f"must be at least sweep.{low}")
        # Builds the physics objects once, so that their invariants are checked now
        self._build("basis", self.basis_config)
        self._build("circuit" if self.circuit else "energies", self.coupled_model)
        self._build("lindblad", self.lindblad_config)
        self._build("analytics", self.raman_config)

    @staticmethod
    def _build(path: str, factory: Callable[[], Any]) -> Any:
        try:
            return factory()
        except ValueError as err:
            if isinstance(err, ConfigError):
                raise
            raise ConfigError(path, str(err)) from err

    def circuit_model(self) -> FourNodeCircuit | None:
        r"""Four-node circuit of the ``circuit`` section.

        :return: the circuit, ``None`` when the device is given by its energies.
        """
        if self.circuit is None:
            return None
        chain = None
        if "chain" in self.circuit:
            chain = ChainRecord(
                n_junctions=self.circuit["chain"]["n_junctions"],
                l_j_single=self.circuit["chain"]["l_j_single_nh"],
                c_g_single=self.circuit["chain"]["c_g_single_ff"],
            )
        return FourNodeCircuit(
            c_r=self.circuit["c_r_ff"],
            c_c=self.circuit["c_c_ff"],
            c_1=self.circuit["c_1_ff"],
            c_2=self.circuit["c_2_ff"],
            e_lr=self.circuit["e_lr_ghz"],
            e_l_chain=self.circuit["e_l_chain_ghz"],
            e_j=self.circuit["e_j_ghz"],
            chain=chain,
        )

    def coupled_model(self, phi_ext: float = 0.0) -> CoupledModel:
        r"""Coupled fluxonium-resonator model of the device.

        :param phi_ext: external flux, in flux quanta. (default: 0)
        :return: the coupled model.
        """
        if self.energies is not None:
            params = FluxoniumParams(
                e_c=self.energies["e_c_ghz"],
                e_j=self.energies["e_j_ghz"],
                e_l=self.energies["e_l_ghz"],
                phi_ext=phi_ext,
            )
            nu_r, g = self.energies["nu_r_ghz"], self.energies["g_ghz"]
        else:
            energies = derive_energies(reduce_circuit(self.circuit_model()))
            params = FluxoniumParams(energies.e_c, energies.e_j, energies.e_l, phi_ext)
            nu_r, g = energies.nu_r, self.circuit["g_ghz"]
        return CoupledModel(
            fluxonium=params,
            nu_r=nu_r,
            g=g,
            n_flux_levels=self.coupling["n_flux_levels"],
            n_photons=self.coupling["n_photons"],
        )

    def fluxonium_params(self, phi_ext: float = 0.0) -> FluxoniumParams:
        return self.coupled_model(phi_ext).fluxonium

    def basis_config(self) -> BasisConfig:
        return BasisConfig(**self.basis)

    def lindblad_config(self) -> LindbladConfig:
        return LindbladConfig(
            temperature=self.lindblad["temperature_k"],
            kappa=self.lindblad["kappa_ghz"],
            gamma_q=self.lindblad["gamma_q_ghz"],
            zeta=self.lindblad["zeta_ghz"],
            gamma_phi=self.lindblad["gamma_phi_ghz"],
        )

    def two_level_model(self) -> TwoLevelModel:
        """Resonator / plasmon two-level model at zero flux, the resonator at 0."""
        m_real, m_imag = self.analytics["m_ghz"]
        return TwoLevelModel(
            eps_r=0.0, eps_q=self.analytics["detuning_ghz"], m=complex(m_real, m_imag)
        )

    def raman_config(self) -> RamanConfig:
        return RamanConfig(
            omega_probe=self.analytics["omega_probe_ghz"],
            omega_pump=self.analytics["omega_pump_ghz"],
            delta=self.analytics["delta_ghz"],
            delta_2gamma=self.analytics["delta_2gamma_ghz"],
        )

    def flux_grid(self) -> np.ndarray:
        return np.linspace(
            self.sweep["flux_min"], self.sweep["flux_max"], self.sweep["flux_steps"]
        )

    def freq_grid(self) -> np.ndarray:
        return np.linspace(
            self.sweep["freq_min_ghz"],
            self.sweep["freq_max_ghz"],
            self.sweep["freq_steps"],
        )

    def config_hash(self) -> str:
        r"""Content hash of the physics-relevant sections and of the fluxsim version.
        The output section does not take part in it.

        :return: the sha256 hex digest.
        """
        payload = self.to_dict(serialize=True)
        for section in NON_PHYSICS_SECTIONS:
            payload.pop(section)
        payload["fluxsim_version"] = CURRENT_FLUXSIM_VERSION
        raw = json.dumps(payload, separators=(",", ":"), sort_keys=True)
        return hashlib.sha256(raw.encode("utf-8")).hexdigest()

    @classmethod
    def from_dict(cls, input_dict: dict[str, Any], **kwargs) -> RunConfig:
        r"""Instantiates a ``RunConfig`` from a Python dictionary of sections.

        :param input_dict: dictionary of sections, as written in a config file.
        :param kwargs: additional sections overriding those of ``input_dict``.
        :return: the configuration object.
        """
        input_dict = {
            key: value
            for key, value in deepcopy(input_dict).items()
            if key not in IGNORED_CONFIG_KEYS
        }
        input_dict.update(kwargs)
        return cls(**input_dict)

    def to_dict(self, serialize: bool = False) -> dict[str, Any]:
        r"""Serializes this instance to a Python dictionary.

        :param serialize: drops the absent device section so that the dictionary
            can be saved to a JSON file and loaded back.
        :return: dictionary of all the sections of this configuration.
        """
        dict_config = deepcopy(self.__dict__)
        if serialize:
            dict_config = {
                key: value for key, value in dict_config.items() if value is not None
            }
        return dict_config

    def save_to_json(self, out_path: str | Path) -> None:
        r"""Saves the configuration to a JSON file, stamped with the fluxsim version.

        :param out_path: path to the output configuration JSON file.
        """
        if isinstance(out_path, str):
            out_path = Path(out_path)
        out_path.parent.mkdir(parents=True, exist_ok=True)

        dict_config = self.to_dict(serialize=True)
        dict_config["fluxsim_version"] = CURRENT_FLUXSIM_VERSION
        with out_path.open("w") as outfile:
            json.dump(dict_config, outfile, indent=4)

    @classmethod
    def load_from_json(cls, config_file_path: str | Path) -> RunConfig:
        r"""Loads a configuration from a JSON file.

        :param config_file_path: path to the configuration JSON file to load.
        :return: the configuration object.
        """
        if isinstance(config_file_path, str):
            config_file_path = Path(config_file_path)
        with config_file_path.open() as param_file:
            try:
                dict_config = json.load(param_file)
            except json.JSONDecodeError as err:
                raise ConfigError("config", f"invalid JSON: {err}") from err
        if not isinstance(dict_config, dict):
            raise ConfigError("config", "the file must hold a JSON object of sections")
        return cls.from_dict(dict_config)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RunConfig):
            return False
        return self.to_dict(serialize=True) == other.to_dict(serialize=True)

    def __repr__(self) -> str:
        return f"RunConfig(device={'circuit' if self.circuit else 'energies'})"


def load_config(path: str | Path) -> RunConfig:
    r"""Loads a run configuration from a JSON file, or one of the configurations
    shipped with fluxsim by its name (``"paper-device"``, also available as
    ``"heavy-fluxonium"``).

    :param path: path to the configuration file, or name of a shipped one.
    :return: the validated configuration.
    """
    if str(path) in SHIPPED_CONFIGS:
        resource = files("fluxsim") / "configs" / SHIPPED_CONFIGS[str(path)]
        return RunConfig.from_dict(json.loads(resource.read_text()))
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"Configuration file not found: {path}")
    return RunConfig.load_from_json(path)
