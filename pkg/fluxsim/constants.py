"""Constants and default parameters."""

from importlib.metadata import version

from scipy import constants as _sc

CURRENT_FLUXSIM_VERSION = version("fluxsim")

# Unit conversions, energies are expressed as frequencies (h = 1), in GHz
FEMTO = 1e-15
NANO = 1e-9
GIGA = 1e9
# e^2 / (2 h C), C in fF
CHARGING_ENERGY_GHZ_FF = _sc.e**2 / (2 * _sc.h * FEMTO) / GIGA
# (Phi_0 / 2pi)^2 / (h L), L in nH
INDUCTIVE_ENERGY_GHZ_NH = (_sc.hbar / (2 * _sc.e)) ** 2 / (_sc.h * NANO) / GIGA
# k_B / h, in GHz / K
BOLTZMANN_GHZ_PER_K = _sc.k / _sc.h / GIGA

# Circuit model
CHAIN_INDUCTANCE_RATIO_MIN = 10
CHAIN_STRAY_FRACTION_MAX = 0.1

# Fluxonium eigensolver
N_BASIS = 120
NUM_LEVELS = 12
CONVERGENCE_EXTRA_BASIS = 20
CONVERGENCE_TOL = 1e-6  # GHz
ZPF_SCALES = ("inductive", "plasma")
WELL_INDEXES = (-2, -1, 0, 1, 2)
MIXED_LABEL_THRESHOLD = 0.75
WELL_TIE_TOLERANCE = 1e-3
LABEL_GRID_SIZE = 2001
TUNNEL_PAIRS = ("ground", "excited")
SPLITTING_CONVENTIONS = ("gap", "coupling")

# Finite difference oracle
FD_GRID_SIZE = 4096
FD_PHI_MAX = 8  # in units of pi

# Coupled system
N_FLUX_LEVELS = 9
N_PHOTONS = 5
FOLLOWING_AMBIGUITY = 0.01
TWO_PHOTON_DETUNING_FLOOR = 1e-3  # GHz

# Dissipation, drive and steady state
TEMPERATURE = 0.03  # K
KAPPA = 0.04  # GHz
GAMMA_Q = 0.0005  # GHz
GAMMA_PHI = 0.0
ZETA = 1e-4  # GHz
POSITIVITY_TOL = 1e-8
TRACE_TOL = 1e-8
RESIDUAL_TOL = 1e-10
DT_SCALE_FACTOR = 0.1
DENSE_PROPAGATOR_MAX_DIM = 24
MAX_MAP_CELLS = 100_000

# Analytics
T1_REFERENCE_FLUX = 0.078

# Harness
CSV_FLOAT_FORMAT = "%.9g"
CACHE_DIR_ENV_VAR = "FLUXSIM_CACHE_DIR"
DEFAULT_CACHE_DIR = "~/.cache/fluxsim"
DEFAULT_OUTPUT_DIR = "fluxsim_out"
OUTPUT_FORMATS = ("csv", "heatmap")
SUBCOMMANDS = ("reduce", "spectrum", "lines", "single-tone", "analytics")
MANIFEST_FILE_NAME = "manifest.json"
EXIT_SUCCESS = 0
EXIT_CONFIG_ERROR = 2
EXIT_PARTIAL_FAILURE = 3
