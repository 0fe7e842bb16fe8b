#
# I M P U L S I V E N O I S E
#
# Constants, configuration keywords and the YAML configuration mapping.
#
#
import os
import logging
from collections.abc import MutableMapping
from enum import Enum

import ruamel
from ruamel.yaml import YAML

# ##############################################################
# A few constants and default values
# Adjust with care...
#
# ROOT_DEBUG = "impulsivenoise.field,impulsivenoise.fit"
IMPULSIVENOISE_HOME = os.path.abspath(os.path.dirname(__file__))

ROOT_DEBUG = ""

# Files
RESOURCES_FOLDER = "resources"
REFERENCE_CONFIG_FILE = "paper_vi.cfg"  # YAML despite the extension
TRACE_FILE = "trace.csv"
SIDECAR_EXT = ".meta"  # flat key = value lines
STATS_FILE = "stats.yaml"
PDF_FILE = "pdf.csv"
CCDF_FILE = "ccdf.csv"
PSD_WELCH_FILE = "psd_welch.csv"
PSD_BURG_FILE = "psd_burg.csv"
PSD_CARSON_FILE = "psd_carson.csv"
FIT_FILE = "fit.yaml"

TRACE_HEADER = ["index", "value"]
PSD_HEADER = ["frequency", "power"]
DC_MASS_COMMENT = "# dc_impulse_mass = "
FLOAT_FORMAT = ".17g"  # enough digits to re-read the exact double

# Numerical tolerances
REPEATED_ROOT_TOL = 1e-9  # relative distance between roots
NEGATIVE_DISCRIMINANT_TOL = 1e-12
ENVELOPE_DECAY_RATIO = 1e-3  # ϑ at impulse end relative to its peak
KL_FLOOR = 1e-12
QUAD_ABS_TOL = 1e-8
PDF_CLAMP_TOL = 1e-8
CLASS_A_WEIGHT_TOL = 1e-6
CLASS_A_MIN_TRUNCATION = 10

# Simulation
ARRIVAL_BLOCK = 65536  # samples per arrival and background stream block
UNIT_LENGTH = 2**20  # samples per unit of time when a field does not set one
SHAPE_IMPULSES = 256  # raw impulses averaged for the amplitude moments of the closed-form view
SHAPE_SEED = 0


class STREAM(Enum):
    # Random stream identifiers, mixed with the master seed
    ARRIVALS = 1
    IMPULSE = 2
    BACKGROUND = 3
    ENSEMBLE = 4
    SHAPE = 5


# Estimation
KOUTROUVELIS_ALPHA_GRID = 10  # ξ_k = π k / 25, k = 1..10
KOUTROUVELIS_ALPHA_STEP = 25
KOUTROUVELIS_BETA_GRID = 10  # ξ_l = π l / 50, l = 1..10
KOUTROUVELIS_BETA_STEP = 50
KOUTROUVELIS_MAX_ITER = 10
KOUTROUVELIS_TOL = 1e-4
STABLE_MIN_SAMPLES = 100
CLASS_A_MIN_SAMPLES = 10_000
CLASS_A_A_BOUNDS = (1e-3, 20.0)
CLASS_A_GAMMA_BOUNDS = (1e-6, 1e3)
CLASS_A_ML_SAMPLES = 100_000  # evenly strided subsample for the likelihood search
CLASS_A_GAUSSIAN_GAMMA = 1e3  # Γ′ of the Gaussian limit used as fallback
FIT_MIN_SAMPLES = 100_000
PDF_MIN_SAMPLES = 1_000
PDF_MIN_BINS = 16
PDF_RANGE_QUANTILE = 1e-3  # density grid covers [q, 1-q]
TAIL_START_QUANTILE = 0.5
TAIL_POINTS = 200


# ##############################################################
# Configuration keywords
#
class CONFIG_KW(Enum):
    FIELD = "field"
    IMPULSE = "impulse"
    SHOT = "shot"
    ANALYSIS = "analysis"
    OUTPUT = "output"
    SEED = "seed"
    METADATA = "metadata"


class FIELD_KW(Enum):
    LAMBDA_R = "lambda-r"
    LAMBDA_T = "lambda-t"
    MEAN_ENERGY = "mean-energy"
    GAMMA_RATIO = "gamma-ratio"
    TRACE_LENGTH = "trace-length"
    UNIT_LENGTH = "unit-length"
    SAMPLE_RATE = "sample-rate"


class IMPULSE_KW(Enum):
    PHI1 = "phi1"
    PHI2 = "phi2"
    THETA0 = "theta0"
    MU_T = "mu-t"
    SIGMA_T = "sigma-t"
    LENGTH = "length"


class SHOT_KW(Enum):
    LAMBDA = "lambda"
    FALL_A = "fall-a"
    RISE_B = "rise-b"
    K_MOMENTS = "k-moments"
    SIGMA_N_SQ = "sigma-n-sq"


class ANALYSIS_KW(Enum):
    BINS = "bins"
    SEGMENT = "segment"
    OVERLAP = "overlap"
    ORDER = "order"
    METHOD = "method"
    FIT_STABLE = "fit-stable"
    FIT_CLASS_A = "fit-class-a"
    TAIL_POINTS = "tail-points"


class OUTPUT_KW(Enum):
    DIRECTORY = "directory"


class METADATA_KW(Enum):
    NAME = "name"
    VERSION = "version"
    SAMPLES = "sample-count"
    TRACE = "trace-file"


class AR_METHOD(Enum):
    BURG = "burg"
    YULE_WALKER = "yule-walker"


# System default values
DEFAULT_VALUES = {
    CONFIG_KW.SEED.value: 0,
    FIELD_KW.SAMPLE_RATE.value: 1.0,
    IMPULSE_KW.THETA0.value: 1.0,
    ANALYSIS_KW.BINS.value: 200,
    ANALYSIS_KW.SEGMENT.value: 4096,
    ANALYSIS_KW.OVERLAP.value: 0.5,
    ANALYSIS_KW.ORDER.value: 2,
    ANALYSIS_KW.METHOD.value: AR_METHOD.BURG.value,
    ANALYSIS_KW.FIT_STABLE.value: True,
    ANALYSIS_KW.FIT_CLASS_A.value: True,
    ANALYSIS_KW.TAIL_POINTS.value: TAIL_POINTS,
    OUTPUT_KW.DIRECTORY.value: "output",
}

# ##############################################################
# YAML
#
ruamel.yaml.representer.RoundTripRepresenter.ignore_aliases = lambda x, y: True
yaml = YAML(typ="rt")  # round trip keeps line numbers for error messages
yaml.default_flow_style = False

CONFIG_FILENAME = "__filename__"

init_logger = logging.getLogger("impulsivenoise.config")


class Config(MutableMapping):
    """
    A dictionary that loads from a yaml config file.
    """

    def __init__(self, filename: str):
        self.store = dict()
        self.filename = None
        self._lines = dict()
        if os.path.exists(filename):
            filename = os.path.abspath(filename)
            with open(filename, "r") as fp:
                store = self.load(fp)
            self.store = store if store is not None else dict()
            self.filename = filename
            init_logger.info(f"loaded config from {filename}")
        else:
            init_logger.debug(f"no file {filename}")

    def load(self, fp):
        return yaml.load(fp)

    def __getitem__(self, key):
        return self.store[self._keytransform(key)]

    def __setitem__(self, key, value):
        self.store[self._keytransform(key)] = value

    def __delitem__(self, key):
        del self.store[self._keytransform(key)]

    def __iter__(self):
        return iter(self.store)

    def __len__(self):
        return len(self.store)

    def _keytransform(self, key) -> str:
        """Allows to alter key to internal hidden name"""
        return key.value if isinstance(key, Enum) else key

    def is_valid(self) -> bool:
        return self.filename is not None and isinstance(self.store, dict)

    def line_of(self, section: str | None, key: str | None = None) -> int | None:
        """Returns the 1-based line of a key (or of a section) in the loaded file, if known."""
        node = self.store
        if section is not None and key is not None:
            node = self.store.get(section)
            if not hasattr(node, "lc"):
                return self.line_of(section)
        else:
            key = section
        if key is None or not hasattr(node, "lc"):
            return None
        try:
            return node.lc.key(key)[0] + 1
        except (KeyError, TypeError, AttributeError):
            return None


# ##############################################################
# Flat key = value documents
#
# section.key = value, one per line, # starts a comment.
# Values are integers, reals, true/false, null, [a, b, ...] lists or bare strings.
#
def flat_value(value) -> str:
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(float(value))
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(flat_value(v) for v in value) + "]"
    return str(value)


def parse_flat_value(text: str):
    text = text.strip()
    if text.startswith("[") and text.endswith("]"):
        inner = text[1:-1].strip()
        return [parse_flat_value(v) for v in inner.split(",")] if inner else []
    if text in ("true", "false"):
        return text == "true"
    if text == "null":
        return None
    for kind in (int, float):
        try:
            return kind(text)
        except ValueError:
            pass
    return text


def flatten(data: dict, prefix: str = "") -> dict:
    flat = {}
    for k, v in data.items():
        name = f"{prefix}{k}"
        if isinstance(v, dict):
            flat.update(flatten(v, name + "."))
        else:
            flat[name] = v
    return flat


class FlatConfig(Config):
    """
    A Config read from flat key = value lines, nested on the first dot of each key.
    """

    def load(self, fp):
        store = dict()
        for number, line in enumerate(fp, start=1):
            line = line.strip()
            if line == "" or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"line {number}: expected key = value, got {line!r}")
            name, text = (s.strip() for s in line.split("=", 1))
            section, _, key = name.partition(".")
            value = parse_flat_value(text)
            if key == "":
                store[section] = value
                self._lines[(section, None)] = number
            else:
                store.setdefault(section, dict())[key] = value
                self._lines.setdefault((section, None), number)
                self._lines[(section, key)] = number
        return store

    def line_of(self, section: str | None, key: str | None = None) -> int | None:
        return self._lines.get((section, key))
