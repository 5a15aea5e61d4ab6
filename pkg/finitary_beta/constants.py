from enum import Enum

# Enumerations whose predicted size exceeds this are refused before any work starts.
DEFAULT_CARDINALITY_CAP = 10**7

# Balls up to this size are memoised; larger ones are rebuilt on each call.
BALL_CACHE_LIMIT = 10**5

# Index of the distinguished generator "a" defining W_a.
DEFAULT_GENERATOR = 1

DEFAULT_SEED = 0

# Seeds per Monte Carlo work unit. Chunking depends on this only, never on worker count.
DEFAULT_CHUNK_SIZE = 4096

# On Z the closed ball B(r) has 2r+1 elements. The alternative reading 2r-1 is not used.
ZERO_RANK_BALL_CONVENTION = "2r+1"

PROB_SUM_TOLERANCE = 1e-12

ROOT_FINDER = {
    "TOLERANCE": 1e-12,
    "MAX_ITERATIONS": 500,
    "CLUSTER_GAP": 1e-4,
    "CLUSTER_TOLERANCE": 1e-6,
    "IMAG_TOLERANCE": 1e-8,
    "SUM_TOLERANCE": 1e-8,
}

FINITE_DIFFERENCE_STEP = 1e-5

# Letters used by the shorthand word syntax ("ab", "A" = a^-1).
SHORTHAND_LETTERS = "abcd"

EXIT_CODES = {
    "OK": 0,
    "VALIDATION": 2,
    "RESOURCE_CAP": 2,
    "NUMERIC": 3,
}


class OutputFormat(Enum):
    JSON = "json"
    CSV = "csv"


class CodeKind(Enum):
    FIXED = "fixed"
    ADAPTIVE = "adaptive"


class BetaReading(Enum):
    # exponent s = 1 - t over the forward window, target beta(t)
    LIMIT = "limit"
    # exponent s = -t over the backward window, target beta(1 + t)
    LEMMA = "lemma"


CSV_SCHEMAS = {
    "version": "v1",
    "beta_sweep": ["t", "closed", "limit_n", "mc", "stderr"],
    "code_stats": ["n", "tail_n"],
    "ball": ["index", "word", "length"],
    "restricted_beta": ["n", "value", "log_gap"],
}

error_messages = {
    "error_validation": "Invalid input",
    "error_word_syntax": "Malformed group element",
    "error_generator_range": "Generator index outside 1..rank",
    "error_symbol_range": "Symbol outside the alphabet",
    "error_prob_vector": "Probability vector must have strictly positive entries",
    "error_pattern": "Malformed pattern",
    "error_permutation": "Not a permutation",
    "error_code_table": "Code table has no entry for this window",
    "error_code_spec": "Malformed code description",
    "error_not_in_lpa": "Automorphism moves a coordinate of W_a off the a-line",
    "error_precondition": "Precondition violated",
    "error_horizon": "Restriction radius too large for this n",
    "error_cardinality_cap": "Enumeration exceeds the cardinality cap",
    "error_power_sums": "Inconsistent power sums",
    "error_root_finder": "Root finder did not converge",
    "error_numeric": "Numeric failure",
}

# Largest window space m^|B(r)| searched when certifying a minimal code radius.
MINIMAL_RADIUS_CAP = 1 << 16
