"""Constants shared across mfcz"""

# Tolerances
FREQUENCY_DEDUP_TOLERANCE = 1e-9
SNAP_WARNING_FRACTION = 1e-9
BOX_MEMBERSHIP_TOLERANCE = 1e-9
GRAM_EIGENVALUE_FLOOR = 1e-12
CLUSTERED_PAIR_THRESHOLD = 1e-6
ORTHOGONALITY_TOLERANCE = 1e-8
RATIO_DENOMINATOR_FLOOR = 1e-12
NEGLIGIBLE_BAD_PART = 1e-6
WEIGHT_FLOOR = 1e-300

# Defaults
DEFAULT_SUMSET_CAP = 10_000_000
DEFAULT_MULTI_START_COUNT = 64
DEFAULT_POWER_METHOD_RESTARTS = 16
DEFAULT_IRLS_MAX_ITER = 200
DEFAULT_MEMBERSHIP_THRESHOLD = 1e6
DEFAULT_MIN_POINTS_PER_FREQUENCY = 16
DEFAULT_MIN_DECAY_LENGTHS = 64
DEFAULT_PARTITION_EPSILON = 0.1
DEFAULT_SEED = 0

# File names
REPORT_FILENAME = "report.json"
RC_FILENAME = ".mfcz.json5"
LOG_FILENAME = "mfcz.log"
CSV_FLOAT_FORMAT = "%.12g"
