"""
Configuration constants for the OAS Sparrow solver
"""

# Application metadata
APP_NAME = "oas-sparrow"
APP_DESCRIPTION = "Memetic solver and benchmark harness for order acceptance and scheduling"
APP_VERSION = "1.0.0"

# Numeric tolerances
EPS = 1e-9  # comparisons on float times and fitness
GENE_EPSILON = 1e-9  # good-pair pinning and gene nudging

# Sparrow defaults (moderate parameter set)
DEFAULT_POPULATION_SIZE = 20
DEFAULT_MAX_ITERATIONS = 50000
DEFAULT_NO_IMPROVE_FACTOR = 10  # times n
ELITE_FRACTION = 0.5
MUTANT_FRACTION = 0.1
RHO_ELITE = 0.7
GOOD_PAIR_THRESHOLD = 2.0
GOOD_PAIR_PROBABILITY = 0.95
REMOVAL_FRACTION = 0.4
REACTION_FACTOR = 0.5
COOLING_COEFFICIENT = 0.9975
SIGMA_NEW_BEST = 30
SIGMA_IMPROVED = 20
SIGMA_ACCEPTED = 10
ALNS_FITNESS_FRACTION = 0.9
INITIAL_TEMPERATURE = 100.0
INITIAL_OPERATOR_WEIGHT = 1.0
MIN_OPERATOR_WEIGHT = 1e-3
SA_SCALE = 100.0

# Simple/complex decoder mix is clamped so both decoders stay reachable
DECODE_RATIO_MIN = 0.05
DECODE_RATIO_MAX = 0.95

# Parameter sets: population, no-improve factor (x n), max iterations, ALNS on
PARAMETER_SETS = {
    1: {"population_size": 1, "no_improve_factor": 200, "max_iterations": 1000000, "alns_enabled": True},
    2: {"population_size": 10, "no_improve_factor": 20, "max_iterations": 100000, "alns_enabled": True},
    3: {"population_size": 20, "no_improve_factor": 10, "max_iterations": 50000, "alns_enabled": True},
    4: {"population_size": 50, "no_improve_factor": 4, "max_iterations": 20000, "alns_enabled": True},
    5: {"population_size": 1000, "no_improve_factor": 1, "max_iterations": 2000, "alns_enabled": False},
}
DEFAULT_PARAMETER_SET = 3

# ALNS operators
REMOVAL_OPERATORS = ("random", "min_revenue", "min_unit_revenue", "max_setup_time", "sequence")
INSERTION_OPERATORS = ("max_revenue", "max_unit_revenue")

# Termination reasons
TERMINATION_MAX_ITERATIONS = "max-iter"
TERMINATION_NO_IMPROVE = "no-improve"
TERMINATION_FULL_REVENUE = "all-scheduled-full-revenue"

# Instance generation
PROCESSING_RANGE = (1, 20)
REVENUE_RANGE = (1, 20)
SETUP_RANGE = (1, 10)
GAMMA_RANGE = (1, 20)
INSTANCES_PER_CELL = 10
CESARET_FACTORS = (0.1, 0.3, 0.5, 0.7, 0.9)
CESARET_SIZES = (10, 15, 20, 25, 50, 100)
SATELLITE_SIZES = (100, 150, 200, 250, 300)
COMMERCE_Q_VALUES = (0.0, 0.2, 0.4, 0.6, 0.8, 1.0)
REPAIRMAN_C_VALUES = (1.0, 1.2, 1.4, 1.6, 1.8, 2.0)
REALISTIC_FAMILY_N = 100
REALISTIC_FAMILY_FACTOR = 0.1
FAMILIES = ("cesaret", "satellite", "commerce", "repairman")

# Oracle
ORACLE_N_LIMIT = 9

# Files
INSTANCE_EXTENSION = ".oas"
ENV_PREFIX = "OAS_"
RUNS_CSV = "runs.csv"
GAPS_CSV = "gaps.csv"
GAP_SUMMARY_CSV = "gap_summary.csv"
TIMINGS_CSV = "timings.csv"
TRENDS_CSV = "trends.csv"
PROPERTIES_CSV = "properties.csv"
PROPERTY_CORRELATIONS_CSV = "property_correlations.csv"
MANIFEST_JSON = "manifest.json"
SUMMARY_MD = "summary.md"

# Gap references for benchmark grids
REFERENCE_ORACLE = "oracle"
REFERENCE_BEST_KNOWN = "best-known"
REFERENCE_BEST_OF_CONFIGS = "best-of-configs"
REFERENCE_NONE = "none"
