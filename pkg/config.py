"""Configuration constants for the tripdiff toolkit."""

import os
from dotenv import load_dotenv

load_dotenv()

# Enumeration guard for the comparison decomposition (tuples, not terms)
TUPLE_CAP = int(float(os.getenv("TRIPDIFF_TUPLE_CAP", "1e8")))

DEFAULT_THREADS = int(os.getenv("TRIPDIFF_THREADS", "1"))
LOG_LEVEL = os.getenv("TRIPDIFF_LOG_LEVEL", "WARNING")

# Fixed-effects solver
FE_TOLERANCE = 1e-10
FE_MAX_SWEEPS = 10_000

# Numerical gates
DEGENERATE_TOL = 1e-10
RECONSTRUCTION_TOL = 1e-8
IDENTIFICATION_TOL = 1e-6

# Bootstrap
DEFAULT_DRAWS = 100
DEFAULT_SEED = 0
CI_Z = 1.96

# Simulation defaults
DEFAULT_VIOLATION_MAGNITUDE = 0.5
DEFAULT_FIRST_ADOPTION = 2

# Output file names
RUN_MANIFEST_FILE = "run.json"
ESTIMATE_FILE = "estimate.json"
DECOMPOSITION_FILE = "decomposition.json"
TERMS_FILE = "terms.csv"
EVENT_STUDY_FILE = "event_study.csv"
EVENT_STUDY_PLOT_FILE = "event_study.svg"
PANEL_FILE = "panel.csv"
TRUTH_FILE = "truth.csv"
DGP_FILE = "dgp.json"
EFFECTS_FILE = "group_time_effects.csv"
ESTIMATE_TABLE_FILE = "estimate_table.csv"
ADOPTION_PLOT_FILE = "adoption.svg"

# Process exit codes
EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_INPUT = 2
EXIT_DEGENERATE = 3
EXIT_RESOURCE = 4
