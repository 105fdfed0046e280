"""Application settings and configuration"""
import os
from dotenv import load_dotenv

load_dotenv()

# Paths
STRAIN_DATA_DIR = os.getenv("STRAIN_DATA_DIR", "data")
STRAIN_OUTPUT_DIR = os.getenv("STRAIN_OUTPUT_DIR", "exports")

# Tracking data runs at 10 Hz; frames are never resampled.
STRAIN_FRAME_DT = float(os.getenv("STRAIN_FRAME_DT", "0.1"))

# Denominator clamp (yards) for frames where the rusher is on top of the QB.
# A modelling choice, not a published constant.
STRAIN_DISTANCE_FLOOR = float(os.getenv("STRAIN_DISTANCE_FLOOR", "0.5"))

# Curves and leaderboards
STRAIN_MAX_FRAME = int(os.getenv("STRAIN_MAX_FRAME", "40"))
STRAIN_MIN_SNAPS = int(os.getenv("STRAIN_MIN_SNAPS", "100"))
STRAIN_LEADERBOARD_TOP_K = int(os.getenv("STRAIN_LEADERBOARD_TOP_K", "15"))

# Ingest: share of malformed rows tolerated before aborting
STRAIN_ERROR_BUDGET = float(os.getenv("STRAIN_ERROR_BUDGET", "0.001"))

# Output formatting
STRAIN_SIG_DIGITS = int(os.getenv("STRAIN_SIG_DIGITS", "6"))

# Bootstrap
STRAIN_BOOTSTRAP_REPLICATES = int(os.getenv("STRAIN_BOOTSTRAP_REPLICATES", "1000"))
STRAIN_BOOTSTRAP_SEED = int(os.getenv("STRAIN_BOOTSTRAP_SEED", "42"))
STRAIN_WORKERS = int(os.getenv("STRAIN_WORKERS", "1"))
STRAIN_BOOTSTRAP_MAX_FAILURE = float(os.getenv("STRAIN_BOOTSTRAP_MAX_FAILURE", "0.05"))

# REML optimizer
REML_MAX_EVALUATIONS = int(os.getenv("REML_MAX_EVALUATIONS", "10000"))
REML_FTOL = float(os.getenv("REML_FTOL", "1e-8"))
REML_XTOL = float(os.getenv("REML_XTOL", "1e-6"))
REML_THETA_FLOOR = float(os.getenv("REML_THETA_FLOOR", "1e-10"))
REML_BOUNDARY_ZERO = float(os.getenv("REML_BOUNDARY_ZERO", "1e-8"))

# Environment
LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO")

__all__ = [
    "STRAIN_DATA_DIR",
    "STRAIN_OUTPUT_DIR",
    "STRAIN_FRAME_DT",
    "STRAIN_DISTANCE_FLOOR",
    "STRAIN_MAX_FRAME",
    "STRAIN_MIN_SNAPS",
    "STRAIN_LEADERBOARD_TOP_K",
    "STRAIN_ERROR_BUDGET",
    "STRAIN_SIG_DIGITS",
    "STRAIN_BOOTSTRAP_REPLICATES",
    "STRAIN_BOOTSTRAP_SEED",
    "STRAIN_WORKERS",
    "STRAIN_BOOTSTRAP_MAX_FAILURE",
    "REML_MAX_EVALUATIONS",
    "REML_FTOL",
    "REML_XTOL",
    "REML_THETA_FLOOR",
    "REML_BOUNDARY_ZERO",
    "LOG_LEVEL",
]
