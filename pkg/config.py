"""
Configuration constants for mpstab (MPS stability and intersection toolkit)

Numerical tolerances, dense size caps and command-line defaults.
Caps can be overridden through environment variables at call time.
"""

import os

# =============================================================================
# NUMERICAL TOLERANCES
# =============================================================================

# Relative singular-value cutoff for rank decisions
DEFAULT_RANK_REL = 1e-10

# Absolute threshold for "zero" eigenvalues of normalized PSD operators
DEFAULT_EIG_ZERO = 1e-9

# =============================================================================
# DENSE SIZE CAPS
# =============================================================================

# Largest d^n for which state vectors are materialized
DENSE_CAP_DEFAULT = 65536
DENSE_CAP_ENV = "MPS_DENSE_CAP"

# Largest d^n for which d^n x d^n operators (Hamiltonians) are materialized
OPERATOR_CAP_DEFAULT = 4096
OPERATOR_CAP_ENV = "MPS_OPERATOR_CAP"


def _read_cap(env_name: str, default: int) -> int:
    value = os.environ.get(env_name)
    if not value:
        return default
    try:
        cap = int(value)
    except ValueError:
        return default
    return cap if cap > 0 else default


def get_dense_cap() -> int:
    """Current cap on d^n for state vectors (env MPS_DENSE_CAP)"""
    return _read_cap(DENSE_CAP_ENV, DENSE_CAP_DEFAULT)


def get_operator_cap() -> int:
    """Current cap on d^n for dense operators (env MPS_OPERATOR_CAP)"""
    return _read_cap(OPERATOR_CAP_ENV, OPERATOR_CAP_DEFAULT)

# =============================================================================
# COMMAND LINE DEFAULTS
# =============================================================================

DEFAULT_KMAX = 6
DEFAULT_NMAX = 8
DEFAULT_ELL = 2  # used when no stability length is found
DEFAULT_SCAN_COUNT = 100
DEFAULT_SCAN_SEED = 7
DEFAULT_GALLERY_NMAX = 7
DEFAULT_PUSH_SAMPLES = 20


def default_jmax(D: int) -> int:
    """Scan bound for stability and injectivity lengths"""
    return D * D + 1

# =============================================================================
# APPLICATION INFO
# =============================================================================

APP_NAME = "mpstab"
APP_VERSION = "1.0.0"
REPORT_VERSION = "report_v1"
