"""Default tolerances, grids and constants.

Every numeric default used by the library and the command line lives here so
that flags, configs and tests agree on a single source.
"""
import math
import os

# algebra
HERMITIAN_RTOL = 1e-10
PROJECTION_TOL = 1e-9

# rearrangement
MERGE_RTOL = 1e-9
SUBMAJ_RTOL = 1e-9

# symmetric spaces
ORLICZ_RTOL = 1e-12
ORLICZ_MAXITER = 200
INVERSE_ITERS = 64

# cuculescu
CUCULESCU_INCLUDE_RTOL = 1e-9
CUCULESCU_CERT_RTOL = 1e-8
NESTED_TOL = 1e-8

# jones / K-functionals
EPSILON = 0.01
CERT_RTOL = 1e-8
LAMBDA_GRID_POINTS = 17
LAMBDA_GRID_SPAN = 16.0
TGRID_POINTS = 33
TGRID_DECADES = 3.0
QUAD_RTOL = 1e-3
QUAD_MAX_POINTS = 2 ** 12
TAIL_RTOL = 0.01

# verify
TREND_ALPHA = 0.05
RATIO_TOL = 1e-9
TREND_DIMS = (4, 8, 16, 32)


def jones_constant(eps=EPSILON):
    """Constant of the two-step decomposition, sqrt(10)+4+2sqrt(2)+sqrt(2)eps."""
    return math.sqrt(10) + 4 + 2 * math.sqrt(2) + math.sqrt(2) * eps


Y_CONSTANT = math.sqrt(10) + 4


def threads():
    """Worker cap from NCMART_THREADS (default 1)."""
    raw = os.environ.get("NCMART_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        return 1
    return max(1, n)
