"""Global numerical tolerances.

These are module-level so callers can read them; change them only in tests
or experiments that deliberately probe tolerance sensitivity.
"""

# Points closer than this to a hull edge are dropped as collinear.
COLLINEAR_TOL = 1e-9
# Pivot magnitude below which a square system is declared singular.
PIVOT_TOL = 1e-12
# Feasibility slack for "point satisfies constraint".
FEAS_TOL = 1e-8
# Two vertices closer than this are the same geometric point.
DEDUP_TOL = 1e-7
# Unit-norm / orthogonality checks.
UNIT_TOL = 1e-12
# Minimum angle (radians) between two vectors spanning a plane.
SPAN_ANGLE_TOL = 1e-9
# Default step budget for shadow walks when no explicit budget is given.
DEFAULT_MAX_STEPS = 100_000
