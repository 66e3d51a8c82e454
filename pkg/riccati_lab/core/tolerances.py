"""Default tolerances and numerical thresholds.

Residual tolerances are relative: callers multiply them by the operator
scale of the quantity they check (documented next to each use).
"""

# numkernel
EXPM_SPECTRAL_COND_MAX = 1e4
FRACTIONAL_COND_MAX = 1e8
SPECTRAL_RECONSTRUCTION = 1e-10
LYAPUNOV_RESIDUAL = 1e-10
GRADED_LEVELS_MIN = 12
GRADED_POINTS = 8
GRADED_INNER_WIDTH = 1e-6

# models
STABILITY_RESAMPLES = 20

# semiflow
DEFAULT_PROBES = 64
FIT_MIN_NODES = 8
ZERO_KERNEL = 1e-300

# dre
DRE_BLOWUP = 1e12
SYMMETRY = 1e-12
PSD_FLOOR = -1e-10
IRE_RESIDUAL = 1e-6
QT_JUMP = 1e-1
RK4_STABILITY = 2.78

# are
NEWTON_TOL = 1e-13
NEWTON_MAX_ITER = 100
ARE_RESIDUAL = 1e-9
HAMILTONIAN_AXIS = 1e-10
SUBSPACE_COND_MAX = 1e12
TRUNCATION_TAIL = 1e-6
GENERATOR_IDENTITY = 1e-10

# synthesis
PICARD_TOL = 1e-12
PICARD_MAX_ITER = 200
PICARD_WINDOW_TOL = 1e-8
IDENTITY_RESIDUAL = 1e-5
FEEDBACK_COST = 1e-6
SANDWICH_GAP = 1e-6
OPRIC_RESIDUAL = 1e-5
EVOLUTION_RESIDUAL = 1e-10
UNIQUENESS_MAP = 1e-4
FIXED_POINT_MATCH = 1e-5
