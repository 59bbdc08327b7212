"""
Configuration settings for the hebbian-duality toolkit
"""

from pathlib import Path


class Config:
    """Central configuration class"""

    TOOL_NAME = "hebbian-duality"
    VERSION = "0.1.0"

    # Neural dynamics (explicit Euler relaxation)
    DYNAMICS_STEP = 0.1
    DYNAMICS_TOL = 1e-8
    DYNAMICS_MAX_ITERS = 10000
    LOGISTIC_EPS = 1e-12  # clamp keeping F'(z) finite

    # Similarity matching
    PD_EPS = 1e-8  # minimum eigenvalue allowed on the lateral matrix M
    SM_INIT_HALF_WIDTH = 0.1

    # Oracles
    RANK_TOL = 1e-10
    DEGENERACY_GAP = 1e-10
    JACOBI_TOL = 1e-12
    JACOBI_MAX_SWEEPS = 100
    SYMMETRY_TOL = 1e-10
    ORTHONORMALITY_TOL = 1e-8
    DUAL_ASCENT_MAX_ITERS = 100_000
    DUAL_ASCENT_TOL = 1e-10
    DIVERGENCE_PATIENCE = 100
    FINITE_DIFF_STEP = 1e-6

    # Learners
    EXPGRAD_EXPONENT_GUARD = 50.0
    UPDATE_DENSITY_THRESHOLD = 1e-12

    # verify defaults
    TOL_WEIGHTS = 1e-3
    TOL_GAP = 1e-6
    TOL_KKT = 1e-6
    TOL_SPAN = 1e-8
    TOL_EQ21 = 1e-6
    TOL_SUBSPACE = 0.1
    TOL_MSE = 1e-3
    TOL_FIXED_POINT = 1e-6

    # Output
    DEFAULT_LOG_DIR = Path("run_logs")

    @classmethod
    def validate(cls):
        """Validate that every threshold is usable"""
        positive = {
            'DYNAMICS_STEP': cls.DYNAMICS_STEP,
            'DYNAMICS_TOL': cls.DYNAMICS_TOL,
            'DYNAMICS_MAX_ITERS': cls.DYNAMICS_MAX_ITERS,
            'LOGISTIC_EPS': cls.LOGISTIC_EPS,
            'PD_EPS': cls.PD_EPS,
            'RANK_TOL': cls.RANK_TOL,
            'JACOBI_TOL': cls.JACOBI_TOL,
            'DUAL_ASCENT_MAX_ITERS': cls.DUAL_ASCENT_MAX_ITERS,
            'FINITE_DIFF_STEP': cls.FINITE_DIFF_STEP,
            'EXPGRAD_EXPONENT_GUARD': cls.EXPGRAD_EXPONENT_GUARD,
        }
        for name, value in positive.items():
            if not value > 0:
                raise ValueError(f"{name} must be positive, got {value}")
        if not 0 < cls.LOGISTIC_EPS < 0.5:
            raise ValueError("LOGISTIC_EPS must lie in (0, 0.5)")
