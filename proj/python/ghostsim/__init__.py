"""Two-color ghost interference simulator.

Lengths are in metres. Pattern functions take a uniformly spaced numpy axis and
return the density sampled on it.
"""

from ._core import (
    AnalysisError,
    ConfigError,
    Error,
    FringeReport,
    FringeWidths,
    JointDensity,
    OracleRun,
    PhysicsError,
    ResourceError,
    Scenario,
    Uncertainties,
    bucket_average,
    coincidence_slice,
    default_y2_half_width,
    ding_fig3,
    extract_fringes,
    fringe_width,
    joint_density,
    marginal_particle1,
    preset_yaml,
    run,
    run_oracle,
    uncertainties,
    visibility_at,
    visibility_vs_bucket,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
