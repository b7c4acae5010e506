"""
holoparabolic: entropy bounds, volume growth and Brownian motion on model manifolds.

The modules follow one chain of reasoning.  An entropy bound with a density
floor forces exponential volume growth (:mod:`entropy_bound`), fast volume
growth makes a manifold non-parabolic (:mod:`parabolicity`), and
non-parabolicity is the same as transience of Brownian motion
(:mod:`brownian_sim`).  :mod:`grw` supplies the curvature hypotheses for
hypersurfaces of GRW spacetimes.
"""

__version__ = "0.1.0"

from .errors import *  # noqa: E402,F401,F403
from .funcs import Interval, Jet2, ScalarFunction, eval_jet2, hubble, log_second_derivative  # noqa: E402
from .model_manifold import (  # noqa: E402
    BallGeometry,
    ModelManifold,
    RicciRange,
    ball_volume,
    check_ricci_decay,
    check_volume_comparison,
    ricci_range,
    sphere_area,
)
from .convergence import ConvergenceStatus, ConvergenceVerdict, TailProbe, classify_integral  # noqa: E402
from .entropy_bound import (  # noqa: E402
    ConstantDensity,
    RadialDistribution,
    check_bound,
    check_volume_floor,
    entropy_l1_condition,
    entropy_of_ball,
    implied_volume_floor,
)
from .parabolicity import (  # noqa: E402
    Conclusion,
    CriterionReport,
    capacity_oracle,
    corollary35_report,
    criterion_thm31,
    criterion_thm32,
    criterion_thm33,
    saturating_entropy,
)
from .grw import (  # noqa: E402
    GRWSpacetime,
    HypersurfacePointData,
    check_log_concavity,
    check_meaf,
    check_null_convergence,
    pipeline_prop44,
    pipeline_thm43,
    ricci_lower_bound,
    slice_point,
)
from .brownian_sim import (  # noqa: E402
    SimConfig,
    escape_probability,
    exact_hitting_probability,
    recurrence_monte_carlo,
    simulate_annulus,
)
