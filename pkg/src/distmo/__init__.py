"""Distributional multi-objective decision making toolkit.

Represents policy returns as multivariate categorical distributions,
decides Pareto / stochastic / distributional / convex-distributional
dominance, prunes policy sets to the matching solution sets, and learns
the distributional undominated set of a tabular MOMDP with set-valued
Q-learning.
"""

from .distributions import (
    ReturnDistribution,
    UtilityFunction,
    convolve,
    custom_utility,
    js_distance,
    leontief_utility,
    linear_utility,
    mix,
    product_utility,
    round_to_precision,
    smooth_log_product_utility,
    step_grid,
)
from .dominance import distributionally_dominates, fsd, pareto_dominates
from .linprog import LinearProgram, LPSolution, solve
from .momdp import (
    GeneratorConfig,
    MOMDP,
    TransitionEstimate,
    estimate_transitions,
    generate,
    time_indexed_view,
    large_config,
    medium_config,
    small_config,
)
from .oracle import OracleCapError, exhaustive_dus
from .pruning import (
    SolutionSet,
    cd_prune,
    ch_prune,
    d_prune,
    is_convex_dist_dominated,
    p_prune,
)
from .qlearn import (
    EmpiricalReward,
    Learner,
    LearnerConfig,
    QSetTable,
    limit_set_size,
    q_backup,
    score_set,
    select_action,
    train,
)

__version__ = "0.1.0"
