"""Random non-contractive embeddings of finite metrics into ultrametrics,
with dynamic-programming clustering solvers and a sampling reduction from
general metrics to ultrametrics."""

from .errors import GradEmbedError
from .metric import (
    FiniteMetric,
    aspect_ratio,
    diameter,
    from_graph,
    gen_cycle,
    gen_diamond,
    gen_path,
    gen_random,
    min_distance,
    quotient_at_scale,
    validate,
)
from .ultrametric import UltrametricTree, check_strong_triangle, from_distance_matrix, to_metric
from .partition import ckr_partition, estimate_padding, quotient_partition
from .embed import (
    EmbeddingSample,
    GradientReport,
    ScaleLadder,
    estimate_expected_max_gradient,
    max_gradient,
    sample_embedding,
    scale_range,
)
from .clustering import (
    ClusteringSolution,
    eval_facility,
    eval_ft_kmedian,
    eval_sigma_lp,
    solve_facility_ultrametric,
    solve_ft_kmedian_ultrametric,
    solve_sigma_lp_ultrametric,
)
from .oracle import oracle_facility, oracle_ft_kmedian, oracle_sigma_lp
from .reduction import (
    MonotoneProblem,
    facility_problem,
    ft_kmedian_problem,
    reduce_and_solve,
    sigma_lp_problem,
)
from .experiments import (
    ExperimentConfig,
    growth_curve,
    karp_cycle_embedding,
    karp_statistics,
    rr_certificate,
)

__version__ = "0.1.0"
