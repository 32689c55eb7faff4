"""Reduce clustering on a general metric to clustering on sampled ultrametrics.

Any monotone homogeneous objective solved (or approximated) on
ultrametrics extends to general metrics: sample a non-contractive random
ultrametric, solve there, and re-evaluate the returned solution under the
original distances.  Monotonicity makes the re-evaluated value both a
valid objective value and an upper bound certified by the sample.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from .clustering import (
    ClusteringSolution,
    eval_facility,
    eval_ft_kmedian,
    eval_sigma_lp,
    solve_facility_ultrametric,
    solve_ft_kmedian_ultrametric,
    solve_sigma_lp_ultrametric,
)
from .embed import ScaleLadder, EmbeddingSample
from .errors import OracleInfeasible
from .metric import FiniteMetric
from . import oracle as _oracle

ORACLE_N_CAP = 10


@dataclass(frozen=True)
class MonotoneProblem:
    """A clustering objective with an ultrametric solver.

    `evaluate` must be monotone and homogeneous in the metric; only the
    three built-in objectives are constructible, which rules out
    higher-order homogeneity (e.g. sum of squared distances).
    """

    name: str
    evaluate: Callable[[FiniteMetric, ClusteringSolution], float]
    solve_on_ultrametric: Callable
    solve_oracle: Callable[[FiniteMetric], ClusteringSolution]
    params: dict = field(default_factory=dict)


def ft_kmedian_problem(k: int, profile) -> MonotoneProblem:
    return MonotoneProblem(
        name="ft_kmedian",
        evaluate=lambda m, sol: eval_ft_kmedian(m, sol.centers, profile),
        solve_on_ultrametric=lambda t: solve_ft_kmedian_ultrametric(t, k, profile),
        solve_oracle=lambda m: _oracle.oracle_ft_kmedian(m, k, profile),
        params={"k": k},
    )


def facility_problem(profile, open_cost) -> MonotoneProblem:
    return MonotoneProblem(
        name="facility",
        evaluate=lambda m, sol: eval_facility(m, sol.centers, profile, open_cost),
        solve_on_ultrametric=lambda t: solve_facility_ultrametric(t, profile, open_cost),
        solve_oracle=lambda m: _oracle.oracle_facility(m, profile, open_cost),
        params={},
    )


def sigma_lp_problem(k: int, p, eps: float) -> MonotoneProblem:
    return MonotoneProblem(
        name="sigma_lp",
        evaluate=lambda m, sol: eval_sigma_lp(m, sol.centers, sol.clusters, p),
        solve_on_ultrametric=lambda t: solve_sigma_lp_ultrametric(t, k, p, eps),
        solve_oracle=lambda m: _oracle.oracle_sigma_lp(m, k, p),
        params={"k": k, "p": p, "eps": eps},
    )


def reduce_and_solve(m: FiniteMetric, problem: MonotoneProblem, samples: int,
                     seed: int) -> ClusteringSolution:
    """Best-of-S: solve on S independent sampled ultrametrics and keep the
    solution with the smallest original-metric value."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    ladder = ScaleLadder(m)
    best = None
    errors = []
    for i in range(samples):
        rho = ladder.sample_rho(seed, sample_index=i)
        sample = EmbeddingSample(m, rho, (ladder.k_min, ladder.k_max))
        try:
            sol = problem.solve_on_ultrametric(sample.tree)
            val = problem.evaluate(m, sol)
        except Exception as e:  # noqa: BLE001 - per-sample failures tolerated
            errors.append(e)
            continue
        if best is None or val < best[0]:
            best = (val, sol)
    if best is None:
        raise errors[0]
    val, sol = best
    return ClusteringSolution(
        centers=sol.centers,
        value=val,
        objective=problem.name,
        clusters=sol.clusters,
        params=dict(problem.params, samples=samples, seed=seed),
        metric_tag="original",
    )


def approximation_ratio_report(m: FiniteMetric, problem: MonotoneProblem,
                               samples: int, seed: int) -> dict:
    """Returned value vs. the brute-force optimum, per sample and best-of."""
    if m.n > ORACLE_N_CAP:
        raise OracleInfeasible(f"ratio reports need n <= {ORACLE_N_CAP}")
    ladder = ScaleLadder(m)
    per_sample = []
    best = None
    for i in range(samples):
        rho = ladder.sample_rho(seed, sample_index=i)
        sample = EmbeddingSample(m, rho, (ladder.k_min, ladder.k_max))
        sol = problem.solve_on_ultrametric(sample.tree)
        val = problem.evaluate(m, sol)
        per_sample.append(val)
        if best is None or val < best[0]:
            best = (val, sol)
    opt = problem.solve_oracle(m)
    return {
        "returned_value": best[0],
        "oracle_value": opt.value,
        "ratio": best[0] / opt.value if opt.value > 0 else 1.0,
        "per_sample_values": per_sample,
    }
