"""Brute-force exact solvers used as ground truth in tests and reports."""

from __future__ import annotations

import math
from itertools import combinations

from .clustering import (
    ClusteringSolution,
    eval_facility,
    eval_ft_kmedian,
    eval_sigma_lp,
    profile_vector,
)
from .errors import TooLargeForOracle
from .metric import FiniteMetric

FT_KMEDIAN_CAP = 12
FACILITY_CAP = 10
SIGMA_LP_N_CAP = 8
SIGMA_LP_K_CAP = 3


def oracle_ft_kmedian(m: FiniteMetric, k: int, profile) -> ClusteringSolution:
    """Exact optimum by enumerating every k-subset of centers."""
    if m.n > FT_KMEDIAN_CAP:
        raise TooLargeForOracle(f"n must be <= {FT_KMEDIAN_CAP}")
    profile_vector(m.labels, profile, k)
    best = None
    for centers in combinations(m.labels, k):
        val = eval_ft_kmedian(m, centers, profile)
        if best is None or val < best[0]:
            best = (val, centers)
    return ClusteringSolution(
        centers=best[1], value=best[0], objective="ft_kmedian",
        params={"k": k}, metric_tag="oracle",
    )


def oracle_facility(m: FiniteMetric, profile, open_cost) -> ClusteringSolution:
    """Exact optimum over all center subsets of size >= max j(x)."""
    if m.n > FACILITY_CAP:
        raise TooLargeForOracle(f"n must be <= {FACILITY_CAP}")
    jmax = max(int(profile[lab]) for lab in m.labels)
    profile_vector(m.labels, profile, m.n)
    best = None
    for size in range(jmax, m.n + 1):
        for centers in combinations(m.labels, size):
            val = eval_facility(m, centers, profile, open_cost)
            if best is None or val < best[0]:
                best = (val, centers)
    return ClusteringSolution(
        centers=best[1], value=best[0], objective="facility",
        params={}, metric_tag="oracle",
    )


def _set_partitions(items, max_blocks):
    """Partitions into at most max_blocks nonempty blocks, via
    restricted-growth strings."""
    n = len(items)
    a = [0] * n

    def rec(i, used):
        if i == n:
            blocks = [[] for _ in range(used)]
            for t, b in enumerate(a):
                blocks[b].append(items[t])
            yield blocks
            return
        for b in range(min(used + 1, max_blocks)):
            a[i] = b
            yield from rec(i + 1, max(used, b + 1))

    yield from rec(0, 0)


def oracle_sigma_lp(m: FiniteMetric, k: int, p) -> ClusteringSolution:
    """Exact optimum over all partitions into <= k clusters with the best
    center chosen exhaustively per cluster."""
    if m.n > SIGMA_LP_N_CAP or k > SIGMA_LP_K_CAP:
        raise TooLargeForOracle(
            f"sigma_lp oracle capped at n <= {SIGMA_LP_N_CAP}, k <= {SIGMA_LP_K_CAP}"
        )
    if k < 1:
        raise TooLargeForOracle("k must be >= 1")
    best = None
    for blocks in _set_partitions(list(m.labels), k):
        centers = []
        total = 0.0
        used = set()
        for block in blocks:
            bc = None
            for cand in m.labels:
                if p == math.inf:
                    val = max(m.d(x, cand) for x in block)
                else:
                    val = sum(m.d(x, cand) ** p for x in block) ** (1.0 / p)
                if bc is None or val < bc[0]:
                    bc = (val, cand)
            total += bc[0]
            centers.append(bc[1])
            used.add(bc[1])
        if best is None or total < best[0]:
            best = (total, centers, [tuple(b) for b in blocks])
    total, centers, clusters = best
    # centers may repeat across clusters; merging repeated-center clusters
    # never increases the objective, so report the merged form
    merged = {}
    for c, block in zip(centers, clusters):
        merged.setdefault(c, []).extend(block)
    centers = tuple(merged)
    clusters = tuple(tuple(b) for b in merged.values())
    value = eval_sigma_lp(m, centers, clusters, p)
    return ClusteringSolution(
        centers=centers, value=value, objective="sigma_lp",
        clusters=clusters, params={"k": k, "p": p}, metric_tag="oracle",
    )
