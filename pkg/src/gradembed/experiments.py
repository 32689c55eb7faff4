"""Experiment batteries: cycle-to-path deletion embedding, tree-distance
certificates for cycles, and gradient growth curves with CSV output."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .embed import estimate_expected_max_gradient, ScaleLadder
from .errors import BadEdge, CertificateMissing, NotNonContractive
from .metric import FiniteMetric, gen_cycle, gen_diamond, gen_path, gen_random, diamond_graph
from .ultrametric import UltrametricTree


@dataclass(frozen=True)
class ExperimentConfig:
    family: str  # cycle | path | diamond | random
    sizes: tuple  # n values (or recursion depth for diamond)
    samples: int
    seed: int
    output: str | None = None

    def __post_init__(self):
        if not self.sizes or list(self.sizes) != sorted(set(self.sizes)):
            raise ValueError("sizes must be nonempty and increasing")
        if self.samples < 1:
            raise ValueError("samples must be >= 1")


def karp_cycle_embedding(n: int, which_edge: int):
    """Delete one cycle edge; return the resulting path metric and the
    exact per-point max gradient of the (non-contractive) identity map."""
    if n < 4:
        raise BadEdge("cycle size must be >= 4")
    if not 0 <= which_edge < n:
        raise BadEdge(f"edge index must lie in 0..{n - 1}")
    cyc = gen_cycle(n)
    a = which_edge  # deleted edge (a, a+1)
    pos = np.empty(n, dtype=float)
    for t in range(n):
        pos[(a + 1 + t) % n] = t
    dpath = np.abs(pos[:, None] - pos[None, :])
    off = ~np.eye(n, dtype=bool)
    grads = np.where(off, dpath / np.where(off, cyc.dist, 1.0), 0.0).max(axis=1)
    return FiniteMetric(cyc.labels, dpath), grads


def karp_reference_sum(n: int) -> float:
    """(2/n) * sum over 0 <= t <= n/2 of (n-t-1)/(t+1)."""
    return 2.0 / n * sum((n - t - 1) / (t + 1) for t in range(0, n // 2 + 1))


def karp_statistics(n: int) -> dict:
    """Exact statistics of the random-edge-deletion embedding of the
    n-cycle, averaged over all n deletions."""
    cyc = gen_cycle(n)
    off = ~np.eye(n, dtype=bool)
    stretch_mean = np.zeros((n, n))
    grad_mean = np.zeros(n)
    for e in range(n):
        pm, grads = karp_cycle_embedding(n, e)
        stretch_mean += np.where(off, pm.dist / np.where(off, cyc.dist, 1.0), 0.0)
        grad_mean += grads
    stretch_mean /= n
    grad_mean /= n
    return {
        "n": n,
        "max_pair_mean_stretch": float(stretch_mean[off].max()),
        "expected_max_gradient": float(grad_mean[0]),
        "expected_max_gradient_per_point": grad_mean,
        "reference_sum": karp_reference_sum(n),
    }


def rr_certificate(embedding, n: int):
    """Find the cycle edge whose image is stretched the most.

    `embedding` is an UltrametricTree or a distance matrix over the
    vertices 0..n-1 of the n-cycle.  Raises NotNonContractive if the
    embedding contracts some pair, CertificateMissing if no edge reaches
    tree distance n/3 - 1 (which no non-contractive tree embedding can
    avoid)."""
    if isinstance(embedding, UltrametricTree):
        d = embedding.to_matrix()
        order = [embedding.labels.index(i) for i in range(n)]
        d = d[np.ix_(order, order)]
    else:
        d = np.asarray(embedding, dtype=float)
    cyc = gen_cycle(n)
    if np.any(d < cyc.dist - 1e-12):
        raise NotNonContractive("embedding contracts a pair")
    stretches = [d[x, (x + 1) % n] for x in range(n)]
    x = int(np.argmax(stretches))
    best = float(stretches[x])
    if best < n / 3 - 1:
        raise CertificateMissing(f"max edge image {best} below n/3 - 1")
    return (x, (x + 1) % n), best


def make_instance(family: str, size: int, seed: int) -> FiniteMetric:
    if family == "cycle":
        return gen_cycle(size)
    if family == "path":
        return gen_path(size)
    if family == "diamond":
        return gen_diamond(size)
    if family == "random":
        return gen_random(size, "euclidean_2d", seed)
    raise ValueError(f"unknown family {family!r}")


GROWTH_COLUMNS = ("n", "mean_max_gradient", "max_point_mean", "stderr", "log_n", "log_n_sq")


def growth_curve(config: ExperimentConfig, threads: int = 1):
    """Per-size Monte-Carlo gradient statistics, as plot-ready rows.

    Logs are natural logs.  For the diamond family the reported size is
    the vertex count and an extra edge-weighted mean is appended (high
    degree vertices weighted by their degree).  Sizes run in parallel on
    up to `threads` workers; each size owns a derived seed, so the rows
    do not depend on the thread count."""

    def cell(i, size):
        m = make_instance(config.family, size, config.seed)
        rep = estimate_expected_max_gradient(m, config.samples, config.seed + i)
        n = m.n
        row = {
            "n": n,
            "mean_max_gradient": rep.mean_max_gradient,
            "max_point_mean": rep.max_over_points,
            "stderr": float(rep.per_point_stderr.max()),
            "log_n": math.log(n),
            "log_n_sq": math.log(n) ** 2,
        }
        if config.family == "diamond":
            row["edge_weighted_mean"] = diamond_edge_weighted_mean(size, rep)
        return row

    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            futs = [pool.submit(cell, i, s) for i, s in enumerate(config.sizes)]
            return [f.result() for f in futs]
    return [cell(i, s) for i, s in enumerate(config.sizes)]


def diamond_edge_weighted_mean(k: int, report) -> float:
    """Mean over edges of the summed endpoint gradients, divided by the
    edge count: the degree-weighted gradient average of the diamond."""
    vertices, edges = diamond_graph(k)
    per_point = dict(zip(report.labels, report.per_point))
    total = sum(per_point[u] + per_point[v] for u, v in edges)
    return float(total / len(edges))


def fit_growth(rows) -> dict:
    """Least-squares fits of max_point_mean against log n and (log n)^2."""
    y = np.array([r["max_point_mean"] for r in rows])
    out = {}
    for key, name in (("log_n", "linear_log"), ("log_n_sq", "square_log")):
        x = np.array([r[key] for r in rows])
        A = np.stack([x, np.ones_like(x)], axis=1)
        coef, *_ = np.linalg.lstsq(A, y, rcond=None)
        resid = y - A @ coef
        ss_res = float((resid**2).sum())
        ss_tot = float(((y - y.mean()) ** 2).sum())
        out[name] = {
            "slope": float(coef[0]),
            "intercept": float(coef[1]),
            "r2": 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0,
            "residuals": resid.tolist(),
        }
    return out


def write_csv(rows, path, extra_comment=None):
    """CSV with a stable header; logs are natural logs (see comment row)."""
    cols = list(GROWTH_COLUMNS)
    for r in rows:
        for key in r:
            if key not in cols:
                cols.append(key)
    with open(path, "w", newline="") as fh:
        if extra_comment:
            fh.write(f"# {extra_comment}\n")
        fh.write("# log columns use natural logarithms\n")
        writer = csv.DictWriter(fh, fieldnames=cols)
        writer.writeheader()
        for r in rows:
            writer.writerow(r)
