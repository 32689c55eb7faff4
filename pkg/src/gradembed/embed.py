"""Random non-contractive embeddings into ultrametrics via 16-adic scales.

For each integer scale k a quotient-lifted random partition is drawn at
diameter bound 16^k; a pair's embedded distance is 16^(k+1) for the
largest k at which the pair is separated.  The result is an exact
ultrametric that never contracts and expands by at most 32n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import DegenerateMetric
from .metric import FiniteMetric, diameter, min_distance, quotient_at_scale
from .partition import quotient_partition
from .ultrametric import UltrametricTree, from_distance_matrix

BASE = 16.0


def scale_range(m: FiniteMetric) -> tuple[int, int]:
    """[k_min, k_max): k_min is the last all-singleton scale (16^k below the
    minimum distance), k_max the first scale forced to a single block
    (16^k >= 2n * diam)."""
    if m.n < 2:
        raise DegenerateMetric("need at least two points")
    dmin = min_distance(m)
    dmax = diameter(m)
    k_min = math.floor(math.log(dmin) / math.log(BASE))
    while BASE**k_min >= dmin:
        k_min -= 1
    while BASE ** (k_min + 1) < dmin:
        k_min += 1
    target = 2 * m.n * dmax
    k_max = math.ceil(math.log(target) / math.log(BASE))
    while BASE**k_max < target:
        k_max += 1
    while k_max - 1 > k_min and BASE ** (k_max - 1) >= target:
        k_max -= 1
    return k_min, k_max


class ScaleLadder:
    """Per-metric cache of the deterministic quotient at every scale.

    Partition draws are cheap; the quotient construction is not, and it
    depends only on (metric, scale), so it is shared across samples.
    """

    def __init__(self, m: FiniteMetric):
        self.metric = m
        self.k_min, self.k_max = scale_range(m)
        self.qmaps = {
            k: quotient_at_scale(m, BASE**k) for k in range(self.k_min, self.k_max)
        }

    def sample_rho(self, seed: int, sample_index: int = 0, collect=None) -> np.ndarray:
        """One draw of the random ultrametric distance matrix.

        Each (sample, scale) pair owns a private PRNG stream, so draws are
        reproducible and independent across scales.  `collect`, if given,
        receives every PartitionSample drawn.
        """
        n = self.metric.n
        last = np.full((n, n), self.k_min, dtype=np.int64)
        for k in range(self.k_min, self.k_max):
            ss = np.random.SeedSequence(seed, spawn_key=(sample_index, k - self.k_min))
            rng = np.random.default_rng(ss)
            ps = quotient_partition(
                self.metric, BASE**k, rng, scale_index=k, qmap=self.qmaps[k]
            )
            if collect is not None:
                collect(ps)
            sep = ps.block_of[:, None] != ps.block_of[None, :]
            last[sep] = k
        rho = BASE ** (last + 1.0)
        np.fill_diagonal(rho, 0.0)
        return rho


@dataclass(frozen=True)
class EmbeddingSample:
    """One sampled ultrametric over the source metric's points."""

    source: FiniteMetric
    rho: np.ndarray = field(repr=False)
    scale_range: tuple[int, int]

    def __post_init__(self):
        self.rho.setflags(write=False)

    @cached_property
    def tree(self) -> UltrametricTree:
        return from_distance_matrix(self.rho, labels=self.source.labels)


@dataclass(frozen=True)
class GradientReport:
    """Per-point worst expansion ratios, aggregated over samples."""

    labels: tuple
    per_point: np.ndarray = field(repr=False)
    per_point_stderr: np.ndarray = field(repr=False)
    mean_max_gradient: float
    max_over_points: float
    worst_point: object
    samples: int
    per_sample_means: tuple

    def to_json(self) -> dict:
        return {
            "labels": list(self.labels),
            "per_point": self.per_point.tolist(),
            "per_point_stderr": self.per_point_stderr.tolist(),
            "mean_max_gradient": self.mean_max_gradient,
            "max_over_points": self.max_over_points,
            "worst_point": self.worst_point,
            "samples": self.samples,
            "per_sample_means": list(self.per_sample_means),
        }


def sample_embedding(m: FiniteMetric, seed: int, sample_index: int = 0,
                     ladder: ScaleLadder | None = None) -> EmbeddingSample:
    if ladder is None:
        ladder = ScaleLadder(m)
    rho = ladder.sample_rho(seed, sample_index)
    return EmbeddingSample(m, rho, (ladder.k_min, ladder.k_max))


def _gradients(m: FiniteMetric, rho: np.ndarray) -> np.ndarray:
    off = ~np.eye(m.n, dtype=bool)
    ratio = np.where(off, rho / np.where(off, m.dist, 1.0), 0.0)
    return ratio.max(axis=1)


def max_gradient(sample: EmbeddingSample) -> GradientReport:
    """Per-point max of rho(x, y) / d(x, y) for a single sample."""
    g = _gradients(sample.source, sample.rho)
    worst = int(np.argmax(g))
    return GradientReport(
        labels=sample.source.labels,
        per_point=g,
        per_point_stderr=np.zeros_like(g),
        mean_max_gradient=float(g.mean()),
        max_over_points=float(g.max()),
        worst_point=sample.source.labels[worst],
        samples=1,
        per_sample_means=(float(g.mean()),),
    )


def estimate_expected_max_gradient(m: FiniteMetric, samples: int, seed: int) -> GradientReport:
    """Monte-Carlo estimate, per point, of the expected max gradient."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    ladder = ScaleLadder(m)
    n = m.n
    acc = np.zeros(n)
    acc2 = np.zeros(n)
    sample_means = []
    for i in range(samples):
        g = _gradients(m, ladder.sample_rho(seed, sample_index=i))
        acc += g
        acc2 += g * g
        sample_means.append(float(g.mean()))
    mean = acc / samples
    var = np.maximum(acc2 / samples - mean**2, 0.0)
    stderr = np.sqrt(var / samples)
    worst = int(np.argmax(mean))
    return GradientReport(
        labels=m.labels,
        per_point=mean,
        per_point_stderr=stderr,
        mean_max_gradient=float(mean.mean()),
        max_over_points=float(mean.max()),
        worst_point=m.labels[worst],
        samples=samples,
        per_sample_means=tuple(sample_means),
    )


def average_distortion(samples) -> float:
    """Classical probabilistic-embedding statistic: the worst pair's mean
    expansion over the given samples."""
    samples = list(samples)
    if not samples:
        raise ValueError("need at least one sample")
    m = samples[0].source
    off = ~np.eye(m.n, dtype=bool)
    acc = np.zeros_like(m.dist)
    for s in samples:
        acc += np.where(off, s.rho / np.where(off, m.dist, 1.0), 0.0)
    acc /= len(samples)
    return float(acc[off].max())
