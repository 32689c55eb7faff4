"""Random bounded-diameter partitions and their quotient-lifted version."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .metric import FiniteMetric, QuotientMap, quotient_at_scale


def _as_rng(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


@dataclass(frozen=True)
class PartitionSample:
    """A diameter-bounded partition drawn at one scale."""

    delta: float
    blocks: tuple  # tuple of tuples of point indices
    block_of: np.ndarray = field(repr=False)
    scale_index: int | None = None

    def __post_init__(self):
        self.block_of.setflags(write=False)


def _blocks_from_assignment(owner: np.ndarray) -> tuple:
    ids = []
    blocks = {}
    for i, b in enumerate(owner):
        if b not in blocks:
            blocks[b] = []
            ids.append(b)
        blocks[b].append(i)
    relabel = {b: t for t, b in enumerate(ids)}
    block_of = np.array([relabel[b] for b in owner])
    return tuple(tuple(blocks[b]) for b in ids), block_of


def ckr_partition(m: FiniteMetric, delta: float, rng, scale_index=None) -> PartitionSample:
    """Random partition with blocks of diameter at most delta.

    Draws a uniform permutation and a single radius R uniform in
    [delta/4, delta/2]; each point joins the first permutation point
    within distance R of it (ties d == R count as inside).
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    rng = _as_rng(rng)
    n = m.n
    perm = rng.permutation(n)
    radius = rng.uniform(delta / 4, delta / 2)
    inside = m.dist[perm] <= radius  # row i: ball of perm[i]
    # d(x, x) = 0 <= R, so every column has a first True
    owner_pos = np.argmax(inside, axis=0)
    return PartitionSample(float(delta), *_blocks_from_assignment(owner_pos),
                           scale_index=scale_index)


def quotient_partition(m: FiniteMetric, delta: float, rng, scale_index=None,
                       qmap: QuotientMap | None = None) -> PartitionSample:
    """Random partition of the quotient at scale delta/2, pulled back to X.

    Guarantees that points at distance <= delta/(2n) always land in the
    same block, while every block still has diameter <= delta.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    if qmap is None:
        qmap = quotient_at_scale(m, delta)
    qsample = ckr_partition(qmap.quotient, delta / 2, rng)
    block_of = qsample.block_of[qmap.class_of]
    blocks, block_of = _blocks_from_assignment(block_of)
    return PartitionSample(float(delta), blocks, block_of, scale_index=scale_index)


def estimate_padding(m: FiniteMetric, delta: float, t: float, x, trials: int, rng) -> float:
    """Monte-Carlo frequency of the ball B(x, t) escaping x's block."""
    if not (0 < t <= delta / 8):
        raise ValueError("need 0 < t <= delta/8")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = _as_rng(rng)
    xi = m.index(x)
    ball = np.flatnonzero(m.dist[xi] <= t)
    misses = 0
    for _ in range(trials):
        sample = ckr_partition(m, delta, rng)
        if np.any(sample.block_of[ball] != sample.block_of[xi]):
            misses += 1
    return misses / trials


def is_partition(sample: PartitionSample, n: int) -> bool:
    seen = sorted(i for block in sample.blocks for i in block)
    return seen == list(range(n)) and all(len(b) > 0 for b in sample.blocks)


def max_block_diameter(sample: PartitionSample, m: FiniteMetric) -> float:
    worst = 0.0
    for block in sample.blocks:
        if len(block) > 1:
            sub = m.dist[np.ix_(block, block)]
            worst = max(worst, float(sub.max()))
    return worst
