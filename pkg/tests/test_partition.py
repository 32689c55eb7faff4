import numpy as np
import pytest

from gradembed.metric import gen_cycle, validate
from gradembed.partition import (
    ckr_partition,
    estimate_padding,
    is_partition,
    max_block_diameter,
    quotient_partition,
)

from conftest import random_metric


def line_metric(points):
    p = np.asarray(points, dtype=float)
    return validate(np.abs(p[:, None] - p[None, :]))


class TestCkrPartition:
    def test_small_delta_singletons(self, rng):
        m = random_metric(7, rng)
        dmin = m.dist[m.dist > 0].min()
        for seed in range(20):
            s = ckr_partition(m, dmin * 0.5, seed)
            assert len(s.blocks) == m.n

    def test_large_delta_single_block(self, rng):
        m = random_metric(6, rng)
        for seed in range(20):
            s = ckr_partition(m, 4 * m.dist.max(), seed)
            assert len(s.blocks) == 1

    def test_uniform_metric_singletons(self):
        # all distances 1, delta=2: R < 1 almost surely, so all singletons
        m = validate(np.ones((4, 4)) - np.eye(4))
        for seed in range(500):
            s = ckr_partition(m, 2.0, seed)
            assert len(s.blocks) == 4

    def test_partition_and_bounded(self, rng):
        for _ in range(30):
            m = random_metric(int(rng.integers(3, 10)), rng)
            delta = float(rng.uniform(0.3, 4) * m.dist.max())
            s = ckr_partition(m, delta, rng)
            assert is_partition(s, m.n)
            assert max_block_diameter(s, m) <= delta + 1e-12

    def test_deterministic(self, rng):
        m = random_metric(8, rng)
        a = ckr_partition(m, 3.0, 99)
        b = ckr_partition(m, 3.0, 99)
        assert a.blocks == b.blocks


class TestQuotientPartition:
    def test_large_delta_single_block(self, rng):
        m = random_metric(5, rng)
        delta = 2 * m.n * m.dist.max()
        for seed in range(10):
            s = quotient_partition(m, delta, seed)
            assert len(s.blocks) == 1

    def test_line_pair_never_separated(self):
        m = line_metric([0, 1, 10])
        for seed in range(200):
            s = quotient_partition(m, 16.0, seed)
            assert s.block_of[0] == s.block_of[1]

    def test_hard_guarantee_and_boundedness(self, rng):
        for _ in range(100):
            m = random_metric(int(rng.integers(3, 9)), rng)
            delta = float(rng.uniform(0.3, 4) * m.dist.max())
            s = quotient_partition(m, delta, rng)
            assert is_partition(s, m.n)
            assert max_block_diameter(s, m) <= delta + 1e-12
            thr = delta / (2 * m.n)
            close = np.argwhere(m.dist <= thr)
            for i, j in close:
                assert s.block_of[i] == s.block_of[j]


class TestPadding:
    def test_singleton_ball(self, rng):
        m = random_metric(6, rng)
        dmin = m.dist[m.dist > 0].min()
        est = estimate_padding(m, 16 * dmin, dmin * 0.5, 0, 50, rng)
        # t below min distance: the ball is {x} and never escapes... unless
        # delta/8 >= t only; here t < dmin so B(x,t) = {x}
        assert est == 0.0

    def test_huge_delta(self, rng):
        m = random_metric(6, rng)
        est = estimate_padding(m, 8 * m.dist.max(), m.dist.max(), 0, 50, rng)
        assert est == 0.0

    def test_bad_t(self, rng):
        m = random_metric(4, rng)
        with pytest.raises(ValueError):
            estimate_padding(m, 8.0, 2.0, 0, 10, rng)

    def test_cycle_bound(self):
        # C_16, delta=8, t=1: bound (16t/delta) * ln(|B(x,delta)| / |B(x,delta/8)|)
        m = gen_cycle(16)
        trials = 20000
        est = estimate_padding(m, 8.0, 1.0, 0, trials, 7)
        ball_big = int(np.sum(m.dist[0] <= 8.0))
        ball_small = int(np.sum(m.dist[0] <= 1.0))
        bound = (16 * 1.0 / 8.0) * np.log(ball_big / ball_small)
        sigma = np.sqrt(max(est * (1 - est), 1e-12) / trials)
        assert est <= bound + 3 * sigma
