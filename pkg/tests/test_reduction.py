import numpy as np
import pytest

from gradembed.oracle import oracle_ft_kmedian
from gradembed.reduction import (
    approximation_ratio_report,
    facility_problem,
    ft_kmedian_problem,
    reduce_and_solve,
    sigma_lp_problem,
)

from conftest import random_metric, random_profile


class TestReduceAndSolve:
    def test_soundness_vs_oracle(self, rng):
        for trial in range(25):
            m = random_metric(int(rng.integers(3, 8)), rng)
            k = int(rng.integers(1, 3))
            prof = random_profile(m.labels, k, rng)
            prob = ft_kmedian_problem(k, prof)
            sol = reduce_and_solve(m, prob, samples=4, seed=trial)
            opt = oracle_ft_kmedian(m, k, prof)
            assert sol.value >= opt.value - 1e-9
            assert sol.metric_tag == "original"

    def test_best_of_more_samples_never_worse(self, rng):
        m = random_metric(7, rng)
        prof = {lab: 1 for lab in m.labels}
        prob = ft_kmedian_problem(2, prof)
        v1 = reduce_and_solve(m, prob, samples=1, seed=5).value
        v16 = reduce_and_solve(m, prob, samples=16, seed=5).value
        assert v16 <= v1 + 1e-12

    def test_facility_objective(self, rng):
        m = random_metric(6, rng)
        prof = {lab: 1 for lab in m.labels}
        fee = {lab: 1.0 for lab in m.labels}
        sol = reduce_and_solve(m, facility_problem(prof, fee), samples=4, seed=0)
        assert sol.objective == "facility" and sol.value > 0

    def test_sigma_lp_objective(self, rng):
        m = random_metric(6, rng)
        sol = reduce_and_solve(m, sigma_lp_problem(2, 2, 0.1), samples=4, seed=0)
        assert sol.objective == "sigma_lp"
        assert len(sol.centers) == 2
        members = sorted(x for c in sol.clusters for x in c)
        assert members == sorted(m.labels)

    def test_bad_samples(self, rng):
        m = random_metric(4, rng)
        with pytest.raises(ValueError):
            reduce_and_solve(m, ft_kmedian_problem(1, {l: 1 for l in m.labels}),
                             samples=0, seed=0)


class TestRatioReport:
    def test_ratio_at_least_one(self, rng):
        for trial in range(10):
            m = random_metric(6, rng)
            prof = {lab: 1 for lab in m.labels}
            rep = approximation_ratio_report(m, ft_kmedian_problem(2, prof),
                                             samples=4, seed=trial)
            assert rep["ratio"] >= 1.0 - 1e-12
            assert len(rep["per_sample_values"]) == 4
            assert rep["returned_value"] == min(rep["per_sample_values"])

    def test_too_large(self, rng):
        m = random_metric(11, rng)
        prof = {lab: 1 for lab in m.labels}
        with pytest.raises(Exception):
            approximation_ratio_report(m, ft_kmedian_problem(1, prof), 2, 0)
