import math

import numpy as np
import pytest

from berlinonline.ptlattice import selftest
from berlinonline.ptlattice.selftest import (
    CHECKS,
    CheckResult,
    check_critical_points,
    check_gap_phenomenon,
    check_n4_ground_truth,
    check_reference_intersections,
    check_round_trips,
    check_spectrum_vs_oracle,
    check_symmetry_battery,
    run_selftest,
)


def check_broken(rng: np.random.Generator, samples: int) -> CheckResult:
    raise RuntimeError("boom")


class TestChecks(object):

    @pytest.mark.parametrize("check", [
        check_spectrum_vs_oracle,
        check_reference_intersections,
        check_n4_ground_truth,
        check_gap_phenomenon,
        check_round_trips,
        check_critical_points,
        check_symmetry_battery,
    ])
    def test_check_passes(self, check):
        result = check(np.random.default_rng(7), 20)
        assert result.passed, result.detail
        assert result.max_error <= 1e-6

    def test_round_trips_count_accepted_draws(self):
        result = check_round_trips(np.random.default_rng(3), 50)
        assert result.passed, result.detail
        assert result.detail.startswith('5000 accepted draws of ')
        attempts = int(result.detail.split()[4].rstrip(','))
        assert attempts >= 5000

    def test_round_trip_draws_cover_the_box(self):
        e, alpha, b, _ = selftest._round_trip_draws(np.random.default_rng(5), 20000)
        assert e.size == alpha.size == b.size == 20000
        assert e.min() < -3.5 and e.max() > 3.5
        assert np.abs(alpha).max() > 2.5 and alpha.min() < 0 < alpha.max()
        assert b.min() < -2.5 and b.max() > 2.5
        assert np.all(np.abs(e - alpha) >= selftest.ROUND_TRIP_MARGIN)

    def test_every_check_is_registered(self):
        names = [check.__name__ for check in CHECKS]
        assert len(names) == 8
        assert names[0] == 'check_coefficient_identity'
        assert names[-1] == 'check_symmetry_battery'


class TestRunSelftest(object):

    def test_results_follow_checks(self, monkeypatch):
        monkeypatch.setattr(selftest, 'CHECKS', [selftest.check_coefficient_identity, check_broken])
        results = run_selftest(samples=3, seed=1)
        assert [result.name for result in results] == ['coefficient_identity', 'broken']
        assert results[0].passed
        assert results[0].seconds >= 0

    def test_raising_check_fails(self, monkeypatch):
        monkeypatch.setattr(selftest, 'CHECKS', [check_broken])
        result, = run_selftest(samples=3)
        assert not result.passed
        assert result.max_error == math.inf
        assert result.detail == 'RuntimeError: boom'

    def test_seed_makes_runs_reproducible(self, monkeypatch):
        monkeypatch.setattr(selftest, 'CHECKS', [selftest.check_spectrum_vs_oracle])
        first, = run_selftest(samples=10, seed=3)
        second, = run_selftest(samples=10, seed=3)
        assert first.max_error == second.max_error
        assert first.detail == second.detail

    def test_bad_samples_raise_error(self):
        with pytest.raises(ValueError):
            run_selftest(samples=0)
