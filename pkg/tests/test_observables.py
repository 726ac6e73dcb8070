import math
from fractions import Fraction

import numpy as np
import pytest

from tdcoin.errors import ParameterError
from tdcoin.observables import (CanonicalPhase, canonical_phase, count_sigma_peaks, distribution,
                                moments, quasiperiod_report, return_probability, sigma_peak_times,
                                sigma_series)
from tdcoin.walk import GQW, STANDARD, CoinParams, Lattice, WalkState, evolve, run, step, symmetric_initial


def test_delta_distribution():
    lat = Lattice.line(3)
    dist = distribution(symmetric_initial(lat))
    assert dist.at(0) == pytest.approx(1.0)
    assert dist.total == pytest.approx(1.0)
    assert np.count_nonzero(dist.probs) == 1
    np.testing.assert_allclose(dist.pu + dist.pd, dist.probs)
    m = moments(dist)
    assert (m.mean, m.sigma) == (0.0, 0.0)


def test_one_step_two_point():
    state = step(STANDARD, CoinParams(0.5), symmetric_initial(Lattice.line(2)))
    dist = distribution(state)
    assert dist.at(1) == pytest.approx(0.5) and dist.at(-1) == pytest.approx(0.5)
    m = moments(dist)
    assert m.mean == pytest.approx(0.0, abs=1e-15)
    assert m.sigma == pytest.approx(1.0)


def test_hadamard_symmetric_initial_is_mirror_symmetric():
    lat = Lattice.line(201)
    for state in evolve(STANDARD, CoinParams(0.5), symmetric_initial(lat), 200):
        p = distribution(state).probs
        assert np.max(np.abs(p - p[::-1])) < 1e-12


def test_sigma_series_and_return_probability():
    phase = Fraction(1, 150)
    traj = run(GQW, CoinParams(0.5, phase), symmetric_initial(Lattice.line(300)), 300, stride=1)
    sigma = sigma_series(traj.states)
    assert sigma[0] == 0.0
    returns = return_probability(traj, 150, 2)
    assert len(returns) == 2
    # regression: return to the origin after one quasiperiod
    assert returns[0] == pytest.approx(1.0000000000000218, abs=1e-12)
    assert distribution(traj.at(0)).at(0) == pytest.approx(1.0, abs=1e-15)


def test_return_probability_checks():
    traj = run(GQW, CoinParams(0.5, 0.1), symmetric_initial(Lattice.line(20)), 20, stride=4)
    with pytest.raises(ParameterError):
        return_probability(traj, 6, 2)
    with pytest.raises(ParameterError):
        return_probability(traj, 0, 2)


class TestPeaks:
    def test_monotone_has_none(self):
        assert count_sigma_peaks(np.linspace(0, 5, 50), (0, 49)) == 0

    def test_constant_has_none(self):
        assert count_sigma_peaks(np.ones(20), (0, 19)) == 0

    def test_sine_bumps(self):
        t = np.arange(201)
        series = np.abs(np.sin(3 * np.pi * t / 200))
        assert sigma_peak_times(series, (0, 200)) == [33, 100, 167]

    def test_small_ripple_is_ignored(self):
        t = np.arange(101)
        series = np.sin(np.pi * t / 100) + 0.001 * np.sin(2 * np.pi * t / 5)
        assert count_sigma_peaks(series, (0, 100)) == 1

    def test_window_validation(self):
        with pytest.raises(ParameterError):
            count_sigma_peaks(np.ones(10), (5, 5))
        with pytest.raises(ParameterError):
            count_sigma_peaks(np.ones(10), (0, 10))

    @pytest.mark.parametrize("q, times", [(3, [19, 55, 91]), (7, [8, 24, 40, 55, 70, 86, 102])])
    def test_walk_peaks(self, q, times):
        lat = Lattice.line(111)
        sigma = sigma_series(evolve(GQW, CoinParams(0.5, Fraction(q, 110)), symmetric_initial(lat), 110))
        assert sigma_peak_times(sigma, (0, 110)) == times


class TestCanonicalPhase:
    def test_even_denominator_unchanged(self):
        assert canonical_phase(1, 4) == CanonicalPhase(1, 4, False)

    def test_odd_denominator(self):
        assert canonical_phase(1, 3) == CanonicalPhase(-1, 6, True)

    def test_fold_above_half(self):
        # 3/4 - 1/2 = 1/4
        assert canonical_phase(3, 4) == CanonicalPhase(1, 4, True)

    def test_validation(self):
        with pytest.raises(ParameterError):
            canonical_phase(2, 4)
        with pytest.raises(ParameterError):
            canonical_phase(1, 0)

    def test_equivalent_distributions(self):
        lat = Lattice.line(301)
        c = canonical_phase(1, 3)
        a = evolve(GQW, CoinParams(0.5, Fraction(1, 3)), symmetric_initial(lat), 300)
        b = evolve(GQW, CoinParams(0.5, Fraction(c.q, c.p)), symmetric_initial(lat), 300)
        for x, y in zip(a, b):
            assert np.max(np.abs(distribution(x).probs - distribution(y).probs)) < 1e-10


def test_quasiperiod_report():
    phase = Fraction(3, 110)
    traj = run(GQW, CoinParams(0.5, phase), symmetric_initial(Lattice.line(220)), 220)
    sigma = sigma_series(traj.states)
    report = quasiperiod_report(sigma, traj, 3, 110, 2)
    assert report.peak_count == 3
    assert report.peak_times == [19, 55, 91]
    assert all(0 <= p <= 1 + 1e-12 for p in report.return_probs)
    assert math.isclose(report.return_probs[0], distribution(traj.at(110)).at(0))


def test_distribution_at_on_circle():
    lat = Lattice.circle(2)
    state = WalkState.localized(lat, 1.0, 0.0, site=-2)
    assert distribution(state).at(-2) == 1.0
