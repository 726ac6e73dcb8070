"""Probability distributions, moments and quasiperiod diagnostics."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np
from scipy.signal import find_peaks

from .errors import ParameterError
from .walk import Trajectory, WalkState

PEAK_PROMINENCE = 0.02


@dataclass
class Distribution:
    t: int
    sites: np.ndarray
    probs: np.ndarray
    pu: np.ndarray
    pd: np.ndarray

    @property
    def total(self) -> float:
        return float(self.probs.sum())

    def at(self, n: int) -> float:
        return float(self.probs[n - int(self.sites[0])])


@dataclass
class MomentStats:
    t: int
    mean: float
    sigma: float
    sigma2: float


class CanonicalPhase(NamedTuple):
    q: int
    p: int
    shifted: bool  # True when the pi-shift symmetry was used to reach an even denominator


@dataclass
class QuasiperiodReport:
    p: int
    q: int
    peak_times: list
    peak_count: int
    return_probs: list


def distribution(state: WalkState) -> Distribution:
    pu = np.abs(state.u) ** 2
    pd = np.abs(state.d) ** 2
    return Distribution(state.t, state.lattice.sites, pu + pd, pu, pd)


def moments(dist: Distribution) -> MomentStats:
    n = dist.sites.astype(float)
    p = dist.probs
    mean = float(np.dot(n, p))
    sigma2 = float(np.dot((n - mean) ** 2, p))
    return MomentStats(dist.t, mean, math.sqrt(sigma2), sigma2)


def sigma_series(states) -> np.ndarray:
    """sigma(t) for an iterable of states, in order."""
    return np.array([moments(distribution(s)).sigma for s in states])


def return_probability(traj: Trajectory, T: int, M: int) -> list:
    """``[P_0(T), P_0(2T), ..., P_0(MT)]`` read from a recorded trajectory."""
    if T < 1 or M < 0:
        raise ParameterError(f"need T >= 1 and M >= 0, got T={T}, M={M}")
    if T % traj.stride:
        raise ParameterError(f"T={T} is not a multiple of the recording stride {traj.stride}")
    return [distribution(traj.at(m * T)).at(0) for m in range(1, M + 1)]


def count_sigma_peaks(sigma: Sequence[float], window: tuple[int, int]) -> int:
    """Count the local maxima of a per-step sigma series inside ``[t0, t1]``.

    A maximum counts when it rises above both neighbours and its prominence
    (height above the higher of its two flanking minima, searched within the
    window) exceeds 2% of the window's sigma range.
    """
    return len(sigma_peak_times(sigma, window))


def sigma_peak_times(sigma: Sequence[float], window: tuple[int, int]) -> list:
    t0, t1 = window
    sigma = np.asarray(sigma, dtype=float)
    if t1 <= t0:
        raise ParameterError(f"empty window [{t0}, {t1}]")
    if t0 < 0 or t1 >= len(sigma):
        raise ParameterError(f"window [{t0}, {t1}] outside a series of length {len(sigma)}")
    seg = sigma[t0:t1 + 1]
    span = float(seg.max() - seg.min())
    if span == 0.0:
        return []
    peaks, _ = find_peaks(seg, prominence=PEAK_PROMINENCE * span)
    return [int(t0 + k) for k in peaks]


def canonical_phase(q: int, p: int) -> CanonicalPhase:
    """Equivalent phase fraction ``q/p`` (of 2*pi) with an even denominator.

    Fractions at or above 1/2 are first folded into ``[0, 1/2)`` with the
    pi-shift symmetry; an odd denominator is then traded for ``(2q-p)/(2p)``.
    """
    if p < 1 or q < 0:
        raise ParameterError(f"need p >= 1 and q >= 0, got {q}/{p}")
    if math.gcd(q, p) != 1:
        raise ParameterError(f"{q}/{p} is not in lowest terms")
    frac = Fraction(q, p)
    shifted = False
    if frac >= Fraction(1, 2):
        frac -= Fraction(math.floor(2 * frac), 2)
        shifted = True
    if frac.denominator % 2 == 1:
        frac = Fraction(2 * frac.numerator - frac.denominator, 2 * frac.denominator)
        shifted = True
    return CanonicalPhase(frac.numerator, frac.denominator, shifted)


def quasiperiod_report(sigma: Sequence[float], traj: Trajectory, q: int, p: int,
                       M: int) -> QuasiperiodReport:
    times = sigma_peak_times(sigma, (0, p))
    return QuasiperiodReport(p, q, times, len(times), return_probability(traj, p, M))
