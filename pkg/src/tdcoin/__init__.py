"""Discrete-time quantum walks with time-dependent coins.

Walk engines and lattice states live in :mod:`tdcoin.walk`, distributions and
quasiperiod diagnostics in :mod:`tdcoin.observables`, the long-wavelength
continuum solution in :mod:`tdcoin.continuum` (with the complex Airy function
in :mod:`tdcoin.airy`), and experiment plumbing in :mod:`tdcoin.config`,
:mod:`tdcoin.experiments`, :mod:`tdcoin.output` and :mod:`tdcoin.cli`.
"""

__version__ = "0.1.0"

from .errors import (AccuracyError, AiryRangeError, DomainError, ExtentError,  # noqa: E402
                     ParameterError, WalkError)
from .walk import (CONTROL, DECOUPLED, GQW, STANDARD, TIME_DEP_COIN, CoinParams,  # noqa: E402
                   Engine, EngineKind, Gauge, Lattice, Schedule, Trajectory, WalkState,
                   decoupled_step, evolve, gauge_transform, rational_phase, run, step,
                   symmetric_initial)

__all__ = [
    "AccuracyError", "AiryRangeError", "DomainError", "ExtentError", "ParameterError",
    "WalkError", "CONTROL", "DECOUPLED", "GQW", "STANDARD", "TIME_DEP_COIN", "CoinParams",
    "Engine", "EngineKind", "Gauge", "Lattice", "Schedule", "Trajectory", "WalkState",
    "decoupled_step", "evolve", "gauge_transform", "rational_phase", "run", "step",
    "symmetric_initial",
]
