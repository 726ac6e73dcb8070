"""Lattice states, unitary building blocks and walk engines.

A state holds two complex arrays ``u`` and ``d`` indexed by lattice site.  On a
line of extent ``E`` the arrays cover sites ``-E..E``; on a circle of half-size
``L`` they cover ``-L..L`` with ``+L`` wrapping to ``-L``.

Phases can be given either as a float (radians) or as a
:class:`fractions.Fraction` ``q/p`` meaning ``2*pi*q/p``.  Rational phases are
reduced with integer arithmetic before any trigonometry, so ``phi0 * k`` never
accumulates floating-point drift however large ``k`` gets.
"""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterator, Union

import numpy as np

from .errors import ExtentError, ParameterError

TWO_PI = 2.0 * math.pi

Phase = Union[float, Fraction]


def phase_angles(phi0: Phase, k) -> np.ndarray:
    """Return the angles ``phi0 * k`` for integer ``k`` (scalar or array)."""
    k = np.asarray(k, dtype=np.int64)
    if isinstance(phi0, Fraction):
        p = phi0.denominator
        return TWO_PI * ((phi0.numerator * k) % p) / p
    return float(phi0) * k


def phase_radians(phi0: Phase) -> float:
    if isinstance(phi0, Fraction):
        return TWO_PI * float(phi0)
    return float(phi0)


def rational_phase(q: int, p: int) -> Fraction:
    """Exact phase ``2*pi*q/p``; ``q`` and ``p`` must already be coprime."""
    if p < 1:
        raise ParameterError(f"phase denominator must be >= 1, got {p}")
    if math.gcd(q, p) != 1:
        raise ParameterError(f"phase {q}/{p} is not in lowest terms")
    return Fraction(q, p)


class Schedule(enum.Enum):
    STATIC = "static"
    LINEAR = "linear"
    INVERSE_LINEAR = "inverse-linear"


class Gauge(enum.Enum):
    PLAIN = "plain"
    WOJCIK = "wojcik"


class EngineKind(enum.Enum):
    STANDARD = "standard"
    TIME_DEP_COIN = "timedep"
    GQW = "gqw"
    CONTROL = "control"
    DECOUPLED = "decoupled"


@dataclass(frozen=True)
class Engine:
    """Engine selector; ``exponent`` is the power of ``n`` in the GQW phase."""

    kind: EngineKind
    exponent: int = 1

    def __post_init__(self):
        if self.exponent not in (1, 2):
            raise ParameterError(f"phase exponent must be 1 or 2, got {self.exponent}")

    @classmethod
    def parse(cls, text: str) -> "Engine":
        name = text.strip().lower()
        if name in ("gqw2", "romanelli"):
            return cls(EngineKind.GQW, 2)
        aliases = {"time-dep-coin": "timedep", "timedepcoin": "timedep"}
        try:
            return cls(EngineKind(aliases.get(name, name)))
        except ValueError:
            choices = ", ".join(k.value for k in EngineKind)
            raise ParameterError(f"unknown engine {text!r} (choose from {choices}, gqw2)") from None

    @property
    def name(self) -> str:
        if self.kind is EngineKind.GQW and self.exponent == 2:
            return "gqw2"
        return self.kind.value


STANDARD = Engine(EngineKind.STANDARD)
TIME_DEP_COIN = Engine(EngineKind.TIME_DEP_COIN)
GQW = Engine(EngineKind.GQW)
CONTROL = Engine(EngineKind.CONTROL)
DECOUPLED = Engine(EngineKind.DECOUPLED)


@dataclass(frozen=True)
class CoinParams:
    rho: float = 0.5
    phi0: Phase = 0.0
    schedule: Schedule = Schedule.LINEAR

    def __post_init__(self):
        if not 0.0 <= self.rho <= 1.0:
            raise ParameterError(f"rho must lie in [0, 1], got {self.rho}")
        if not isinstance(self.phi0, Fraction) and not math.isfinite(self.phi0):
            raise ParameterError(f"phi0 must be finite, got {self.phi0}")

    @property
    def phi0_radians(self) -> float:
        return phase_radians(self.phi0)


@dataclass(frozen=True)
class Lattice:
    kind: str
    half: int

    def __post_init__(self):
        if self.kind not in ("line", "circle"):
            raise ParameterError(f"lattice kind must be 'line' or 'circle', got {self.kind!r}")
        if self.half < (1 if self.kind == "circle" else 0):
            raise ParameterError(f"lattice too small: {self.kind} with half-size {self.half}")

    @classmethod
    def line(cls, extent: int) -> "Lattice":
        return cls("line", extent)

    @classmethod
    def circle(cls, L: int) -> "Lattice":
        return cls("circle", L)

    @property
    def size(self) -> int:
        return 2 * self.half + 1

    @property
    def sites(self) -> np.ndarray:
        return np.arange(-self.half, self.half + 1)

    def index(self, n: int) -> int:
        return n + self.half


@dataclass
class WalkState:
    t: int
    lattice: Lattice
    u: np.ndarray
    d: np.ndarray
    gauge: Gauge = Gauge.PLAIN

    def norm(self) -> float:
        return float(np.sum(np.abs(self.u) ** 2) + np.sum(np.abs(self.d) ** 2))

    def with_amplitudes(self, u, d, **changes) -> "WalkState":
        return replace(self, u=u, d=d, **changes)

    @classmethod
    def localized(cls, lattice: Lattice, u0: complex = 1 / math.sqrt(2),
                  d0: complex = 1j / math.sqrt(2), site: int = 0) -> "WalkState":
        """Coin state ``(u0, d0)`` placed on a single site at ``t=0``."""
        total = abs(u0) ** 2 + abs(d0) ** 2
        if abs(total - 1.0) > 1e-12:
            raise ParameterError(f"initial coin state not normalized: |u0|^2+|d0|^2 = {total!r}")
        u = np.zeros(lattice.size, dtype=np.complex128)
        d = np.zeros(lattice.size, dtype=np.complex128)
        u[lattice.index(site)] = u0
        d[lattice.index(site)] = d0
        return cls(0, lattice, u, d)


def symmetric_initial(lattice: Lattice) -> WalkState:
    """``u_n(0)=delta/sqrt2, d_n(0)=i*delta/sqrt2`` -- the symmetric initial condition."""
    return WalkState.localized(lattice)


@dataclass
class Trajectory:
    engine: Engine
    params: CoinParams
    stride: int
    states: list = field(default_factory=list)

    @property
    def times(self) -> list:
        return [s.t for s in self.states]

    def at(self, t: int) -> WalkState:
        if t % self.stride:
            raise ParameterError(f"t={t} not recorded with stride {self.stride}")
        k = t // self.stride
        if k >= len(self.states) or self.states[k].t != t:
            raise ParameterError(f"t={t} outside the recorded range")
        return self.states[k]


# ---------------------------------------------------------------- operators

def coin_matrix(rho: float) -> np.ndarray:
    if not 0.0 <= rho <= 1.0:
        raise ParameterError(f"rho must lie in [0, 1], got {rho}")
    a, b = math.sqrt(rho), math.sqrt(1.0 - rho)
    return np.array([[a, b], [b, -a]], dtype=np.complex128)


def time_coin(params: CoinParams, t: int) -> np.ndarray:
    """Coin applied when producing the state at time ``t``.

    LINEAR gives ``diag(e^{-i phi0 t}, e^{+i phi0 t}) C``, INVERSE_LINEAR the
    conjugate phases, STATIC the plain coin.
    """
    if t < 1:
        raise ParameterError(f"time_coin needs t >= 1, got {t}")
    c = coin_matrix(params.rho)
    if params.schedule is Schedule.STATIC:
        return c
    theta = float(phase_angles(params.phi0, t))
    if params.schedule is Schedule.INVERSE_LINEAR:
        theta = -theta
    phases = np.array([np.exp(-1j * theta), np.exp(1j * theta)])
    return phases[:, None] * c


def apply_coin(coin: np.ndarray, state: WalkState) -> WalkState:
    u, d = state.u, state.d
    return state.with_amplitudes(coin[0, 0] * u + coin[0, 1] * d,
                                 coin[1, 0] * u + coin[1, 1] * d)


def shift(state: WalkState) -> WalkState:
    """Conditional displacement: ``u`` moves one site right, ``d`` one site left."""
    u, d = state.u, state.d
    if state.lattice.kind == "circle":
        return state.with_amplitudes(np.roll(u, 1), np.roll(d, -1))
    if u[0] != 0 or u[-1] != 0 or d[0] != 0 or d[-1] != 0:
        raise ExtentError(
            f"amplitude on the boundary of a line of extent {state.lattice.half} at t={state.t}")
    nu = np.empty_like(u)
    nd = np.empty_like(d)
    nu[0] = 0
    nu[1:] = u[:-1]
    nd[-1] = 0
    nd[:-1] = d[1:]
    return state.with_amplitudes(nu, nd)


@functools.lru_cache(maxsize=64)
def _phase_factors(lattice: Lattice, phi0: Phase, s: int) -> np.ndarray:
    factor = np.exp(1j * phase_angles(phi0, lattice.sites ** s))
    factor.setflags(write=False)
    return factor


def position_phase(state: WalkState, phi0: Phase, s: int = 1) -> WalkState:
    """Multiply both components at site ``n`` by ``exp(i phi0 n^s)``."""
    if s not in (1, 2):
        raise ParameterError(f"phase exponent must be 1 or 2, got {s}")
    factor = _phase_factors(state.lattice, phi0, s)
    return state.with_amplitudes(factor * state.u, factor * state.d)


def _engine_ops(engine: Engine, params: CoinParams, t: int):
    """Coin matrix and optional (phi0, exponent) position phase for one step."""
    kind = engine.kind
    if kind is EngineKind.STANDARD:
        return coin_matrix(params.rho), None
    if kind is EngineKind.TIME_DEP_COIN:
        return time_coin(params, t), None
    if kind is EngineKind.GQW:
        return coin_matrix(params.rho), (params.phi0, engine.exponent)
    if kind is EngineKind.CONTROL:
        inverse = replace(params, schedule=Schedule.INVERSE_LINEAR)
        return time_coin(inverse, t), (params.phi0, 1)
    raise ParameterError("the decoupled engine advances through decoupled_step")


def step(engine: Engine, params: CoinParams, state: WalkState) -> WalkState:
    """Advance ``state`` from ``t-1`` to ``t``.

    Operator order per engine: Standard ``S C``; TimeDepCoin ``S C(t)``;
    GQW ``S C E0``; Control ``S (C0^dagger)^t C E0``.
    """
    t = state.t + 1
    coin, phase = _engine_ops(engine, params, t)
    gauge = Gauge.WOJCIK if engine.kind is EngineKind.GQW else Gauge.PLAIN
    lattice = state.lattice
    if lattice.kind == "circle":
        moved = state if phase is None else position_phase(state, *phase)
        out = shift(apply_coin(coin, moved))
        out.t, out.gauge = t, gauge
        return out

    # line: touch only the occupied window, everything outside stays exactly zero
    occupied = np.flatnonzero((state.u != 0) | (state.d != 0))
    if occupied.size == 0:
        raise ParameterError("cannot step an all-zero state")
    lo, hi = int(occupied[0]), int(occupied[-1]) + 1
    if lo == 0 or hi == lattice.size:
        raise ExtentError(f"amplitude on the boundary of a line of extent {lattice.half} at t={state.t}")
    u, d = state.u[lo:hi], state.d[lo:hi]
    if phase is not None:
        f = _phase_factors(lattice, *phase)[lo:hi]
        u, d = f * u, f * d
    nu = np.zeros_like(state.u)
    nd = np.zeros_like(state.d)
    nu[lo + 1:hi + 1] = coin[0, 0] * u + coin[0, 1] * d
    nd[lo - 1:hi - 1] = coin[1, 0] * u + coin[1, 1] * d
    return WalkState(t, lattice, nu, nd, gauge)


def gauge_transform(state: WalkState, phi0: Phase) -> WalkState:
    """Map between the time-dependent-coin and the GQW descriptions.

    A PLAIN state is multiplied by ``exp(+i n t phi0)`` and tagged WOJCIK; a
    WOJCIK state gets the inverse phase.  Probabilities are untouched.
    """
    n = state.lattice.sites
    theta = phase_angles(phi0, n * state.t)
    if state.gauge is Gauge.PLAIN:
        factor, gauge = np.exp(1j * theta), Gauge.WOJCIK
    else:
        factor, gauge = np.exp(-1j * theta), Gauge.PLAIN
    return state.with_amplitudes(factor * state.u, factor * state.d, gauge=gauge)


def decoupled_step(prev: np.ndarray, curr: np.ndarray, t: int, params: CoinParams,
                   component: str, lattice: Lattice | None = None) -> np.ndarray:
    """One step of the second-order recurrence for a single coin component.

    Given ``a(t-1)`` and ``a(t)`` returns ``a(t+1)``:

        a_n(t+1) = e^{-+i phi0} { a_n(t-1) + sqrt(rho) [a_{n-1}(t) e^{-i t phi0}
                                                       - a_{n+1}(t) e^{+i t phi0}] }

    with the upper sign for ``component='u'`` and the lower for ``'d'``.
    Neighbours beyond a line's ends are zero; on a circle they wrap.
    """
    if component not in ("u", "d"):
        raise ParameterError(f"component must be 'u' or 'd', got {component!r}")
    prev = np.asarray(prev)
    curr = np.asarray(curr)
    if prev.shape != curr.shape or prev.ndim != 1:
        raise ParameterError(f"slice shapes differ: {prev.shape} vs {curr.shape}")
    circle = lattice is not None and lattice.kind == "circle"
    if circle:
        left = np.roll(curr, 1)    # a_{n-1}
        right = np.roll(curr, -1)  # a_{n+1}
    else:
        left = np.zeros_like(curr)
        right = np.zeros_like(curr)
        left[1:] = curr[:-1]
        right[:-1] = curr[1:]
    theta = float(phase_angles(params.phi0, t))
    phi = float(phase_angles(params.phi0, 1))
    rot = np.exp(-1j * phi) if component == "u" else np.exp(1j * phi)
    return rot * (prev + math.sqrt(params.rho) * (left * np.exp(-1j * theta)
                                                  - right * np.exp(1j * theta)))


def evolve(engine: Engine, params: CoinParams, initial: WalkState,
           steps: int) -> Iterator[WalkState]:
    """Yield the states at ``t = initial.t, ..., initial.t + steps``."""
    if steps < 0:
        raise ParameterError(f"steps must be >= 0, got {steps}")
    state = initial
    if engine.kind is EngineKind.GQW:
        state = replace(state, gauge=Gauge.WOJCIK) if state.t == 0 else state
    yield state
    if engine.kind is EngineKind.DECOUPLED:
        yield from _evolve_decoupled(params, state, steps)
        return
    for _ in range(steps):
        state = step(engine, params, state)
        yield state


def _evolve_decoupled(params: CoinParams, initial: WalkState, steps: int):
    # seeds a(t0), a(t0+1) come from one coupled step
    if steps == 0:
        return
    seed = step(TIME_DEP_COIN, params, initial)
    yield seed
    lattice = initial.lattice
    pu, pd = initial.u, initial.d
    cu, cd = seed.u, seed.d
    for t in range(seed.t, initial.t + steps):
        if lattice.kind == "line" and (cu[0] != 0 or cu[-1] != 0 or cd[0] != 0 or cd[-1] != 0):
            raise ExtentError(f"decoupled recurrence reached the line boundary at t={t}")
        nu = decoupled_step(pu, cu, t, params, "u", lattice)
        nd = decoupled_step(pd, cd, t, params, "d", lattice)
        pu, pd, cu, cd = cu, cd, nu, nd
        yield WalkState(t + 1, lattice, nu, nd)


def run(engine: Engine, params: CoinParams, initial: WalkState, steps: int,
        stride: int = 1) -> Trajectory:
    """Iterate an engine and keep every ``stride``-th state."""
    if stride < 1:
        raise ParameterError(f"stride must be >= 1, got {stride}")
    if initial.lattice.kind == "line" and initial.lattice.half < initial.t + steps:
        raise ParameterError(
            f"line extent {initial.lattice.half} is smaller than the final time {initial.t + steps}")
    traj = Trajectory(engine, params, stride)
    for state in evolve(engine, params, initial, steps):
        if (state.t - initial.t) % stride == 0:
            traj.states.append(state)
    return traj
