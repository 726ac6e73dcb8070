"""Long-wavelength continuum solution of the time-dependent-coin walk.

Each coin component ``a`` (``u`` or ``d``) is written as ``A+ + (-1)^t A-``
and every field is propagated from a Gaussian-smeared initial condition.  The
propagated fields reduce to the oscillatory integral

    Z±(xi', tau) = int dq exp[i alpha q - (i/3) beta q^3 - (1 ± i gamma) q^2]

which is evaluated either in closed form (an Airy function times an
exponential) or, near ``beta = 0`` where the closed form degenerates, by
direct quadrature.  For a rational phase ``2 pi q/p`` the times where
``sin(phi0 tau)`` vanishes are detected exactly; there ``beta = 0`` and the
integral is the Gaussian ``sqrt(pi/c) exp(-alpha^2 / 4c)`` with ``c = 1 ± i gamma``.

Field normalisation keeps the Gaussian constants, so at ``tau = 0`` the
reconstructed fields equal ``A±(xi, 0) = [a0(0) G0 ± a1(1) G1 ± a-1(1) G-1] / 2``
with ``G_m = exp(-(xi - m)^2 / (4 w^2))``.  Densities are renormalised per
slice, so the overall constant only matters for that identity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .airy import airy_parts
from .errors import AccuracyError, DomainError, ParameterError
from .walk import TIME_DEP_COIN, CoinParams, Phase, WalkState, phase_radians, step

BETA_MIN = 1e-3
Q_CUTOFF = 6.5
QUAD_MIN_START = 2 ** 12
QUAD_CAP = 2 ** 18
QUAD_RTOL = 1e-8
_CHUNK_ELEMENTS = 2 ** 21


@dataclass(frozen=True)
class GaussianSeed:
    """Initial data for one coin component: ``a0(0)``, ``a_{+1}(1)``, ``a_{-1}(1)``."""

    w: float
    a0: complex
    a_plus: complex
    a_minus: complex


@dataclass(frozen=True)
class ZParams:
    alpha: np.ndarray | float
    beta: float
    gamma: float
    sign: int = 1


@dataclass(frozen=True)
class Grid:
    xmin: float
    xmax: float
    spacing: float

    @property
    def points(self) -> np.ndarray:
        n = int(round((self.xmax - self.xmin) / self.spacing))
        return self.xmin + self.spacing * np.arange(n + 1)


@dataclass
class ContinuumSlice:
    tau: int
    grid: Grid
    xi: np.ndarray
    Uplus: np.ndarray
    Uminus: np.ndarray
    Dplus: np.ndarray
    Dminus: np.ndarray
    density: np.ndarray

    def density_at(self, x) -> np.ndarray:
        return np.interp(x, self.xi, self.density, left=0.0, right=0.0)

    @property
    def edge_fraction(self) -> float:
        """Density at the grid ends relative to its maximum; large means truncation."""
        return float(max(self.density[0], self.density[-1]) / self.density.max())


def seed_fields(initial: WalkState, after_one_step: WalkState, w: float):
    """Gaussian seeds ``(seed_u, seed_d)`` from ``a(0)`` and one coupled step ``a(1)``."""
    if w <= 0:
        raise ParameterError(f"Gaussian width must be positive, got {w}")
    lat = initial.lattice
    origin = lat.index(0)
    for comp in (initial.u, initial.d):
        rest = np.delete(comp, origin)
        if np.any(rest != 0):
            raise ParameterError("continuum seeds need an initial state localized at n=0")
    if after_one_step.t != initial.t + 1:
        raise ParameterError("after_one_step must be one step past the initial state")
    i0, ip, im = origin, lat.index(1), lat.index(-1)
    seeds = []
    for a0, a1 in ((initial.u, after_one_step.u), (initial.d, after_one_step.d)):
        seeds.append(GaussianSeed(w, complex(a0[i0]), complex(a1[ip]), complex(a1[im])))
    return tuple(seeds)


def seeds_for(initial: WalkState, params: CoinParams, w: float):
    """Seeds with ``a(1)`` produced by one time-dependent-coin step."""
    return seed_fields(initial, step(TIME_DEP_COIN, params, initial), w)


def initial_field(seed: GaussianSeed, xi, sign: int) -> np.ndarray:
    xi = np.asarray(xi, dtype=float)
    g = lambda m: np.exp(-((xi - m) ** 2) / (4 * seed.w ** 2))
    return 0.5 * (seed.a0 * g(0) + sign * (seed.a_plus * g(1) + seed.a_minus * g(-1)))


def _trig(phi0: Phase, tau: float) -> tuple[float, float]:
    """``(sin, cos)`` of ``phi0 * tau``, exact at multiples of pi for rational phases."""
    if isinstance(phi0, Fraction) and int(tau) == tau:
        turns = (phi0 * int(tau)) % 1
        if turns == 0:
            return 0.0, 1.0
        if turns == Fraction(1, 2):
            return 0.0, -1.0
        angle = 2 * math.pi * float(turns)
    else:
        angle = phase_radians(phi0) * tau
    return math.sin(angle), math.cos(angle)


def z_params(xi_prime, tau: float, w: float, rho: float, phi0: Phase, sign: int = 1) -> ZParams:
    """Parameters of Z± at shifted position ``xi'`` and time ``tau``.

    ``phi0`` is radians, or a :class:`~fractions.Fraction` ``q/p`` for ``2 pi q/p``.
    """
    if w <= 0:
        raise ParameterError(f"Gaussian width must be positive, got {w}")
    if phi0 == 0:
        raise ParameterError("the continuum solution requires phi0 != 0")
    s, c = _trig(phi0, tau)
    k = math.sqrt(rho) / phase_radians(phi0)
    alpha = np.asarray(xi_prime, dtype=float) / w - k * s / w
    if alpha.ndim == 0:
        alpha = float(alpha)
    return ZParams(alpha, -k * s / (2 * w ** 3), k * (c - 1) / (2 * w ** 2), sign)


def _row_sums(alpha: np.ndarray, q: np.ndarray, zp: ZParams) -> np.ndarray:
    """sum_j f(alpha_i, q_j) for every row, in memory-bounded chunks."""
    phase = -(zp.beta / 3) * q ** 3 - zp.sign * zp.gamma * q ** 2
    gauss = np.exp(-q ** 2)
    out = np.empty(len(alpha), dtype=np.complex128)
    rows = max(1, _CHUNK_ELEMENTS // len(q))
    for start in range(0, len(alpha), rows):
        arg = np.multiply.outer(alpha[start:start + rows], q)
        arg += phase
        out[start:start + rows] = np.cos(arg) @ gauss + 1j * (np.sin(arg) @ gauss)
    return out


def _start_intervals(alpha: np.ndarray, zp: ZParams) -> int:
    # largest |d phase / dq| on |q| <= Q_CUTOFF, sampled at the Nyquist rate
    freq = (np.max(np.abs(alpha), initial=0.0) + abs(zp.beta) * Q_CUTOFF ** 2
            + 2 * abs(zp.gamma) * Q_CUTOFF)
    needed = 2 * Q_CUTOFF * freq / math.pi
    n = QUAD_MIN_START
    while n < needed and n < QUAD_CAP:
        n *= 2
    return n


def z_quadrature(zp: ZParams, rtol: float = QUAD_RTOL):
    """Z±(alpha, beta, gamma) by composite Simpson on ``|q| <= 6.5``.

    The starting grid puts at least two nodes in the shortest period of the
    integrand's phase, so a coarse grid cannot alias two estimates into false
    agreement.  It doubles until successive estimates agree to ``rtol`` (plus
    a 1e-15 floor relative to the integrand's L1 mass, for far-tail points
    whose value is below double-precision resolution).  Raises
    :class:`AccuracyError` if 2^18 intervals are not enough.
    """
    alpha = np.atleast_1d(np.asarray(zp.alpha, dtype=float)).ravel()
    n = _start_intervals(alpha, zp)
    h = 2 * Q_CUTOFF / n
    q = np.linspace(-Q_CUTOFF, Q_CUTOFF, n + 1)
    ends = _row_sums(alpha, q[[0, -1]], zp)
    odd = _row_sums(alpha, q[1:-1:2], zp)
    even = _row_sums(alpha, q[2:-1:2], zp)
    est = h / 3 * (ends + 4 * odd + 2 * even)
    interior = odd + even
    prev = est
    mass = math.sqrt(math.pi)  # L1 norm of the integrand
    result = np.empty_like(est)
    active = np.arange(len(alpha))
    while True:
        if 2 * n > QUAD_CAP:
            raise AccuracyError(
                f"Z quadrature not converged with {n} intervals (alpha={float(alpha[active[0]])!r}, "
                f"beta={zp.beta!r}, gamma={zp.gamma!r})", estimates=(prev[0], est[0]))
        n *= 2
        h /= 2
        mid = _row_sums(alpha[active], -Q_CUTOFF + h * np.arange(1, n, 2), zp)
        prev = est
        est = h / 3 * (ends + 4 * mid + 2 * interior)
        interior = interior + mid
        done = np.abs(est - prev) <= rtol * np.abs(est) + 1e-15 * mass
        result[active[done]] = est[done]
        if done.all():
            break
        keep = ~done
        active, ends, interior, est, prev = (active[keep], ends[keep], interior[keep],
                                             est[keep], prev[keep])
    if np.ndim(zp.alpha) == 0:
        return complex(result[0])
    return result.reshape(np.shape(zp.alpha))


def z_closed(zp: ZParams):
    """Closed form ``2 pi |beta|^(-1/3) Ai(a) exp(b)`` of the Z integral.

    Requires ``|beta| >= BETA_MIN``; smaller values raise :class:`DomainError`
    and should go through :func:`z_quadrature` instead.
    """
    al, be, ga, s = np.asarray(zp.alpha, dtype=float), zp.beta, zp.gamma, zp.sign
    if abs(be) < BETA_MIN:
        raise DomainError(f"|beta|={abs(be):.3g} below {BETA_MIN}; use z_quadrature")
    ab = abs(be)
    a = (1 - al * be - ga ** 2 + s * 2j * ga) / ab ** (4 / 3)
    b = ((2 - 3 * al * be - 6 * ga ** 2) / (3 * be ** 2)
         - s * 1j * ga * (3 * al * be + 2 * ga ** 2 - 6) / (3 * be ** 2))
    mant, expo = airy_parts(a)
    with np.errstate(under="ignore"):
        out = 2 * math.pi / ab ** (1 / 3) * mant * np.exp(expo + b)
    return complex(out) if out.ndim == 0 else out


def z_gaussian(zp: ZParams):
    """Exact Z at ``beta = 0``: ``sqrt(pi/c) exp(-alpha^2 / (4c))``, ``c = 1 ± i gamma``."""
    if zp.beta != 0:
        raise DomainError(f"the Gaussian form needs beta == 0, got {zp.beta!r}")
    c = 1 + zp.sign * 1j * zp.gamma
    out = np.sqrt(np.pi / c) * np.exp(-np.asarray(zp.alpha, dtype=float) ** 2 / (4 * c))
    return complex(out) if np.ndim(out) == 0 else out


def z_value(zp: ZParams):
    """Closed form where well conditioned, quadrature for small nonzero beta."""
    if zp.beta == 0:
        return z_gaussian(zp)
    if abs(zp.beta) >= BETA_MIN:
        return z_closed(zp)
    return z_quadrature(zp)


def _fields(seed: GaussianSeed, xi, tau, rho, phi0, sign):
    total = 0
    for m, amp in ((0, seed.a0), (1, sign * seed.a_plus), (-1, sign * seed.a_minus)):
        if amp == 0:
            continue
        zp = z_params(sign * (xi - m), tau, seed.w, rho, phi0, sign)
        total = total + amp * z_value(zp)
    gamma = z_params(0.0, tau, seed.w, rho, phi0).gamma
    return total * np.exp(sign * 2j * seed.w ** 2 * gamma) / (2 * math.sqrt(math.pi))


def reconstruct(seeds, tau: int, grid: Grid, rho: float, phi0: Phase) -> ContinuumSlice:
    """Continuum fields and renormalised density at integer time ``tau``."""
    if int(tau) != tau or tau < 0:
        raise ParameterError(f"continuum slices are evaluated at integer tau >= 0, got {tau}")
    tau = int(tau)
    seed_u, seed_d = seeds
    xi = grid.points
    up = _fields(seed_u, xi, tau, rho, phi0, 1)
    um = _fields(seed_u, xi, tau, rho, phi0, -1)
    dp = _fields(seed_d, xi, tau, rho, phi0, 1)
    dm = _fields(seed_d, xi, tau, rho, phi0, -1)
    parity = -1 if tau % 2 else 1
    raw = np.abs(up + parity * um) ** 2 + np.abs(dp + parity * dm) ** 2
    norm = np.trapezoid(raw, xi)
    if not norm > 0:
        raise AccuracyError(f"continuum density vanishes on the grid at tau={tau}")
    return ContinuumSlice(tau, grid, xi, up, um, dp, dm, raw / norm)


def continuum_sigma2(sl: ContinuumSlice) -> float:
    mean = np.trapezoid(sl.xi * sl.density, sl.xi)
    return float(np.trapezoid((sl.xi - mean) ** 2 * sl.density, sl.xi))


@dataclass
class WalkComparison:
    t: int
    l1: float
    exact_peaks: tuple
    continuum_peaks: tuple


def _side_peaks(n: np.ndarray, p: np.ndarray) -> tuple:
    left = n <= 0
    right = n >= 0
    return (int(n[left][np.argmax(p[left])]), int(n[right][np.argmax(p[right])]))


def compare_with_walk(sl: ContinuumSlice, sites: np.ndarray, probs: np.ndarray) -> WalkComparison:
    """Compare a slice with the exact distribution on parity-allowed sites.

    The continuum density is scaled as ``2 P(xi=n)`` (mass per two sites).
    Peaks are the argmax on each half-line, ``n <= 0`` and ``n >= 0``.
    """
    allowed = (sites - sl.tau) % 2 == 0
    n = sites[allowed]
    exact = probs[allowed]
    cont = 2 * sl.density_at(n.astype(float))
    return WalkComparison(sl.tau, float(np.abs(exact - cont).sum()),
                          _side_peaks(n, exact), _side_peaks(n, cont))
