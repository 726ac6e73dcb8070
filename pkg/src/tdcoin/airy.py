"""Airy function Ai(z) for complex arguments.

Three regimes, chosen per point from ``r = |z|`` and ``c = cos(1.5 |arg z|)``:

* ``r <= 3.5``: Maclaurin series.
* ``r >= 9``: asymptotic expansions -- the single-exponential form for
  ``|arg z| <= 2pi/3`` and the oscillatory form around the negative axis.
* ``3.5 < r < 9``: where ``c >= -0.35`` the pair (Ai, Ai') is taken from the
  asymptotic form at ``r = 9`` on the same ray and carried inwards by Taylor
  steps of ``y'' = z y`` (Ai does not shrink inwards there, so the
  continuation is stable); elsewhere the Maclaurin series, whose cancellation
  loss stays below ~1e-11 in that sector.

Large arguments over- or underflow long before the asymptotic series loses
accuracy, so :func:`airy_parts` returns Ai as ``mantissa * exp(exponent)``
and callers that multiply by another exponential can combine exponents first.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import AiryRangeError

R_SERIES = 3.5
R_ASYMPTOTIC = 9.0
C_SWITCH = -0.35

AI0 = 0.355028053887817239260063186004183176  # 3^(-2/3)/Gamma(2/3)
AIP0 = -0.258819403792806798405183560189203963  # -3^(-1/3)/Gamma(1/3)

_SQRT_PI = math.sqrt(math.pi)
_MAX_EXP = 709.78
_ODE_STEPS = 16
_TAYLOR_TERMS = 30


def _asymptotic_coefficients(n: int):
    u = [1.0]
    for k in range(1, n):
        u.append(u[-1] * (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / ((2 * k - 1) * 216 * k))
    v = [1.0] + [-(6 * k + 1) / (6 * k - 1) * u[k] for k in range(1, n)]
    return np.array(u), np.array(v)


_U, _V = _asymptotic_coefficients(48)


def _alternating_sum(coeffs, zeta, parity=None):
    """sum_k (-1)^k c_k zeta^-k, truncated where terms stop decreasing.

    ``parity`` 0 / 1 restricts to even / odd k with the sign (-1)^(k//2)
    used by the oscillatory expansions.
    """
    inv = 1.0 / zeta
    total = np.zeros_like(zeta)
    last = np.full(zeta.shape, np.inf)
    active = np.ones(zeta.shape, dtype=bool)
    power = np.ones_like(zeta)
    for k in range(len(coeffs)):
        if k:
            power = power * inv
        if parity is not None and k % 2 != parity:
            continue
        sign = (-1) ** (k // 2) if parity is not None else (-1) ** k
        term = sign * coeffs[k] * power
        mag = np.abs(term)
        active &= mag < last
        total = np.where(active, total + term, total)
        last = np.where(active, mag, last)
        active &= mag > 1e-18 * np.abs(total)
        if not active.any():
            break
    return total


def _asymptotic(z, derivative=False):
    """(mantissa, exponent) of Ai(z) or Ai'(z) for large |z|."""
    z = np.asarray(z, dtype=np.complex128)
    mant = np.empty_like(z)
    expo = np.empty_like(z)
    right = np.abs(np.angle(z)) <= 2 * math.pi / 3

    if right.any():
        zr = z[right]
        zeta = (2.0 / 3.0) * zr ** 1.5
        q = zr ** 0.25
        if derivative:
            mant[right] = -q * _alternating_sum(_V, zeta) / (2 * _SQRT_PI)
        else:
            mant[right] = _alternating_sum(_U, zeta) / (2 * _SQRT_PI * q)
        expo[right] = -zeta

    left = ~right
    if left.any():
        w = -z[left]
        zeta = (2.0 / 3.0) * w ** 1.5
        q = w ** 0.25
        x = zeta - math.pi / 4
        big = np.abs(x.imag)
        ep = np.exp(1j * x - big)
        em = np.exp(-1j * x - big)
        cos_x = (ep + em) / 2
        sin_x = (ep - em) / 2j
        if derivative:
            p = _alternating_sum(_V, zeta, parity=0)
            r = _alternating_sum(_V, zeta, parity=1)
            mant[left] = q * (sin_x * p - cos_x * r) / _SQRT_PI
        else:
            p = _alternating_sum(_U, zeta, parity=0)
            r = _alternating_sum(_U, zeta, parity=1)
            mant[left] = (cos_x * p + sin_x * r) / (_SQRT_PI * q)
        expo[left] = big
    return mant, expo


def _maclaurin(z):
    z = np.asarray(z, dtype=np.complex128)
    z3 = z ** 3
    f = np.ones_like(z)
    g = z.copy()
    tf = np.ones_like(z)
    tg = z.copy()
    for k in range(1, 60):
        tf = tf * z3 / ((3 * k - 1) * (3 * k))
        tg = tg * z3 / ((3 * k) * (3 * k + 1))
        f += tf
        g += tg
        if np.all(np.abs(tf) + np.abs(tg) <= 1e-17 * (np.abs(f) + np.abs(g))):
            break
    return AI0 * f + AIP0 * g


def _continue_inwards(z):
    """Taylor-integrate y'' = z y from the asymptotic radius down to ``z``."""
    z = np.asarray(z, dtype=np.complex128)
    z0 = z * (R_ASYMPTOTIC / np.abs(z))
    m, e = _asymptotic(z0)
    y = m * np.exp(e)
    m, e = _asymptotic(z0, derivative=True)
    dy = m * np.exp(e)
    h = (z - z0) / _ODE_STEPS
    at = z0
    zero = np.zeros_like(y)
    for _ in range(_ODE_STEPS):
        # local series y(at + s) = sum c_j s^j with c_{j+2} = (at c_j + c_{j-1}) / ((j+1)(j+2))
        cm1, c0, c1 = zero, y, dy
        new_y = y + dy * h
        new_dy = dy.copy()
        hk = h * h
        hp = h
        for k in range(_TAYLOR_TERMS):
            c2 = (at * c0 + cm1) / ((k + 1) * (k + 2))
            new_y = new_y + c2 * hk
            new_dy = new_dy + (k + 2) * c2 * hp
            hk = hk * h
            hp = hp * h
            cm1, c0, c1 = c0, c1, c2
        y, dy = new_y, new_dy
        at = at + h
    return y


def airy_parts(z):
    """Return ``(mantissa, exponent)`` with ``Ai(z) = mantissa * exp(exponent)``."""
    z = np.asarray(z, dtype=np.complex128)
    shape = z.shape
    z = z.ravel()
    mant = np.empty_like(z)
    expo = np.zeros_like(z)
    r = np.abs(z)
    c = np.cos(1.5 * np.abs(np.angle(z)))
    series = (r <= R_SERIES) | ((r < R_ASYMPTOTIC) & (c < C_SWITCH))
    asym = r >= R_ASYMPTOTIC
    ode = ~series & ~asym
    if series.any():
        mant[series] = _maclaurin(z[series])
    if asym.any():
        mant[asym], expo[asym] = _asymptotic(z[asym])
    if ode.any():
        mant[ode] = _continue_inwards(z[ode])
    return mant.reshape(shape), expo.reshape(shape)


def airy_ai(z):
    """Ai(z) for complex ``z`` (scalar or array).

    Raises :class:`AiryRangeError` when the result overflows a double.
    """
    scalar = np.ndim(z) == 0
    mant, expo = airy_parts(z)
    with np.errstate(divide="ignore"):
        log_mag = expo.real + np.log(np.abs(mant))
    if np.any(log_mag > _MAX_EXP):
        worst = np.asarray(z).ravel()[np.argmax(log_mag.ravel())]
        raise AiryRangeError(f"Ai(z) overflows at z={worst!r}")
    with np.errstate(under="ignore"):
        out = mant * np.exp(expo)
    return complex(out) if scalar else out
