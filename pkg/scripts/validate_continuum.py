"""Cross-check the continuum solution three ways and print the worst errors.

1. Airy closed form of Z against Simpson quadrature on a (w, tau, xi') grid.
2. Reconstructed fields against an FFT propagation of the same equation.
3. Exact walk against the continuum density at a few snapshot times.
"""

import argparse
import math
from fractions import Fraction

import numpy as np

from tdcoin.continuum import (BETA_MIN, QUAD_RTOL, Grid, _fields, compare_with_walk,
                              initial_field, reconstruct, seeds_for, z_closed, z_params,
                              z_quadrature)
from tdcoin.observables import distribution
from tdcoin.walk import GQW, CoinParams, Lattice, run, symmetric_initial


def closed_vs_quadrature(rho, phi, widths, taus, xi):
    floor = 1e-15 * math.sqrt(math.pi) / QUAD_RTOL
    worst, count = 0.0, 0
    for w in widths:
        for tau in taus:
            for sign in (1, -1):
                zp = z_params(xi, tau, w, rho, phi, sign)
                if abs(zp.beta) < BETA_MIN:
                    continue
                a, b = z_closed(zp), z_quadrature(zp)
                keep = np.abs(b) >= floor
                count += int(keep.sum())
                if keep.any():
                    worst = max(worst, float(np.max(np.abs(a - b)[keep] / np.abs(b)[keep])))
    return worst, count


def spectral(field0, dx, tau, w, rho, phi, sign):
    """FFT solution of the continuum equation for one field."""
    k = 2 * np.pi * np.fft.fftfreq(field0.size, dx)
    s, c = math.sin(phi * tau), math.cos(phi * tau)
    r = math.sqrt(rho) / phi
    theta = r * (-s * k + s * k ** 3 / 6 - (c - 1) * k ** 2 / 2)
    # global phase carried by the Gaussian prefactor of Z
    return np.fft.ifft(np.fft.fft(field0) * np.exp(sign * 1j * (theta + r * (c - 1))))


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--rho", type=float, default=0.5)
    parser.add_argument("--p", type=int, default=150, help="phi0 = 2*pi/p")
    parser.add_argument("--w", type=float, default=0.65)
    args = parser.parse_args()
    phase = Fraction(1, args.p)
    phi = 2 * math.pi / args.p

    worst, count = closed_vs_quadrature(args.rho, phi, (0.45, args.w, 0.85),
                                        range(3, args.p, 7), np.linspace(-60, 60, 25))
    print(f"closed vs quadrature: worst relative {worst:.3g} over {count} points")

    seeds = seeds_for(symmetric_initial(Lattice.line(2)), CoinParams(args.rho, phase), args.w)
    dx = 0.05
    xi = np.arange(-400, 400, dx)
    inner = np.abs(xi) <= 100
    for tau in (args.p // 7, args.p // 4, args.p // 2):
        err = 0.0
        for seed in seeds:
            for sign in (1, -1):
                ref = spectral(initial_field(seed, xi, sign), dx, tau, args.w, args.rho, phi, sign)
                err = max(err, float(np.max(np.abs(_fields(seed, xi[inner], tau, args.rho, phase, sign)
                                                   - ref[inner]))))
        print(f"tau={tau:4d}: fields vs FFT propagation max abs {err:.3g}")

    traj = run(GQW, CoinParams(args.rho, phase), symmetric_initial(Lattice.line(args.p + 1)), args.p)
    grid = Grid(-240, 240, 0.25)
    for t in range(10, args.p + 1, 20):
        sl = reconstruct(seeds, t, grid, args.rho, phase)
        dist = distribution(traj.at(t))
        cmp = compare_with_walk(sl, dist.sites, dist.probs)
        print(f"t={t:4d}: L1 {cmp.l1:.4f}  peaks exact {cmp.exact_peaks} continuum {cmp.continuum_peaks}")


if __name__ == "__main__":
    main()
