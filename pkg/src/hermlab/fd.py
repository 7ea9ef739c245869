"""Central finite-difference oracles for derivative checking.

These rebuild jet data from value-only evaluations on a real-coordinate
stencil, independently of the jet arithmetic they are used to check.
"""

from __future__ import annotations

import numpy as np

from .jets import Jet2, wirtinger_from_real

DEFAULT_STEP = 1e-4


def _shift(p, a, h):
    """Shift point ``p`` along real coordinate a (x_k for even a, y_k odd)."""
    q = np.array(p, dtype=complex)
    k, im = divmod(a, 2)
    q[k] += 1j * h if im else h
    return q


def fd_real_derivatives(f, p, n, h=DEFAULT_STEP):
    """First and second derivatives of ``f`` along the 2n real coordinates."""
    m = 2 * n
    f0 = complex(f(np.asarray(p, dtype=complex)))
    d1 = np.zeros(m, dtype=complex)
    d2 = np.zeros((m, m), dtype=complex)
    plus = np.zeros(m, dtype=complex)
    minus = np.zeros(m, dtype=complex)
    for a in range(m):
        plus[a] = f(_shift(p, a, h))
        minus[a] = f(_shift(p, a, -h))
        d1[a] = (plus[a] - minus[a]) / (2 * h)
        d2[a, a] = (plus[a] - 2 * f0 + minus[a]) / (h * h)
    for a in range(m):
        for b in range(a + 1, m):
            fpp = f(_shift(_shift(p, a, h), b, h))
            fpm = f(_shift(_shift(p, a, h), b, -h))
            fmp = f(_shift(_shift(p, a, -h), b, h))
            fmm = f(_shift(_shift(p, a, -h), b, -h))
            d2[a, b] = d2[b, a] = (fpp - fpm - fmp + fmm) / (4 * h * h)
    return f0, d1, d2


def fd_jet(f, p, n, h=DEFAULT_STEP):
    """Order-2 jet of the scalar field ``f`` built by finite differences."""
    f0, rd1, rd2 = fd_real_derivatives(f, p, n, h)
    B = wirtinger_from_real(n)
    d1 = B @ rd1
    d2 = B @ rd2 @ B.T
    d2 = (d2 + d2.T) / 2
    return Jet2(n, f0, d1, d2, 2)


def fd_direction_derivative(f, p, direction, h=DEFAULT_STEP):
    """Central derivative of vector-valued ``f`` along a complex direction.

    ``direction`` is a vector in C^n; the derivative taken is the real
    directional derivative along the real part of the complexified step,
    i.e. f is sampled at p +/- h * direction.
    """
    fp = np.asarray(f(np.asarray(p, dtype=complex) + h * direction))
    fm = np.asarray(f(np.asarray(p, dtype=complex) - h * direction))
    return (fp - fm) / (2 * h)
