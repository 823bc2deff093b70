"""Uniform radial grids, weighted quadrature and finite-difference stencils.

Integrals over R^N of radial functions reduce to one-dimensional integrals
with the surface weight w_{N-1} r^{N-1}; N = 1 integrals count both
half-lines, so w_0 = 2, w_1 = 2*pi, w_2 = 4*pi.
"""

from __future__ import annotations

from functools import lru_cache
from math import factorial, log, pi

import numpy as np

SURFACE_WEIGHT = {1: 2.0, 2: 2.0 * pi, 3: 4.0 * pi}


def uniform_grid(r_max: float, n: int) -> np.ndarray:
    """n intervals (n even for Simpson), n + 1 points from 0 to r_max."""
    if n < 8 or n % 2:
        raise ValueError("need an even interval count n >= 8")
    return np.linspace(0.0, float(r_max), n + 1)


def simpson(y: np.ndarray, h: float) -> float:
    """Composite Simpson rule on a uniform grid with an even interval count."""
    n = len(y) - 1
    if n % 2:
        raise ValueError("Simpson rule needs an even number of intervals")
    return float(h / 3.0 * (y[0] + y[-1] + 4.0 * y[1:-1:2].sum() + 2.0 * y[2:-1:2].sum()))


def quadrature_weights(r: np.ndarray, N: int) -> np.ndarray:
    """Vector W with W @ f = integral of f over R^N for radial samples f(r_i)."""
    n = len(r) - 1
    if n % 2:
        raise ValueError("Simpson rule needs an even number of intervals")
    h = r[1] - r[0]
    w = np.ones(n + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return (h / 3.0) * w * SURFACE_WEIGHT[N] * r ** (N - 1)


def radial_integral(r: np.ndarray, f: np.ndarray, N: int) -> float:
    return float(quadrature_weights(r, N) @ f)


def tail_correction(g: np.ndarray, h: float) -> float:
    """Estimate the integral of g beyond its last sample assuming exponential decay.

    Uses the last two samples to fit g ~ C exp(-lam r); returns 0 when the tail
    is not positive and decreasing (nothing reliable to extrapolate).
    """
    g1, g0 = float(g[-2]), float(g[-1])
    if g0 <= 0.0 or g1 <= g0:
        return 0.0
    lam = log(g1 / g0) / h
    return g0 / lam


@lru_cache(maxsize=None)
def fd_weights(offsets: tuple[int, ...], deriv: int) -> tuple[float, ...]:
    """Finite-difference weights on integer offsets for the given derivative.

    Solves the moment system sum_j w_j o_j^k = k! delta_{k,deriv}; exact for
    polynomials of degree < len(offsets).
    """
    m = len(offsets)
    v = np.vander(np.array(offsets, dtype=float), m, increasing=True).T
    rhs = np.zeros(m)
    rhs[deriv] = factorial(deriv)
    return tuple(np.linalg.solve(v, rhs))


def _apply_stencil(values: np.ndarray, offsets: tuple[int, ...], w: tuple[float, ...],
                   lo: int, hi: int) -> np.ndarray:
    """Apply one stencil to indices lo..hi-1 (offsets stay inside the array)."""
    out = np.zeros(hi - lo)
    for o, c in zip(offsets, w):
        out += c * values[lo + o:hi + o]
    return out


def derivative(values: np.ndarray, h: float) -> np.ndarray:
    """4th-order first derivative: central interior, one-sided at both ends."""
    n = len(values)
    if n < 6:
        raise ValueError("grid too short for 4th-order differencing")
    out = np.empty(n)
    c = fd_weights((-2, -1, 0, 1, 2), 1)
    out[2:n - 2] = _apply_stencil(values, (-2, -1, 0, 1, 2), c, 2, n - 2)
    for i in (0, 1):
        offs = tuple(range(-i, 5 - i))
        out[i] = sum(w * values[i + o] for o, w in zip(offs, fd_weights(offs, 1)))
    for i in (n - 2, n - 1):
        offs = tuple(range(-(4 - (n - 1 - i)), n - i))
        out[i] = sum(w * values[i + o] for o, w in zip(offs, fd_weights(offs, 1)))
    return out / h


def second_derivative_even(values: np.ndarray, h: float) -> np.ndarray:
    """4th-order second derivative of a radially even function.

    The samples start at r = 0; ghost points use the even reflection
    u(-r) = u(r), which is exact for smooth radial profiles. The far end
    uses one-sided 6-point stencils.
    """
    n = len(values)
    if n < 8:
        raise ValueError("grid too short for 4th-order differencing")
    ext = np.concatenate((values[2:0:-1], values))          # [u2, u1, u0, u1, ...]
    out = np.empty(n)
    c = fd_weights((-2, -1, 0, 1, 2), 2)
    out[:n - 2] = _apply_stencil(ext, (-2, -1, 0, 1, 2), c, 2, n)
    for i in (n - 2, n - 1):
        offs = tuple(range(-(5 - (n - 1 - i)), n - i))
        out[i] = sum(w * values[i + o] for o, w in zip(offs, fd_weights(offs, 2)))
    return out / (h * h)


def laplacian_radial(values: np.ndarray, r: np.ndarray, N: int) -> np.ndarray:
    """Radial Laplacian u'' + (N-1)/r u'; at r = 0 the limit N u''(0)."""
    h = r[1] - r[0]
    upp = second_derivative_even(values, h)
    if N == 1:
        return upp
    out = np.empty_like(upp)
    out[0] = N * upp[0]
    # first derivative with even reflection (u'(0) = 0 exactly)
    n = len(values)
    ext = np.concatenate((values[2:0:-1], values))
    up = np.empty(n)
    c = fd_weights((-2, -1, 0, 1, 2), 1)
    up[:n - 2] = _apply_stencil(ext, (-2, -1, 0, 1, 2), c, 2, n)
    for i in (n - 2, n - 1):
        offs = tuple(range(-(4 - (n - 1 - i)), n - i))
        up[i] = sum(w * values[i + o] for o, w in zip(offs, fd_weights(offs, 1)))
    up /= h
    out[1:] = upp[1:] + (N - 1) * up[1:] / r[1:]
    return out
