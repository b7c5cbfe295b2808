"""Quadrature helpers.

Two engines are used throughout the package:

* :func:`integrate` wraps QUADPACK (``scipy.integrate.quad``) for scalar,
  piecewise-smooth integrands and turns its warnings into
  :class:`QuadratureFailure`.
* :func:`panel_integrate` is a vectorised composite Gauss-Legendre rule on a
  user supplied panel partition with adaptive bisection.  It is meant for
  oscillatory integrands, where the caller splits at half periods.
"""

from __future__ import annotations

import warnings
from functools import lru_cache

import numpy as np
from scipy import integrate as _spi

from .errors import QuadratureFailure

DEFAULT_ABS_TOL = 1e-10


@lru_cache(maxsize=None)
def gauss_legendre(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


def fixed_gauss(func, a, b, n: int = 16) -> float:
    """Exact for polynomials of degree < 2n on [a, b]."""
    x, w = gauss_legendre(n)
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    return half * np.dot(w, func(mid + half * x))


def integrate(func, a, b, *, points=None, epsabs=DEFAULT_ABS_TOL, epsrel=1e-12,
              limit=400, complex_func=False):
    """Adaptive Gauss-Kronrod integration of a scalar function.

    ``points`` are interior breakpoints (kinks, jumps, near-singularities);
    the interval is split there before QUADPACK is called on each piece, so
    infinite end points and breakpoints can be mixed freely.
    Returns ``(value, abserr)``.
    """
    if complex_func:
        re, err_re = integrate(lambda x: np.real(func(x)), a, b, points=points,
                               epsabs=epsabs, epsrel=epsrel, limit=limit)
        im, err_im = integrate(lambda x: np.imag(func(x)), a, b, points=points,
                               epsabs=epsabs, epsrel=epsrel, limit=limit)
        return complex(re, im), float(np.hypot(err_re, err_im))

    if a == b:
        return 0.0, 0.0
    sign = 1.0
    if a > b:
        a, b, sign = b, a, -1.0
    cuts = sorted({float(p) for p in (points or ()) if a < p < b})
    edges = [a, *cuts, b]
    total = 0.0
    err = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        with warnings.catch_warnings():
            warnings.simplefilter("error", _spi.IntegrationWarning)
            try:
                val, e = _spi.quad(func, lo, hi, epsabs=epsabs / len(edges),
                                   epsrel=epsrel, limit=limit)
            except _spi.IntegrationWarning as exc:
                raise QuadratureFailure(
                    f"quad did not converge on [{lo}, {hi}]: {exc}") from None
        total += val
        err += e
    return sign * total, err


def panel_integrate(func, edges, *, order: int = 12, tol: float = 1e-12,
                    max_rounds: int = 30):
    """Composite Gauss-Legendre over the panels ``edges[i]..edges[i+1]``.

    ``func`` must accept an array and return an array (real or complex).
    Each panel is integrated with ``order`` and ``2*order`` nodes; panels whose
    two estimates differ by more than their share of ``tol`` are bisected.
    Returns ``(value, error_estimate)``.
    """
    edges = np.asarray(edges, dtype=float)
    lo = edges[:-1]
    hi = edges[1:]
    total_len = float(edges[-1] - edges[0]) or 1.0
    x1, w1 = gauss_legendre(order)
    x2, w2 = gauss_legendre(2 * order)

    value = 0.0
    error = 0.0
    for _ in range(max_rounds):
        if lo.size == 0:
            return value, error
        half = 0.5 * (hi - lo)
        mid = 0.5 * (hi + lo)
        f1 = func(mid[:, None] + half[:, None] * x1[None, :])
        f2 = func(mid[:, None] + half[:, None] * x2[None, :])
        i1 = half * (f1 @ w1)
        i2 = half * (f2 @ w2)
        err = np.abs(i2 - i1)
        allowed = tol * (hi - lo) / total_len
        # panels only a few ulps wide straddle a rounded breakpoint; accept them
        floor = 1e-12 * np.maximum(np.maximum(np.abs(lo), np.abs(hi)), 1.0)
        ok = (err <= allowed) | (err <= 1e-3 * tol) | (hi - lo < floor)
        value = value + i2[ok].sum()
        error += float(err[ok].sum())
        lo, hi = lo[~ok], hi[~ok]
        mid = 0.5 * (lo + hi)
        lo, hi = np.concatenate([lo, mid]), np.concatenate([mid, hi])
    raise QuadratureFailure(
        f"panel quadrature: {lo.size} panels unconverged after {max_rounds} rounds")


def oscillation_edges(a: float, b: float, frequency: float, breakpoints=(),
                      threshold: float = 10.0):
    """Panel edges for an integrand oscillating like exp(i*frequency*x).

    When ``|frequency| * (b - a)`` exceeds ``threshold`` the interval is cut at
    every half period; breakpoints are always included.
    """
    pts = {float(a), float(b)}
    pts.update(float(p) for p in breakpoints if a < p < b)
    span = b - a
    if abs(frequency) * span > threshold:
        half_period = np.pi / abs(frequency)
        n = int(np.ceil(span / half_period))
        pts.update(np.linspace(a, b, n + 1).tolist())
    return np.array(sorted(pts))


def richardson(values, steps, order: float = 1.0):
    """Richardson extrapolation to step -> 0 assuming error ~ C*step**order.

    Uses the last two entries; returns ``(extrapolated, residual)`` where the
    residual compares with the extrapolation from the preceding pair.
    """
    values = list(values)
    steps = list(steps)

    def pair(i):
        h0, h1 = steps[i], steps[i + 1]
        r = (h0 / h1) ** order
        return (r * values[i + 1] - values[i]) / (r - 1.0)

    last = pair(len(values) - 2)
    if len(values) >= 3:
        prev = pair(len(values) - 3)
        return last, abs(last - prev)
    return last, abs(values[-1] - last)
