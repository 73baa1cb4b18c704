"""Endpoint-aware quadrature for expectations over one-dimensional laws.

Integrands in this package blow up at an end of the support (``p -> b`` for
Bernoulli rates, ``xi -> c`` for exponential rates).  Every integral is taken
in the log-distance variable ``w = log(d)`` where ``d`` is the distance to the
support end, so the end itself is never evaluated and near-singular peaks at
scale ``gap`` are resolved by explicit breakpoints.
"""
from __future__ import annotations

import math

import numpy as np
from scipy import integrate

INFINITE = math.inf

EPSABS = 1e-13
EPSREL = 1e-12
SUBDIVISION_LIMIT = 400


class QuadratureError(RuntimeError):
    """Adaptive quadrature hit its subdivision cap without converging."""


def is_infinite(value) -> bool:
    return isinstance(value, float) and math.isinf(value)


def _quad(f, a, b):
    val, err, info = integrate.quad(
        f, a, b, epsabs=EPSABS, epsrel=EPSREL, limit=SUBDIVISION_LIMIT, full_output=1
    )[:3]
    return val, err


def _diverges(f, w_ref):
    # in log-distance the integrand behaves like d**beta near the end; beta <= 0 diverges
    try:
        f1 = f(w_ref - 140.0)
        f2 = f(w_ref - 280.0)
    except (ZeroDivisionError, OverflowError):
        return True
    if not (np.isfinite(f1) and np.isfinite(f2)):
        return True
    if f1 == 0.0:
        return False
    return abs(f2) >= 0.5 * abs(f1)


def half_line_integral(fd, half: float, gap: float = 0.0) -> float:
    """Integrate ``fd(d)`` over ``d`` in ``(0, half]``.

    ``gap`` is the distance from the end to the nearest singularity of the
    integrand (0 when the singularity sits exactly at the end).  Returns
    ``INFINITE`` for a divergent integral.
    """
    if half <= 0.0:
        return 0.0
    top = math.log(half)

    def f(w):
        d = math.exp(w)
        return fd(d) * d

    def f_safe(w):
        # the integral is known to converge here; underflowed powers of d carry no mass
        try:
            val = f(w)
        except (ZeroDivisionError, OverflowError):
            return 0.0
        return val if math.isfinite(val) else 0.0

    ref = min(top, math.log(gap)) if gap > 0.0 else top
    if _diverges(f, ref):
        try:
            sign = f(ref - 140.0)
        except (ZeroDivisionError, OverflowError):
            sign = 1.0
        return INFINITE if sign >= 0 else -INFINITE
    edges = {top - 40.0, top}
    if gap > 0.0:
        lg = math.log(gap)
        edges.update(c for c in (lg - 18.0, lg, lg + 18.0) if c < top)
    edges = sorted(edges)
    total = 0.0
    toterr = 0.0
    # the convergent tail below the first edge is a power law in d; close it analytically
    lower = edges[0] - 200.0
    edges.insert(0, lower)
    f0, f1 = f_safe(lower), f_safe(lower - 20.0)
    if f0 > 0.0 and f1 > 0.0 and f0 > f1:
        total += f0 / ((math.log(f0) - math.log(f1)) / 20.0)
    for a, b in zip(edges[:-1], edges[1:]):
        if b > a:
            val, err = _quad(f_safe, a, b)
            total += val
            toterr += err
    if not math.isfinite(total) or toterr > 1e-9 * max(1.0, abs(total)):
        raise QuadratureError(
            f"quadrature did not converge: value={total!r} error estimate={toterr!r}"
        )
    return total
