"""One-dimensional laws for row parameters (Bernoulli rates, exponential rates).

A ``ScalarLaw`` is a finite set of atoms plus an optional continuous power-type
part.  Expectations go through :meth:`ScalarLaw.expect`, which hands the
integrand both the point ``x`` and its exact distance to a chosen support end.
Integrands written in terms of that distance keep full relative precision
close to the singular end.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .quad import INFINITE, half_line_integral


@dataclass(frozen=True)
class PowerDensity:
    """Power-type law on ``[lo, hi]``.

    The mass within distance ``d`` of ``anchor`` is ``(d / (hi - lo))**exponent``.
    ``exponent=1`` is the uniform law.
    """

    lo: float
    hi: float
    exponent: float = 1.0
    anchor: str = "lo"

    def __post_init__(self):
        if not self.hi > self.lo:
            raise ValueError("PowerDensity needs hi > lo")
        if self.exponent <= 0:
            raise ValueError("PowerDensity needs a positive exponent")
        if self.anchor not in ("lo", "hi"):
            raise ValueError("anchor must be 'lo' or 'hi'")

    @property
    def length(self) -> float:
        return self.hi - self.lo

    def pdf_from(self, end: str, d):
        """Density at distance ``d`` from ``end``."""
        L, k = self.length, self.exponent
        dist = d if end == self.anchor else L - d
        return k * dist ** (k - 1.0) / L**k

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        L, k = self.length, self.exponent
        if self.anchor == "lo":
            r = np.clip((x - self.lo) / L, 0.0, 1.0)
            return r**k
        r = np.clip((self.hi - x) / L, 0.0, 1.0)
        return 1.0 - r**k

    def quantile(self, v):
        v = np.asarray(v, dtype=float)
        L, k = self.length, self.exponent
        if self.anchor == "lo":
            return self.lo + L * v ** (1.0 / k)
        return self.hi - L * (1.0 - v) ** (1.0 / k)


@dataclass(frozen=True)
class ScalarLaw:
    """Atoms ``((value, weight), ...)`` plus a continuous part holding the rest."""

    atoms: tuple = ()
    continuous: PowerDensity | None = None
    _sorted: tuple = field(init=False, repr=False, compare=False, default=())

    def __post_init__(self):
        atoms = tuple((float(v), float(w)) for v, w in self.atoms if w > 0)
        object.__setattr__(self, "atoms", atoms)
        total = sum(w for _, w in atoms)
        if total > 1.0 + 1e-12:
            raise ValueError("atom weights exceed 1")
        if self.continuous is None and abs(total - 1.0) > 1e-12:
            raise ValueError("atom weights must sum to 1 without a continuous part")
        if self.continuous is not None and total >= 1.0:
            raise ValueError("continuous part has no mass left")
        object.__setattr__(self, "_sorted", tuple(sorted(atoms)))

    @property
    def continuous_mass(self) -> float:
        if self.continuous is None:
            return 0.0
        return 1.0 - sum(w for _, w in self.atoms)

    @property
    def lo(self) -> float:
        cands = [v for v, _ in self.atoms]
        if self.continuous is not None:
            cands.append(self.continuous.lo)
        return min(cands)

    @property
    def hi(self) -> float:
        cands = [v for v, _ in self.atoms]
        if self.continuous is not None:
            cands.append(self.continuous.hi)
        return max(cands)

    def atom_at(self, x: float) -> float:
        return sum(w for v, w in self.atoms if v == x)

    def expect(self, h, end: str | None = None, gap: float = 0.0) -> float:
        """``E[h(X, dist)]`` where ``dist`` is the distance from X to the ``end`` of the support.

        ``gap`` is the distance from that end to the singularity of ``h``;
        it only guides breakpoint placement.  Divergent integrals come back as
        ``INFINITE``.
        """
        end = end or "lo"
        lo, hi = self.lo, self.hi
        total = 0.0
        for v, w in self.atoms:
            dist = v - lo if end == "lo" else hi - v
            try:
                val = h(v, dist)
            except ZeroDivisionError:
                return INFINITE
            if math.isinf(val) or math.isnan(val):
                return INFINITE
            total += w * val
        cm = self.continuous_mass
        if cm > 0:
            cont = self.continuous
            half = cont.length / 2.0
            off_lo = cont.lo - lo  # offset of the continuous part from the law's ends
            off_hi = hi - cont.hi
            L = cont.length

            def lower(d):
                x = cont.lo + d
                dist = off_lo + d if end == "lo" else off_hi + (L - d)
                return cont.pdf_from("lo", d) * h(x, dist)

            def upper(d):
                x = cont.hi - d
                dist = off_hi + d if end == "hi" else off_lo + (L - d)
                return cont.pdf_from("hi", d) * h(x, dist)

            g_lo = gap + off_lo if end == "lo" else 0.0
            g_hi = gap + off_hi if end == "hi" else 0.0
            a = half_line_integral(lower, half, g_lo)
            b = half_line_integral(upper, half, g_hi)
            if math.isinf(a) or math.isinf(b):
                return INFINITE
            total += cm * (a + b)
        return total

    def mean(self) -> float:
        return self.expect(lambda x, d: x)

    def cdf(self, x: float) -> float:
        s = sum(w for v, w in self.atoms if v <= x)
        if self.continuous is not None:
            s += self.continuous_mass * float(self.continuous.cdf(x))
        return s

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """Draw ``size`` values; component first, then position inside it."""
        values = np.array([v for v, _ in self.atoms] + [np.nan])
        probs = np.array([w for _, w in self.atoms] + [self.continuous_mass])
        comp = np.searchsorted(np.cumsum(probs), rng.random(size), side="right")
        comp = np.minimum(comp, len(probs) - 1)
        inner = rng.random(size)
        out = values[comp]
        if self.continuous is not None:
            mask = comp == len(probs) - 1
            out[mask] = self.continuous.quantile(inner[mask])
        return out

    def max_over_support(self, f) -> float:
        """Maximum of ``f`` over atoms and a fine grid of the continuous support."""
        best = max((f(v) for v, _ in self.atoms), default=-math.inf)
        if self.continuous is not None:
            xs = np.linspace(self.continuous.lo, self.continuous.hi, 4097)
            best = max(best, float(np.max(f(xs))))
        return best


def uniform_law(lo: float, hi: float) -> ScalarLaw:
    return ScalarLaw(continuous=PowerDensity(lo, hi, 1.0))


def atoms_law(pairs) -> ScalarLaw:
    if isinstance(pairs, dict):
        pairs = pairs.items()
    return ScalarLaw(atoms=tuple(pairs))
