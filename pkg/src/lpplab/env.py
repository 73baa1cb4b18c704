"""Row weight distributions, environment laws and their moment functionals."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .measures import PowerDensity, ScalarLaw
from .quad import INFINITE


class LawError(ValueError):
    """Malformed or unsupported law."""


# ---------------------------------------------------------------------------
# row laws


class RowLaw:
    """Distribution of the weights in one row.

    Subclasses provide ``quantile`` (vectorized generalized inverse
    ``sup{x : F(x) < u}``), ``cdf``, ``mean``, ``second_moment`` and
    ``support``.  ``breakpoints`` lists atoms, used to split integrals of the cdf.
    """

    kind = "row"

    def quantile_array(self, u: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def cdf(self, x):
        raise NotImplementedError

    def mean(self) -> float:
        raise NotImplementedError

    def second_moment(self) -> float:
        raise NotImplementedError

    def variance(self) -> float:
        return max(self.second_moment() - self.mean() ** 2, 0.0)

    def std(self) -> float:
        return math.sqrt(self.variance())

    def support(self) -> tuple[float, float]:
        raise NotImplementedError

    def breakpoints(self) -> tuple:
        return ()


@dataclass(frozen=True)
class Bernoulli(RowLaw):
    p: float
    kind = "bernoulli"

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise LawError(f"Bernoulli p={self.p} outside [0, 1]")

    def quantile_array(self, u):
        return (np.asarray(u) > 1.0 - self.p).astype(np.float64)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(x < 0, 0.0, np.where(x < 1, 1.0 - self.p, 1.0))

    def mean(self):
        return float(self.p)

    def second_moment(self):
        return float(self.p)

    def variance(self):
        return self.p * (1.0 - self.p)

    def support(self):
        return (0.0, 1.0)

    def breakpoints(self):
        return (0.0, 1.0)


@dataclass(frozen=True)
class Exponential(RowLaw):
    rate: float
    kind = "exponential"

    def __post_init__(self):
        if not self.rate > 0:
            raise LawError(f"Exponential rate={self.rate} must be positive")

    def quantile_array(self, u):
        return -np.log1p(-np.asarray(u, dtype=np.float64)) / self.rate

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(x < 0, 0.0, -np.expm1(-self.rate * np.maximum(x, 0.0)))

    def mean(self):
        return 1.0 / self.rate

    def second_moment(self):
        return 2.0 / self.rate**2

    def variance(self):
        return 1.0 / self.rate**2

    def support(self):
        return (0.0, math.inf)

    def breakpoints(self):
        return (0.0,)


@dataclass(frozen=True)
class TwoPoint(RowLaw):
    lo: float
    hi: float
    p_hi: float
    kind = "two_point"

    def __post_init__(self):
        if not self.lo < self.hi:
            raise LawError("TwoPoint needs lo < hi")
        if not 0.0 <= self.p_hi <= 1.0:
            raise LawError("TwoPoint p_hi outside [0, 1]")

    def quantile_array(self, u):
        return np.where(np.asarray(u) > 1.0 - self.p_hi, self.hi, self.lo).astype(np.float64)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(x < self.lo, 0.0, np.where(x < self.hi, 1.0 - self.p_hi, 1.0))

    def mean(self):
        return self.lo + self.p_hi * (self.hi - self.lo)

    def second_moment(self):
        return (1.0 - self.p_hi) * self.lo**2 + self.p_hi * self.hi**2

    def variance(self):
        return self.p_hi * (1.0 - self.p_hi) * (self.hi - self.lo) ** 2

    def support(self):
        return (self.lo, self.hi)

    def breakpoints(self):
        return (self.lo, self.hi)


@dataclass(frozen=True)
class BoundedTable(RowLaw):
    """Tabulated cdf on finitely many points.

    ``interpolation="step"`` puts atoms at the points (cdf jumps there);
    ``"linear"`` interpolates the cdf linearly between points, so
    ``BoundedTable((0, 1), (0, 1), "linear")`` is Uniform[0, 1].  A repeated
    point or a positive first cdf value is an atom in linear mode.
    """

    points: tuple
    cdf_values: tuple
    interpolation: str = "step"
    kind = "table"

    def __post_init__(self):
        pts = tuple(float(v) for v in self.points)
        cdf = tuple(float(v) for v in self.cdf_values)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "cdf_values", cdf)
        if len(pts) != len(cdf) or not pts:
            raise LawError("BoundedTable needs equal-length nonempty arrays")
        if not all(math.isfinite(v) for v in pts):
            raise LawError("BoundedTable support must be finite")
        if any(b < a for a, b in zip(pts, pts[1:])):
            raise LawError("BoundedTable points must be nondecreasing")
        if any(b < a for a, b in zip(cdf, cdf[1:])) or cdf[0] < 0:
            raise LawError("BoundedTable cdf values must be nondecreasing from 0")
        if abs(cdf[-1] - 1.0) > 1e-12:
            raise LawError("BoundedTable cdf must end at 1")
        if self.interpolation not in ("step", "linear"):
            raise LawError("interpolation must be 'step' or 'linear'")

    def quantile_array(self, u):
        u = np.asarray(u, dtype=np.float64)
        x = np.asarray(self.points)
        F = np.asarray(self.cdf_values)
        k = np.minimum(np.searchsorted(F, u, side="left"), len(F) - 1)
        if self.interpolation == "step":
            return x[k]
        km = np.maximum(k - 1, 0)
        dF = F[k] - F[km]
        with np.errstate(invalid="ignore", divide="ignore"):
            frac = np.where(dF > 0, (u - F[km]) / np.where(dF > 0, dF, 1.0), 1.0)
        out = x[km] + frac * (x[k] - x[km])
        return np.where(k == 0, x[0], out)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        pts = np.asarray(self.points)
        F = np.asarray(self.cdf_values)
        if self.interpolation == "step":
            idx = np.searchsorted(pts, x, side="right") - 1
            return np.where(idx < 0, 0.0, F[np.maximum(idx, 0)])
        # right-continuous: at a repeated point take the last value
        idx = np.searchsorted(pts, x, side="right") - 1
        nxt = np.minimum(idx + 1, len(pts) - 1)
        lo_x = pts[np.maximum(idx, 0)]
        hi_x = pts[nxt]
        span = hi_x - lo_x
        with np.errstate(invalid="ignore", divide="ignore"):
            frac = np.where(span > 0, (x - lo_x) / np.where(span > 0, span, 1.0), 0.0)
        val = F[np.maximum(idx, 0)] + frac * (F[nxt] - F[np.maximum(idx, 0)])
        return np.where(idx < 0, 0.0, np.where(idx >= len(pts) - 1, 1.0, val))

    def _pieces(self):
        """Atoms and uniform segments as ``(a, b, mass)`` with ``a == b`` for atoms."""
        pts, F = self.points, self.cdf_values
        out = []
        if self.interpolation == "step":
            prev = 0.0
            for x, f in zip(pts, F):
                out.append((x, x, f - prev))
                prev = f
            return out
        out.append((pts[0], pts[0], F[0]))
        for (a, fa), (b, fb) in zip(zip(pts, F), zip(pts[1:], F[1:])):
            out.append((a, b, fb - fa))
        return out

    def mean(self):
        return float(sum(w * (a + b) / 2.0 for a, b, w in self._pieces()))

    def second_moment(self):
        return float(sum(w * (a * a + a * b + b * b) / 3.0 for a, b, w in self._pieces()))

    def support(self):
        return (self.points[0], self.points[-1])

    def breakpoints(self):
        return self.points


def uniform(lo: float, hi: float) -> BoundedTable:
    return BoundedTable((lo, hi), (0.0, 1.0), "linear")


@dataclass(frozen=True)
class TruncatedUpper(RowLaw):
    """Moment-preserving truncation of an exponential law above ``tau``.

    Below ``tau`` the law is the base law; the mass above ``tau`` is split
    into an atom at ``tau`` and an atom at ``upper`` so that the conditional
    first and second moments above ``tau`` are kept.
    """

    base: Exponential
    tau: float
    p_tilde: float
    upper: float
    kind = "truncated_upper"

    def _tail(self):
        return math.exp(-self.base.rate * self.tau)

    def quantile_array(self, u):
        u = np.asarray(u, dtype=np.float64)
        g_tau = -math.expm1(-self.base.rate * self.tau)
        top = 1.0 - self.p_tilde * self._tail()
        below = self.base.quantile_array(np.minimum(u, g_tau))
        return np.where(u <= g_tau, below, np.where(u <= top, self.tau, self.upper))

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        top = 1.0 - self.p_tilde * self._tail()
        return np.where(x < self.tau, self.base.cdf(x), np.where(x < self.upper, top, 1.0))

    def mean(self):
        r, t = self.base.rate, self.tau
        tail = self._tail()
        body = (1.0 - tail * (1.0 + r * t)) / r  # E[X; X < tau]
        return body + tail * ((1.0 - self.p_tilde) * t + self.p_tilde * self.upper)

    def second_moment(self):
        r, t = self.base.rate, self.tau
        tail = self._tail()
        body = (2.0 - tail * ((r * t) ** 2 + 2.0 * r * t + 2.0)) / r**2
        return body + tail * ((1.0 - self.p_tilde) * t * t + self.p_tilde * self.upper**2)

    def support(self):
        return (0.0, self.upper)

    def breakpoints(self):
        return (0.0, self.tau, self.upper)


@dataclass(frozen=True)
class TruncatedBox(RowLaw):
    """Base law clipped to ``[-M, M]``: outer mass is moved onto the box edges."""

    base: RowLaw
    M: float
    kind = "truncated_box"

    def __post_init__(self):
        if not self.M > 0:
            raise LawError("truncation level M must be positive")

    def quantile_array(self, u):
        return np.clip(self.base.quantile_array(u), -self.M, self.M)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(x >= self.M, 1.0, np.where(x < -self.M, 0.0, self.base.cdf(x)))

    def _moment(self, power):
        M = self.M
        pts = sorted({v for v in self.base.breakpoints() if -M < v < M} | {0.0})
        pos = [p for p in pts if p >= 0] + [M]
        neg = [-M] + [p for p in pts if p <= 0]

        def survival(x):
            return power * x ** (power - 1) * (1.0 - float(self.base.cdf(x)))

        def below(x):
            return power * abs(x) ** (power - 1) * float(self.base.cdf(x))

        total = 0.0
        for a, b in zip(pos, pos[1:]):
            if b > a:
                total += integrate.quad(survival, a, b, epsabs=1e-13, limit=200)[0]
        sign = -1.0 if power == 1 else 1.0
        for a, b in zip(neg, neg[1:]):
            if b > a:
                total += sign * integrate.quad(below, a, b, epsabs=1e-13, limit=200)[0]
        return total

    def mean(self):
        if isinstance(self.base, Exponential):
            return -math.expm1(-self.base.rate * self.M) / self.base.rate
        return self._moment(1)

    def second_moment(self):
        if isinstance(self.base, Exponential):
            r, M = self.base.rate, self.M
            return (2.0 - math.exp(-r * M) * ((r * M) ** 2 + 2.0 * r * M + 2.0)) / r**2 + (
                M * M * math.exp(-r * M)
            )
        return self._moment(2)

    def support(self):
        lo, hi = self.base.support()
        return (max(lo, -self.M), min(hi, self.M))

    def breakpoints(self):
        inner = tuple(v for v in self.base.breakpoints() if -self.M < v < self.M)
        return (-self.M,) + inner + (self.M,)


def quantile(rowlaw: RowLaw, u: float) -> float:
    """Generalized inverse ``sup{x : F(x) < u}`` at one point ``u`` in (0, 1)."""
    if not 0.0 < u < 1.0:
        raise ValueError("quantile needs 0 < u < 1")
    return float(rowlaw.quantile_array(np.array([u]))[0])


def tilde_truncate(rowlaw: RowLaw, tau: float) -> TruncatedUpper:
    """Replace the exponential tail above ``tau`` by two atoms with the same two moments."""
    if not isinstance(rowlaw, Exponential):
        raise LawError("tilde_truncate needs an exponential base law")
    if not tau > 0:
        raise LawError("tau must be positive")
    xi = rowlaw.rate
    m = tau + 1.0 / xi  # E(Y | Y > tau)
    w = tau * tau + 2.0 * tau / xi + 2.0 / xi**2  # E(Y^2 | Y > tau)
    p_tilde = (m - tau) ** 2 / ((m - tau) ** 2 + w - m * m)
    upper = (w - tau * tau) / (m - tau) - tau
    return TruncatedUpper(rowlaw, float(tau), float(p_tilde), float(upper))


def truncate_M(rowlaw: RowLaw, M: float) -> RowLaw:
    if not M > 0:
        raise LawError("truncation level M must be positive")
    lo, hi = rowlaw.support()
    if -M <= lo and hi <= M:
        return rowlaw
    return TruncatedBox(rowlaw, float(M))


def extremal_two_point(M: float) -> TwoPoint:
    """Half the mass at each of -M and M."""
    if not M > 0:
        raise LawError("M must be positive")
    return TwoPoint(-float(M), float(M), 0.5)


# ---------------------------------------------------------------------------
# environment laws


@dataclass(frozen=True)
class EnvMoments:
    mean: float
    var: float
    mean_sup: float | None = None
    std_sup: float | None = None
    b: float | None = None
    c: float | None = None
    mu_G: float | None = None
    sigma2_G: float | None = None

    @property
    def sigma(self) -> float:
        return math.sqrt(self.var)

    @property
    def sigma_G(self) -> float | None:
        return None if self.sigma2_G is None else math.sqrt(self.sigma2_G)


class EnvironmentLaw:
    """Law of the random row distribution."""

    kind = "environment"

    def sample_rows(self, rng: np.random.Generator, n: int):
        """Return ``(rows, family, params)``; ``family`` names a vectorizable
        row family (``"bernoulli"``/``"exponential"``) or is ``None``."""
        raise NotImplementedError


@dataclass(frozen=True)
class PointMass(EnvironmentLaw):
    row: RowLaw
    kind = "point_mass"

    def sample_rows(self, rng, n):
        return (self.row,) * n, None, None


@dataclass(frozen=True)
class FiniteMixture(EnvironmentLaw):
    rows: tuple
    weights: tuple
    kind = "mixture"

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(self.rows))
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        if len(self.rows) != len(self.weights) or not self.rows:
            raise LawError("mixture needs matching nonempty rows and weights")
        if any(w < 0 for w in self.weights) or abs(sum(self.weights) - 1.0) > 1e-12:
            raise LawError("mixture weights must be nonnegative and sum to 1")

    def sample_rows(self, rng, n):
        cum = np.cumsum(self.weights)
        idx = np.minimum(np.searchsorted(cum, rng.random(n), side="right"), len(cum) - 1)
        return tuple(self.rows[k] for k in idx), None, None


@dataclass(frozen=True)
class BernoulliRateLaw(EnvironmentLaw):
    """Rows Bernoulli(p) with p drawn from ``rates``; ``b`` is the top of its support."""

    rates: ScalarLaw
    kind = "bernoulli_rate"

    def __post_init__(self):
        if self.rates.lo < 0 or self.rates.hi > 1:
            raise LawError("Bernoulli rates must lie in [0, 1]")

    @property
    def b(self) -> float:
        return self.rates.hi

    def sample_rows(self, rng, n):
        p = self.rates.sample(rng, n)
        return tuple(Bernoulli(float(v)) for v in p), "bernoulli", p


@dataclass(frozen=True)
class ExponentialRateLaw(EnvironmentLaw):
    """Rows Exponential(xi) with xi drawn from ``rates`` on ``[c, inf)``.

    ``nu``/``kappa`` describe the mass near ``c``:
    ``m[c, c+d) ~ kappa * d**(nu+1)``.  Left as ``None`` they are derived
    from the rate law when it has a power form or an atom at ``c``.
    """

    rates: ScalarLaw
    nu: float | None = None
    kappa: float | None = None
    kind = "exponential_rate"

    def __post_init__(self):
        if self.rates.lo <= 0:
            raise LawError("exponential rates must be positive")
        if (self.nu is None) != (self.kappa is None):
            raise LawError("declare both nu and kappa or neither")
        if self.nu is not None:
            if not -1.0 <= self.nu <= 1.0 or not self.kappa > 0:
                raise LawError("tail needs nu in [-1, 1] and kappa > 0")
            if not self.tail_consistent():
                raise LawError("declared (nu, kappa) disagree with the rate law near c")

    @property
    def c(self) -> float:
        return self.rates.lo

    def derived_tail(self):
        """``(nu, kappa)`` read off the rate law, or ``None``."""
        r = self.rates
        atom = r.atom_at(r.lo)
        if atom > 0:
            return -1.0, atom
        cont = r.continuous
        if cont is not None and cont.lo == r.lo and cont.anchor == "lo":
            k = cont.exponent
            return k - 1.0, r.continuous_mass / cont.length**k
        return None

    def tail(self):
        if self.nu is not None:
            return self.nu, self.kappa
        return self.derived_tail()

    def mass_near_c(self, d: float) -> float:
        """``m[c, c+d)``."""
        r = self.rates
        s = sum(w for v, w in r.atoms if v < r.lo + d)
        if r.continuous is not None:
            s += r.continuous_mass * float(r.continuous.cdf(r.lo + d))
        return s

    def tail_consistent(self, rtol: float = 0.05) -> bool:
        # m[c, c+d) / d**(nu+1) should approach kappa; d**(nu+1) is 1 for atoms
        vals = []
        for k in range(3, 7):
            d = 10.0 ** (-k)
            vals.append(self.mass_near_c(d) / d ** (self.nu + 1.0))
        return abs(vals[-1] - self.kappa) <= rtol * self.kappa

    def sample_rows(self, rng, n):
        xi = self.rates.sample(rng, n)
        return tuple(Exponential(float(v)) for v in xi), "exponential", xi


def _family_params(rows):
    if all(isinstance(r, Bernoulli) for r in rows):
        return "bernoulli", np.array([r.p for r in rows])
    if all(isinstance(r, Exponential) for r in rows):
        return "exponential", np.array([r.rate for r in rows])
    return None, None


@dataclass(frozen=True)
class Environment:
    """A realized sequence of row laws."""

    rows: tuple
    seed: object
    law: EnvironmentLaw | None = None
    family: str | None = field(default=None, compare=False)
    params: np.ndarray | None = field(default=None, repr=False, compare=False)
    _codes: np.ndarray | None = field(default=None, repr=False, compare=False)
    _unique: tuple = field(default=(), repr=False, compare=False)

    def __post_init__(self):
        if self.family is None:
            fam, params = _family_params(self.rows)
            object.__setattr__(self, "family", fam)
            object.__setattr__(self, "params", params)
        if self.params is not None:
            self.params.setflags(write=False)
        if self.family is None:
            index: dict[int, int] = {}
            unique = []
            codes = np.empty(len(self.rows), dtype=np.int64)
            for j, r in enumerate(self.rows):
                key = id(r)
                if key not in index:
                    index[key] = len(unique)
                    unique.append(r)
                codes[j] = index[key]
            codes.setflags(write=False)
            object.__setattr__(self, "_codes", codes)
            object.__setattr__(self, "_unique", tuple(unique))

    def __len__(self):
        return len(self.rows)

    def weights(self, j0: int, U: np.ndarray) -> np.ndarray:
        """Weights of rows ``j0 .. j0+len(U)-1`` from uniforms ``U[row, col]``."""
        j1 = j0 + U.shape[0]
        if j0 < 0 or j1 > len(self.rows):
            raise IndexError(f"rows {j0}..{j1 - 1} outside environment of length {len(self.rows)}")
        if self.family == "bernoulli":
            return (U > (1.0 - self.params[j0:j1])[:, None]).astype(np.float64)
        if self.family == "exponential":
            return -np.log1p(-U) / self.params[j0:j1, None]
        out = np.empty_like(U)
        codes = self._codes[j0:j1]
        for c in np.unique(codes):
            mask = codes == c
            out[mask] = self._unique[c].quantile_array(U[mask])
        return out

    def permuted(self, order) -> "Environment":
        rows = tuple(self.rows[k] for k in order)
        return Environment(rows, self.seed, self.law)


def realize(law: EnvironmentLaw, rows: int, seed) -> Environment:
    """Draw ``rows`` i.i.d. row laws; the same (law, rows, seed) gives the same rows."""
    if rows < 1:
        raise ValueError("rows must be >= 1")
    rng = np.random.default_rng(seed)
    out, family, params = law.sample_rows(rng, rows)
    if family is None:
        return Environment(tuple(out), seed, law)
    return Environment(tuple(out), seed, law, family, np.asarray(params, dtype=np.float64))


def from_rows(rows, seed=None) -> Environment:
    return Environment(tuple(rows), seed, None)


# ---------------------------------------------------------------------------
# moments


def bernoulli_rates(law: EnvironmentLaw) -> ScalarLaw:
    """Law of the Bernoulli parameter of a row, for any Bernoulli-row environment."""
    if isinstance(law, BernoulliRateLaw):
        return law.rates
    if isinstance(law, PointMass) and isinstance(law.row, Bernoulli):
        return ScalarLaw(atoms=((law.row.p, 1.0),))
    if isinstance(law, FiniteMixture) and all(isinstance(r, Bernoulli) for r in law.rows):
        acc: dict[float, float] = {}
        for r, w in zip(law.rows, law.weights):
            acc[r.p] = acc.get(r.p, 0.0) + w
        return ScalarLaw(atoms=tuple(acc.items()))
    raise LawError("law does not have Bernoulli rows")


def exponential_rates(law: EnvironmentLaw) -> ScalarLaw:
    """Law ``m`` of the exponential rate of a row."""
    if isinstance(law, ExponentialRateLaw):
        return law.rates
    if isinstance(law, PointMass) and isinstance(law.row, Exponential):
        return ScalarLaw(atoms=((law.row.rate, 1.0),))
    if isinstance(law, FiniteMixture) and all(isinstance(r, Exponential) for r in law.rows):
        acc: dict[float, float] = {}
        for r, w in zip(law.rows, law.weights):
            acc[r.rate] = acc.get(r.rate, 0.0) + w
        return ScalarLaw(atoms=tuple(acc.items()))
    raise LawError("law does not have exponential rows")


def _row_list(law):
    if isinstance(law, PointMass):
        return [(law.row, 1.0)]
    if isinstance(law, FiniteMixture):
        return list(zip(law.rows, law.weights))
    return None


def _bernoulli_std_sup(rates: ScalarLaw) -> float:
    best = max((math.sqrt(v * (1 - v)) for v, _ in rates.atoms), default=0.0)
    cont = rates.continuous
    if cont is not None:
        p = min(max(0.5, cont.lo), cont.hi)
        best = max(best, math.sqrt(p * (1 - p)))
    return best


def moments(law: EnvironmentLaw) -> EnvMoments:
    """Annealed moments and essential extrema of ``law``."""
    rows = _row_list(law)
    if rows is not None:
        mean = sum(w * r.mean() for r, w in rows)
        var = sum(w * r.variance() for r, w in rows)
        live = [r for r, w in rows if w > 0]
        kw = dict(
            mean_sup=max(r.mean() for r in live),
            std_sup=max(r.std() for r in live),
        )
        if all(isinstance(r, Bernoulli) for r in live):
            kw["b"] = max(r.p for r in live)
        if all(isinstance(r, Exponential) for r in live):
            kw["c"] = min(r.rate for r in live)
            kw["mu_G"] = sum(w / r.rate for r, w in rows)
            kw["sigma2_G"] = sum(w / r.rate**2 for r, w in rows)
        return EnvMoments(mean, var, **kw)
    if isinstance(law, BernoulliRateLaw):
        r = law.rates
        pbar = r.mean()
        var = r.expect(lambda p, d: p * (1.0 - p))
        return EnvMoments(pbar, var, mean_sup=law.b, std_sup=_bernoulli_std_sup(r), b=law.b)
    if isinstance(law, ExponentialRateLaw):
        r = law.rates
        mu_G = r.expect(lambda xi, d: 1.0 / xi)
        s2 = r.expect(lambda xi, d: 1.0 / xi**2)
        c = law.c
        # sigma0^2 = 1/xi^2 averages to sigma_G^2
        return EnvMoments(mu_G, s2, mean_sup=1.0 / c, std_sup=1.0 / c, c=c, mu_G=mu_G, sigma2_G=s2)
    raise LawError(f"unsupported environment law {type(law).__name__}")


def row_laws_of(law: EnvironmentLaw):
    """``[(row, weight)]`` for discrete environment laws, else ``None``."""
    return _row_list(law)


__all__ = [
    "INFINITE",
    "LawError",
    "RowLaw",
    "Bernoulli",
    "Exponential",
    "TwoPoint",
    "BoundedTable",
    "TruncatedUpper",
    "TruncatedBox",
    "uniform",
    "quantile",
    "tilde_truncate",
    "truncate_M",
    "extremal_two_point",
    "EnvMoments",
    "EnvironmentLaw",
    "PointMass",
    "FiniteMixture",
    "BernoulliRateLaw",
    "ExponentialRateLaw",
    "PowerDensity",
    "ScalarLaw",
    "Environment",
    "realize",
    "from_rows",
    "moments",
    "bernoulli_rates",
    "exponential_rates",
    "row_laws_of",
]
