"""Limit shapes: Bernoulli strict-weak formulas, the exponential shape via
convex duality, bounds and small-alpha expansions.

Implicit equations are solved on monotone maps with a bracketing root finder.
The unknown is always the gap to the singular support end (``z - b`` for
Bernoulli rates, ``c - a`` for exponential rates), so roots close to the end
keep full relative precision.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from scipy import optimize, special

from .env import EnvMoments, EnvironmentLaw, ExponentialRateLaw, LawError, bernoulli_rates, exponential_rates
from .measures import PowerDensity, ScalarLaw
from .quad import INFINITE, is_infinite

ROOT_RTOL = 4 * 2.220446049250313e-16
RESIDUAL_TOL = 1e-10


class RootBracketError(RuntimeError):
    pass


@dataclass(frozen=True)
class ShapeResult:
    value: float
    branch: str
    root: float | None = None
    residual: float | None = None


def _solve_decreasing(f, target, lo, hi):
    """Root of ``f(s) = target`` for ``f`` decreasing on ``(lo, hi]``; ``f(lo+)`` may be infinite."""
    f_hi = f(hi)
    if f_hi > target:
        raise RootBracketError(f"f(hi)={f_hi!r} still above target {target!r}")
    if f_hi == target:
        return hi
    a = hi
    for _ in range(2000):
        a = lo + (a - lo) / 2.0 if lo > 0 else a / 2.0
        fa = f(a)
        if fa >= target:
            break
    else:
        raise RootBracketError(f"could not bracket target {target!r} near {lo!r}")
    if fa == target:
        return a
    b = min(2.0 * a - lo, hi) if lo > 0 else min(2.0 * a, hi)
    return optimize.brentq(lambda s: f(s) - target, a, b, xtol=1e-300, rtol=ROOT_RTOL, maxiter=500)


def _rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


# ---------------------------------------------------------------------------
# Bernoulli rates


class _Bern:
    """Expectations over the Bernoulli rate law, parametrized by gaps to ``b`` or 0."""

    def __init__(self, rates: ScalarLaw):
        self.r = rates
        self.b = rates.hi
        self.lo = rates.lo
        self.pbar = rates.mean()

    @lru_cache(maxsize=None)
    def phi(self, delta):  # E[p(1-p)/(z-p)^2], z = b + delta
        return self.r.expect(lambda p, d: p * (1 - p) / (delta + d) ** 2, "hi", delta)

    @lru_cache(maxsize=None)
    def odds(self):  # E[p/(1-p)]
        g = 1.0 - self.b
        return self.r.expect(lambda p, d: p / (g + d), "hi", g)

    @lru_cache(maxsize=None)
    def linear_coef(self):  # E[p/(b-p)]
        return self.r.expect(lambda p, d: p / d, "hi", 0.0)

    def q(self, delta):  # E[(1-p)/(z-p)^2]
        return self.r.expect(lambda p, d: (1 - p) / (delta + d) ** 2, "hi", delta)

    @lru_cache(maxsize=None)
    def inv_odds(self):  # E[(1-p)/p]
        g = self.lo
        return self.r.expect(lambda p, d: (1 - p) / (g + d), "lo", g)

    @lru_cache(maxsize=None)
    def psi_up(self, z):  # E[p(1-p)/(z+p)^2]
        return self.r.expect(lambda p, d: p * (1 - p) / (z + p) ** 2)

    def q_up(self, z):  # E[(1-p)/(z+p)^2]
        return self.r.expect(lambda p, d: (1 - p) / (z + p) ** 2)


def _scaled_rates(r: ScalarLaw, s: float) -> ScalarLaw:
    atoms = tuple((v * s, w) for v, w in r.atoms)
    cont = r.continuous
    if cont is not None:
        cont = PowerDensity(cont.lo * s, cont.hi * s, cont.exponent, cont.anchor)
    return ScalarLaw(atoms, cont)


def _strict_x_rates(r: ScalarLaw, x, y) -> ShapeResult:
    B = _Bern(r)
    b = B.b
    ratio = x / y
    th3 = B.odds()
    if ratio <= th3:
        return ShapeResult(float(x), "x")
    th1 = B.phi(0.0)
    if not is_infinite(th1) and ratio >= th1:
        return ShapeResult(b * x + y * (1 - b) * B.linear_coef(), "linear", b)
    delta = _solve_decreasing(B.phi, ratio, 0.0, 1.0 - b)
    z0 = b + delta
    value = y * z0 * z0 * B.q(delta) - y
    tag = "interior" if not is_infinite(th1) else "interior (threshold infinite)"
    return ShapeResult(value, tag, z0, _rel(B.phi(delta), ratio))


def psi_strict_x(law: EnvironmentLaw, x: float, y: float) -> ShapeResult:
    """Strict-x Bernoulli shape: piecewise in ``x/y`` with an implicit middle branch."""
    if x < 0 or y < 0:
        raise ValueError("x and y must be nonnegative")
    r = bernoulli_rates(law)
    b = r.hi
    if x == 0:
        return ShapeResult(0.0, "axis")
    if y == 0 or b == 0:
        return ShapeResult(b * x, "axis")
    if b < 1.0:
        return _strict_x_rates(r, x, y)
    # b = 1: limit of the shrunken laws (1 - eps) p, Richardson on eps
    eps = (1e-3, 5e-4, 2.5e-4)
    vals = [_strict_x_rates(_scaled_rates(r, 1 - e), x, y).value for e in eps]
    extrap = 2 * vals[2] - vals[1]
    err = abs(extrap - (2 * vals[1] - vals[0]))
    return ShapeResult(extrap, "b=1 limit", None, err)


def psi_strict_y(law: EnvironmentLaw, x: float, y: float) -> ShapeResult:
    """Strict-y Bernoulli shape; equals ``y`` once ``x/y`` passes ``E[(1-p)/p]``."""
    if x < 0 or y < 0:
        raise ValueError("x and y must be nonnegative")
    r = bernoulli_rates(law)
    if y == 0:
        return ShapeResult(0.0, "axis")
    if r.hi == 0:
        return ShapeResult(0.0, "zero rates")
    if x == 0:
        return ShapeResult(y * r.mean(), "axis")
    B = _Bern(r)
    ratio = x / y
    th = B.inv_odds()
    if ratio >= th:
        return ShapeResult(float(y), "y")
    hi = 1.0
    while B.psi_up(hi) > ratio:
        hi *= 2.0
    z0 = _solve_decreasing(B.psi_up, ratio, 0.0, hi)
    value = y - y * z0 * z0 * B.q_up(z0)
    return ShapeResult(value, "interior", z0, _rel(B.psi_up(z0), ratio))


@dataclass(frozen=True)
class BernoulliBounds:
    bound1: float
    bound2: float
    bound3: float
    bound4: float


def bernoulli_bounds(law: EnvironmentLaw, x: float, y: float) -> BernoulliBounds:
    r = bernoulli_rates(law)
    b = r.hi
    p = r.mean()
    xy = x * y
    return BernoulliBounds(
        b * x + 2 * math.sqrt(p * (1 - b) * xy),
        p * y + 2 * math.sqrt(p * (1 - p) * xy),
        p * y + 4 * math.sqrt(p * (1 - p) * xy) + b * x,
        (y + 4 * math.sqrt(xy)) * math.sqrt(p) + b * x,
    )


def tagged_speed_theory(law: EnvironmentLaw, u: float) -> float:
    """``E[p u (u-1) / (1 - u p)]``, the stationary tagged-particle speed."""
    r = bernoulli_rates(law)
    b = r.hi
    if u < 1 or (b > 0 and u * b >= 1):
        raise ValueError("mean gap u must lie in [1, 1/b)")
    gap = 1.0 / u - b
    return r.expect(lambda p, d: p * (u - 1) / (gap + d), "hi", gap)


# ---------------------------------------------------------------------------
# exponential rates


class ExpShape:
    """Functionals of the rate measure ``m`` as functions of ``delta = c - a``."""

    def __init__(self, law: EnvironmentLaw):
        self.law = law
        self.m = exponential_rates(law)
        self.c = self.m.lo
        self.mu_G = self.m.expect(lambda xi, d: 1.0 / xi)

    @lru_cache(maxsize=None)
    def W(self, delta):  # int 1/(xi - a)
        return self.m.expect(lambda xi, d: 1.0 / (delta + d), "lo", delta)

    @lru_cache(maxsize=None)
    def V(self, delta):  # int 1/(xi - a)^2
        return self.m.expect(lambda xi, d: 1.0 / (delta + d) ** 2, "lo", delta)

    @lru_cache(maxsize=None)
    def K(self, delta):  # int xi/(xi - a)^2
        return self.m.expect(lambda xi, d: xi / (delta + d) ** 2, "lo", delta)

    def U(self, delta):  # int a/(xi - a)
        w = self.W(delta)
        return w if is_infinite(w) else (self.c - delta) * w

    def R(self, delta):  # int a^2/(xi - a)^2
        v = self.V(delta)
        return v if is_infinite(v) else (self.c - delta) ** 2 * v

    @property
    def u_star(self):
        return self.U(0.0)

    def a_of_u(self, u: float) -> ShapeResult:
        if u <= 0:
            return ShapeResult(0.0, "zero", 0.0, 0.0)
        us = self.u_star
        if not is_infinite(us) and u >= us:
            return ShapeResult(self.c, "flat", self.c, 0.0)
        delta = _solve_decreasing(self.U, u, 0.0, self.c)
        return ShapeResult(self.c - delta, "interior", self.c - delta, _rel(self.U(delta), u))

    def a_prime(self, u: float) -> float:
        a = self.a_of_u(u).value
        return 1.0 / self.K(self.c - a)

    def g(self, y: float) -> ShapeResult:
        if y >= 1.0 / self.mu_G:
            return ShapeResult(0.0, "zero")
        kc = self.K(0.0)
        if not is_infinite(kc) and y <= 1.0 / kc:
            return ShapeResult(-y * self.u_star + self.c, "linear", 0.0)
        delta = _solve_decreasing(self.K, 1.0 / y, 0.0, self.c)
        u0 = self.U(delta)
        return ShapeResult(-y * u0 + self.c - delta, "interior", u0, _rel(self.K(delta), 1.0 / y))

    def g_scan(self, y: float, points: int = 200) -> float:
        """Crude sup over a u-grid; a debugging cross-check for :meth:`g`."""
        us = self.u_star
        top = us if not is_infinite(us) else 50.0 / max(y, 1e-12)
        best = 0.0
        for k in range(points + 1):
            u = top * k / points
            best = max(best, -y * u + self.a_of_u(u).value)
        return best


def exp_shape_functions(law: EnvironmentLaw):
    """``(a, g)``: the inverse of ``a -> int a/(xi-a) dm`` and its monotone dual."""
    s = ExpShape(law)
    return (lambda u: s.a_of_u(u).value), (lambda y: s.g(y).value)


def exp_psi(law: EnvironmentLaw, x: float, y: float) -> ShapeResult:
    """Exponential-rate corner growth shape.

    With ``a0`` the root of ``int a^2/(xi-a)^2 dm = x/y`` the shape is
    ``x/a0 + y int 1/(xi-a0) dm``; past the critical ratio the root sticks
    at ``c`` and the shape is ``(x + y u*)/c``.
    """
    if x < 0 or y < 0:
        raise ValueError("x and y must be nonnegative")
    s = ExpShape(law)
    c = s.c
    if x == 0:
        return ShapeResult(y * s.mu_G, "axis")
    if y == 0:
        return ShapeResult(x / c, "axis")
    ratio = x / y
    rc = s.R(0.0)
    if not is_infinite(rc) and ratio >= rc:
        return ShapeResult((x + y * s.u_star) / c, "flat", c, 0.0)
    delta = _solve_decreasing(s.R, ratio, 0.0, c)
    a0 = c - delta
    value = x / a0 + y * s.W(delta)
    return ShapeResult(value, "interior", a0, _rel(s.R(delta), ratio))


def exp_psi_dual(law: EnvironmentLaw, x: float, y: float) -> ShapeResult:
    """Same shape, solving ``t g(y/t) = x`` for ``t`` directly (slower cross-check)."""
    s = ExpShape(law)
    if x == 0:
        return ShapeResult(y * s.mu_G, "axis")
    if y == 0:
        return ShapeResult(x / s.c, "axis")

    def h(t):
        return t * s.g(y / t).value

    lo = y * s.mu_G
    hi = max(2.0 * lo, x / s.c + lo)
    while h(hi) < x:
        hi *= 2.0
    t = optimize.brentq(lambda t: h(t) - x, lo, hi, xtol=1e-300, rtol=ROOT_RTOL, maxiter=500)
    return ShapeResult(t, "dual", t, _rel(h(t), x))


def case1_window(law: EnvironmentLaw) -> float:
    """Largest alpha for which the linear small-alpha formula is exact (0 if none)."""
    s = ExpShape(law)
    rc = s.R(0.0)
    return 0.0 if is_infinite(rc) else 1.0 / rc


def case1_window_scan(law: EnvironmentLaw, tol: float = 1e-8, hi: float = 1.0) -> float:
    """Largest alpha in ``(0, hi]`` where ``1/c + alpha int 1/(xi-c) dm`` matches exp_psi to ``tol``.

    Found by bisection; agrees with :func:`case1_window` up to the bisection width.
    """
    s = ExpShape(law)
    w0 = s.W(0.0)
    if is_infinite(s.V(0.0)):
        return 0.0

    def ok(a):
        return abs(exp_psi(law, 1.0, a).value - (1.0 / s.c + a * w0)) <= tol

    if ok(hi):
        return hi
    lo = hi
    while not ok(lo):
        lo /= 2.0
        if lo < 1e-12:
            return 0.0
    up = 2.0 * lo
    for _ in range(60):
        mid = 0.5 * (lo + up)
        lo, up = (mid, up) if ok(mid) else (lo, mid)
    return lo


# ---------------------------------------------------------------------------
# tail constants and expansions


def a_nu_series(nu: float, offset: float = 1.0, tol: float = 1e-14, cap: int = 10_000):
    """``sum_k C(nu+1, k) (-1)^k / (k - nu + offset - 1 + 1)``, summed until ``|term| < tol``.

    ``offset=1`` gives ``A_nu``; ``offset=0`` gives ``A_{nu,2}``.  Returns
    ``(value, terms_used, last_term)``.
    """
    coef = 1.0
    total = 0.0
    term = 0.0
    for k in range(cap):
        if k > 0:
            coef *= (nu + 1.0 - (k - 1)) / k
        term = coef * (-1) ** k / (k - nu + offset)
        total += term
        if k > 0 and abs(term) < tol:
            return total, k + 1, term
    return total, cap, term


@dataclass(frozen=True)
class TailSpec:
    nu: float
    kappa: float
    c: float

    def __post_init__(self):
        if not -1.0 <= self.nu <= 1.0:
            raise LawError("nu must lie in [-1, 1]")
        if not (self.kappa > 0 and self.c > 0):
            raise LawError("kappa and c must be positive")

    @property
    def a_nu(self) -> float:
        # sum_k C(nu+1,k)(-1)^k/(k-nu+1) = int_0^1 s^-nu (1-s)^(nu+1) ds
        if self.nu >= 1.0:
            return INFINITE
        return special.beta(1.0 - self.nu, self.nu + 2.0)

    @property
    def a_nu2(self) -> float:
        # sum_k C(nu+1,k)(-1)^k/(k-nu) = int_0^1 s^(-nu-1) (1-s)^(nu+1) ds, finite for nu < 0
        if self.nu >= 0.0:
            return INFINITE
        return special.beta(-self.nu, self.nu + 2.0)

    @property
    def b0(self) -> float:
        return (2.0 * self.kappa * self.c**2 * self.a_nu) ** (1.0 / (1.0 - self.nu))

    @property
    def b(self) -> float:
        b0 = self.b0
        return b0 / self.c**2 + self.kappa * b0**self.nu * self.a_nu2


def tail_spec(law: ExponentialRateLaw) -> TailSpec | None:
    t = law.tail() if isinstance(law, ExponentialRateLaw) else None
    m = exponential_rates(law)
    if t is None:
        if m.atom_at(m.lo) > 0:
            return TailSpec(-1.0, m.atom_at(m.lo), m.lo)
        return None
    return TailSpec(t[0], t[1], m.lo)


def asymptotic_alpha1(moments: EnvMoments, alpha: float) -> float:
    """Leading small-alpha behaviour ``mu + 2 sigma sqrt(alpha)`` of Psi(alpha, 1)."""
    return moments.mean + 2.0 * math.sqrt(moments.var) * math.sqrt(alpha)


def alpha1_error_order(moments: EnvMoments) -> str:
    if moments.c is not None:
        return "O(alpha)"
    return "o(sqrt(alpha))"


def asymptotic_1alpha(law: EnvironmentLaw, tail: TailSpec | None, alpha: float) -> ShapeResult:
    """Small-alpha expansion of Psi(1, alpha) for exponential rates, by regime."""
    s = ExpShape(law)
    c = s.c
    if not is_infinite(s.V(0.0)):
        return ShapeResult(1.0 / c + alpha * s.W(0.0), "case1", case1_window(law))
    if tail is None:
        tail = tail_spec(law)
    if tail is None:
        raise LawError("tail exponent (nu, kappa) required: int (xi-c)^-2 dm diverges")
    nu, kappa = tail.nu, tail.kappa
    if nu > 0:
        w0 = s.W(0.0)
        if is_infinite(w0):
            raise LawError("int (xi-c)^-1 dm diverges although nu > 0")
        return ShapeResult(1.0 / c + alpha * w0, "nu>0")
    if nu == 0:
        return ShapeResult(1.0 / c - kappa * alpha * math.log(alpha), "nu=0")
    return ShapeResult(1.0 / c + tail.b * alpha ** (1.0 / (1.0 - nu)), "nu<0")


def upper_bounds_1alpha(
    moments: EnvMoments, alpha: float, component_stds=None, M: float | None = None, which=None
) -> dict:
    """Upper bounds on Psi(1, alpha), each tagged by its hypothesis.

    ``general`` needs mu*, sigma*; ``bounded`` needs M (mu* defaults to the
    moments' value); ``finite_state_sum`` needs the component stds;
    ``finite_state_max`` needs sigma*.  Requested bounds whose data is missing
    raise ``ValueError``; unrequested ones are skipped silently.
    """
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    mu_star = moments.mean_sup
    sig_star = moments.std_sup
    out = {}
    avail = {
        "general": mu_star is not None and sig_star is not None,
        "bounded": M is not None and mu_star is not None,
        "finite_state_sum": component_stds is not None and mu_star is not None,
        "finite_state_max": mu_star is not None and sig_star is not None,
    }
    wanted = list(avail) if which is None else list(which)
    for name in wanted:
        if name not in avail:
            raise ValueError(f"unknown bound {name!r}")
        if not avail[name]:
            if which is not None:
                raise ValueError(f"bound {name!r} requested without its hypothesis data")
            continue
        if name == "general":
            out[name] = mu_star * (1 + alpha) + 4 * sig_star * math.sqrt(alpha * math.log(1 / alpha))
        elif name == "bounded":
            out[name] = mu_star + 2 * M * math.sqrt(alpha)
        elif name == "finite_state_sum":
            out[name] = mu_star + sum(2 * s * math.sqrt(alpha) for s in component_stds)
        else:
            out[name] = mu_star + 2 * sig_star * math.sqrt(alpha)
    return out


# ---------------------------------------------------------------------------
# named functionals


@dataclass(frozen=True)
class FunctionalSpec:
    """An expectation over the rate law with a declared singular point.

    ``singular(rates, param)`` gives the singular location; ``integrand(x,
    dist, gap, param)`` receives the distance ``dist`` from the support end
    nearest the singularity and ``gap`` from that end to the singularity.
    """

    name: str
    family: str
    end: str
    singular: object
    integrand: object


_SPECS = {
    "p/(b-p)": FunctionalSpec("p/(b-p)", "bernoulli", "hi", lambda r, z: r.hi, lambda p, d, g, z: p / (g + d)),
    "p/(1-p)": FunctionalSpec("p/(1-p)", "bernoulli", "hi", lambda r, z: 1.0, lambda p, d, g, z: p / (g + d)),
    "p/(z-p)": FunctionalSpec("p/(z-p)", "bernoulli", "hi", lambda r, z: z, lambda p, d, g, z: p / (g + d)),
    "p(1-p)/(z-p)^2": FunctionalSpec(
        "p(1-p)/(z-p)^2", "bernoulli", "hi", lambda r, z: z, lambda p, d, g, z: p * (1 - p) / (g + d) ** 2
    ),
    "(1-p)/(z-p)^2": FunctionalSpec(
        "(1-p)/(z-p)^2", "bernoulli", "hi", lambda r, z: z, lambda p, d, g, z: (1 - p) / (g + d) ** 2
    ),
    "(1-p)/p": FunctionalSpec("(1-p)/p", "bernoulli", "lo", lambda r, z: 0.0, lambda p, d, g, z: (1 - p) / (g + d)),
    "p(1-p)/(z+p)^2": FunctionalSpec(
        "p(1-p)/(z+p)^2", "bernoulli", "lo", lambda r, z: -z, lambda p, d, g, z: p * (1 - p) / (g + d) ** 2
    ),
    "(1-p)/(z+p)^2": FunctionalSpec(
        "(1-p)/(z+p)^2", "bernoulli", "lo", lambda r, z: -z, lambda p, d, g, z: (1 - p) / (g + d) ** 2
    ),
    "pu(u-1)/(1-up)": FunctionalSpec(
        "pu(u-1)/(1-up)", "bernoulli", "hi", lambda r, u: 1.0 / u, lambda p, d, g, u: p * (u - 1) / (g + d)
    ),
    "1/(xi-a)": FunctionalSpec("1/(xi-a)", "exponential", "lo", lambda r, a: a, lambda x, d, g, a: 1.0 / (g + d)),
    "1/(xi-a)^2": FunctionalSpec(
        "1/(xi-a)^2", "exponential", "lo", lambda r, a: a, lambda x, d, g, a: 1.0 / (g + d) ** 2
    ),
    "xi/(xi-a)^2": FunctionalSpec(
        "xi/(xi-a)^2", "exponential", "lo", lambda r, a: a, lambda x, d, g, a: x / (g + d) ** 2
    ),
    "a/(xi-a)": FunctionalSpec("a/(xi-a)", "exponential", "lo", lambda r, a: a, lambda x, d, g, a: a / (g + d)),
    "a^2/(xi-a)^2": FunctionalSpec(
        "a^2/(xi-a)^2", "exponential", "lo", lambda r, a: a, lambda x, d, g, a: a * a / (g + d) ** 2
    ),
    # u* = int c/(xi-c) dm: the a/(xi-a) functional at a = c
    "u*": FunctionalSpec("u*", "exponential", "lo", lambda r, a: r.lo, lambda x, d, g, a: a / (g + d)),
}

FUNCTIONALS = tuple(_SPECS)


def expectation(law: EnvironmentLaw, spec, parameter: float | None = None) -> float:
    """Evaluate a named functional; ``INFINITE`` when it diverges."""
    if isinstance(spec, str):
        if spec not in _SPECS:
            raise KeyError(f"unknown functional {spec!r}; known: {', '.join(FUNCTIONALS)}")
        spec = _SPECS[spec]
    rates = bernoulli_rates(law) if spec.family == "bernoulli" else exponential_rates(law)
    if spec.name == "u*":
        parameter = rates.lo
    s = spec.singular(rates, parameter)
    end = spec.end
    edge = rates.hi if end == "hi" else rates.lo
    gap = s - edge if end == "hi" else edge - s
    if gap < 0:
        raise ValueError(f"parameter {parameter!r} puts the singularity inside the support")
    return rates.expect(lambda x, d: spec.integrand(x, d, gap, parameter), end, gap)
