"""Monte Carlo experiments tied to the shape formulas.

Every replica is a pure function of ``(config, replica index)``: replica
``r`` draws its environment from ``SeedSequence([seed, r, 0])`` and its
weights from the uniform stream ``r``.  Reports are reduced in replica order,
so thread scheduling never changes a number.
"""
from __future__ import annotations

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, stats

from . import _kernels as K
from .env import (
    BernoulliRateLaw,
    EnvironmentLaw,
    LawError,
    moments,
    realize,
    row_laws_of,
)
from .passage import Convention, Geometry, _floor, last_passage_many, run_dp
from .sampler import ExplicitField, UniformField, WeightField, block_coarsen, uniforms_for_streams
from .shapes import (
    ShapeResult,
    asymptotic_1alpha,
    asymptotic_alpha1,
    exp_psi,
    psi_strict_x,
    psi_strict_y,
    tagged_speed_theory,
    upper_bounds_1alpha,
)

SITE_OFFSET = 1 << 31  # column of lattice site 0 in the tagged-particle uniforms


@dataclass
class ExperimentConfig:
    law: EnvironmentLaw
    geometry: Geometry = Geometry.WEAK_WEAK
    convention: Convention = Convention.EXCLUDE
    directions: tuple = ((1.0, 1.0),)
    n: int = 1000
    replicas: int = 10
    seed: int = 0
    threads: int | None = None
    theory: bool = True

    def __post_init__(self):
        self.geometry = Geometry(self.geometry)
        self.convention = Convention(self.convention)
        self.directions = tuple((float(x), float(y)) for x, y in self.directions)
        if self.n < 1 or self.replicas < 1:
            raise ValueError("n and replicas must be >= 1")


@dataclass
class PointEstimate:
    x: float
    y: float
    n: int
    estimate: float
    se: float
    replicas: int
    values: np.ndarray = field(repr=False)
    theory: float | None = None
    branch: str | None = None
    residual: float | None = None
    extra: dict = field(default_factory=dict)


@dataclass
class ExperimentReport:
    points: list
    wall_clock: float
    config: object = None

    def rows(self):
        for p in self.points:
            yield point_row(p)


def point_row(p: PointEstimate) -> dict:
    return {
        "x": p.x,
        "y": p.y,
        "n": p.n,
        "estimate": p.estimate,
        "se": p.se,
        "replicas": p.replicas,
        "theory": p.theory,
        "branch": p.branch,
        "residual": p.residual,
        **p.extra,
    }


def default_threads() -> int:
    return len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else (os.cpu_count() or 1)


def map_replicas(fn, replicas: int, threads: int | None = None) -> list:
    """``[fn(0), ..., fn(replicas-1)]`` on a thread pool, in replica order."""
    threads = threads or default_threads()
    if threads <= 1 or replicas <= 1:
        return [fn(r) for r in range(replicas)]
    with ThreadPoolExecutor(max_workers=min(threads, replicas)) as pool:
        return list(pool.map(fn, range(replicas)))


def replica_field(law: EnvironmentLaw, rows: int, seed: int, replica: int) -> WeightField:
    env = realize(law, rows, np.random.SeedSequence([seed, replica, 0]))
    return WeightField(env, UniformField(seed, replica))


def mean_se(values) -> tuple[float, float]:
    v = np.asarray(values, dtype=np.float64)
    if len(v) < 2:
        return float(v.mean()), float("nan")
    return float(v.mean()), float(v.std(ddof=1) / math.sqrt(len(v)))


def theory_value(law: EnvironmentLaw, geometry: Geometry, x: float, y: float) -> ShapeResult | None:
    """Exact shape when a closed evaluator covers (law, geometry), else ``None``."""
    geometry = Geometry(geometry)
    try:
        if geometry is Geometry.STRICT_X:
            return psi_strict_x(law, x, y)
        if geometry is Geometry.STRICT_Y:
            return psi_strict_y(law, x, y)
        if geometry is Geometry.WEAK_WEAK:
            return exp_psi(law, x, y)
    except LawError:
        return None
    return None


def _targets(directions, n):
    return [(_floor(n * x), _floor(n * y)) for x, y in directions]


def mc_limit_estimate(config: ExperimentConfig) -> ExperimentReport:
    """Replica means of ``T(floor(nx), floor(ny)) / n`` for every direction."""
    t0 = time.perf_counter()
    n = config.n
    targets = _targets(config.directions, n)
    rows = max(m for _, m in targets) + 1

    def one(r):
        f = replica_field(config.law, rows, config.seed, r)
        return last_passage_many(f, config.geometry, targets, config.convention) / n

    vals = np.array(map_replicas(one, config.replicas, config.threads))
    points = []
    for k, (x, y) in enumerate(config.directions):
        est, se = mean_se(vals[:, k])
        p = PointEstimate(x, y, n, est, se, config.replicas, vals[:, k])
        if config.theory:
            th = theory_value(config.law, config.geometry, x, y)
            if th is not None:
                p.theory, p.branch, p.residual = th.value, th.branch, est - th.value
        points.append(p)
    return ExperimentReport(points, time.perf_counter() - t0, config)


def boundary_sweep(config: ExperimentConfig, alphas, side: str = "alpha1") -> ExperimentReport:
    """Estimates along ``(alpha, 1)`` (``side="alpha1"``) or ``(1, alpha)``.

    Each point also carries the small-alpha expansion and, on the
    ``(1, alpha)`` side, the upper bounds whose hypotheses are available.
    """
    alphas = [float(a) for a in alphas]
    if any(not 0 < a <= 1 for a in alphas):
        raise ValueError("alpha values must lie in (0, 1]")
    if side not in ("alpha1", "1alpha"):
        raise ValueError("side must be 'alpha1' or '1alpha'")
    dirs = [(a, 1.0) if side == "alpha1" else (1.0, a) for a in alphas]
    cfg = ExperimentConfig(
        config.law, config.geometry, config.convention, dirs, config.n, config.replicas, config.seed,
        config.threads, config.theory,
    )
    rep = mc_limit_estimate(cfg)
    mom = _safe_moments(config.law)
    for a, p in zip(alphas, rep.points):
        if mom is None:
            continue
        if side == "alpha1":
            p.extra["asymptotic"] = asymptotic_alpha1(mom, a)
        else:
            if mom.c is not None:
                try:
                    p.extra["asymptotic"] = asymptotic_1alpha(config.law, None, a).value
                except LawError:
                    pass
            if a < 1:
                for k, v in upper_bounds_1alpha(mom, a).items():
                    p.extra["bound_" + k] = v
    return rep


def _safe_moments(law):
    try:
        return moments(law)
    except LawError:
        return None


# ---------------------------------------------------------------------------
# interchangeability of exponential rates


@dataclass
class InterchangeReport:
    mean_a: float
    mean_b: float
    var_a: float
    var_b: float
    se: float
    ks: float
    ks_critical: float
    samples: int
    passed: bool


def exponential_lpp_samples(rates, grid, samples: int, seed: int) -> np.ndarray:
    """Last-passage time over the full ``m x n`` rectangle, for ``samples`` grids.

    ``grid = (m, n)`` counts columns and rows (customers and stations in the
    tandem-queue reading); row ``j`` has Exponential(``rates[j]``) weights.
    Sample ``s`` reads the uniform stream ``s``, so two rate orderings see the
    same uniforms.
    """
    m, n = grid
    rates = np.asarray(rates, dtype=np.float64)
    if len(rates) != n or m < 1:
        raise ValueError(f"need {n} row rates and m >= 1 for grid {grid}")
    s = np.repeat(np.arange(samples), m * n)
    jj, ii = np.meshgrid(np.arange(n), np.arange(m), indexing="ij")
    i = np.tile(ii.ravel(), samples)
    j = np.tile(jj.ravel(), samples)
    U = uniforms_for_streams(seed, s, i, j).reshape(samples, n, m)
    X = -np.log1p(-U) / rates[None, :, None]
    T = np.zeros((samples, m))
    for r in range(n):
        left = np.zeros(samples)
        for c in range(m):
            left = np.maximum(T[:, c], left) + X[:, r, c]
            T[:, c] = left
    return T[:, m - 1]


def ks_critical(n1: int, n2: int, level: float = 0.05) -> float:
    """Asymptotic two-sample Kolmogorov-Smirnov critical distance."""
    c = math.sqrt(-0.5 * math.log(level / 2))
    return c * math.sqrt((n1 + n2) / (n1 * n2))


def interchange_test(rates_a, rates_b, grid, samples: int = 100_000, seed: int = 0) -> InterchangeReport:
    if sorted(rates_a) != sorted(rates_b):
        raise ValueError("the two rate lists must be permutations of each other")
    a = exponential_lpp_samples(rates_a, grid, samples, seed)
    b = exponential_lpp_samples(rates_b, grid, samples, seed)
    se = math.sqrt(a.var(ddof=1) / samples + b.var(ddof=1) / samples)
    ks = float(stats.ks_2samp(a, b).statistic)
    crit = ks_critical(samples, samples)
    diff = abs(a.mean() - b.mean())
    passed = bool(diff <= 3 * se and ks < crit)
    return InterchangeReport(
        float(a.mean()), float(b.mean()), float(a.var(ddof=1)), float(b.var(ddof=1)), se, ks, crit, samples, passed
    )


# ---------------------------------------------------------------------------
# coupling gap


def _paired_rows(lawF: EnvironmentLaw, lawG: EnvironmentLaw):
    rf, rg = row_laws_of(lawF), row_laws_of(lawG)
    if rf is None or rg is None or len(rf) != len(rg):
        raise LawError("coupling bound needs point masses or mixtures with matching components")
    pairs = []
    for (f, wf), (g, wg) in zip(rf, rg):
        if abs(wf - wg) > 1e-12:
            raise LawError("coupled mixtures need equal component weights")
        pairs.append((f, g, wf))
    return pairs


def coupling_bound(lawF: EnvironmentLaw, lawG: EnvironmentLaw, alpha: float) -> float:
    """``8 sqrt(a) int (E|G0 - F0|)^(1/2) dx + a int esssup |F0 - G0| dx``."""
    pairs = _paired_rows(lawF, lawG)
    lo = min(min(f.support()[0], g.support()[0]) for f, g, _ in pairs)
    hi = max(max(f.support()[1], g.support()[1]) for f, g, _ in pairs)
    brk = sorted({float(b) for f, g, _ in pairs for b in (*f.breakpoints(), *g.breakpoints()) if np.isfinite(b)})

    def diffs(x):
        return [abs(float(f.cdf(x)) - float(g.cdf(x))) for f, g, _ in pairs]

    def mean_abs(x):
        return sum(w * d for d, (_, _, w) in zip(diffs(x), pairs))

    def sup_abs(x):
        return max(d for d, (_, _, w) in zip(diffs(x), pairs) if w > 0)

    def integral(h):
        edges = [e for e in brk if lo < e < hi]
        total = 0.0
        pts = [lo] + edges
        if np.isfinite(hi):
            pts.append(hi)
        for a, b in zip(pts[:-1], pts[1:]):
            total += integrate.quad(h, a, b, limit=200)[0]
        if not np.isfinite(hi):
            total += integrate.quad(h, pts[-1], np.inf, limit=200)[0]
        return total

    first = integral(lambda x: math.sqrt(mean_abs(x)))
    second = integral(sup_abs)
    return 8 * math.sqrt(alpha) * first + alpha * second


@dataclass
class CouplingReport:
    gap: float
    se: float
    bound: float
    replicas: int
    passed: bool


def coupling_gap_test(
    lawF: EnvironmentLaw, lawG: EnvironmentLaw, alpha: float, n: int, replicas: int = 10, seed: int = 0,
    threads: int | None = None,
) -> CouplingReport:
    """Coupled estimate of ``|Psi_F(a,1) - Psi_G(a,1) - (mu_F - mu_G)|`` against its bound."""
    bound = coupling_bound(lawF, lawG, alpha)
    shift = moments(lawF).mean - moments(lawG).mean
    target = [(_floor(alpha * n), n)]

    def one(r):
        fF = replica_field(lawF, n + 1, seed, r)
        fG = replica_field(lawG, n + 1, seed, r)
        tF = last_passage_many(fF, Geometry.WEAK_WEAK, target)[0]
        tG = last_passage_many(fG, Geometry.WEAK_WEAK, target)[0]
        return (tF - tG) / n - shift

    d = np.array(map_replicas(one, replicas, threads))
    mean, se = mean_se(d)
    gap = abs(mean)
    se = 0.0 if not np.isfinite(se) else se
    return CouplingReport(gap, se, bound, replicas, bool(gap <= bound + 3 * se))


# ---------------------------------------------------------------------------
# block coarse-graining


@dataclass
class BlockReport:
    fine: float
    coarse: float
    discrepancy: float
    se: float
    bound: float
    passed: bool


def block_comparison(
    law: EnvironmentLaw, r: int, alpha: float, n: int, M: float, replicas: int = 10, seed: int = 0,
    tolerance: float = 0.5, threads: int | None = None,
) -> BlockReport:
    """Finite-n ``Psi_F(a, 1)`` against ``(1/r) Psi_{F_r}(a r, 1)`` from vertical 1 x r blocks.

    Uses ``n`` divisible by ``r``; rows past the last full block are dropped.
    """
    m = _floor(alpha * n)
    nc = n // r

    def one(rep):
        fine = replica_field(law, n, seed, rep)
        coarse = block_coarsen(fine, r, "vertical")
        a = last_passage_many(fine, Geometry.WEAK_WEAK, [(m, n - 1)])[0] / n
        b = last_passage_many(coarse, Geometry.WEAK_WEAK, [(m, nc - 1)])[0] / n
        return a, b

    vals = np.array(map_replicas(one, replicas, threads))
    d = vals[:, 0] - vals[:, 1]
    disc, se = mean_se(d)
    bound = M * r * math.sqrt(alpha) * (1 + tolerance)
    return BlockReport(
        float(vals[:, 0].mean()), float(vals[:, 1].mean()), abs(disc), se, bound, bool(abs(disc) <= bound)
    )


# ---------------------------------------------------------------------------
# universality envelope


def universality_envelope(law: EnvironmentLaw, x: float, y: float) -> float:
    """Upper envelope from summing the Bernoulli bound over level sets.

    ``int [pbar(s) y + 4 sqrt(pbar(s)(1-pbar(s)) x y) + b(s) x - 1{s<0}(x+y)] ds``
    with ``pbar(s) = E P(X > s)`` and ``b(s)`` its essential supremum.
    """
    rows = row_laws_of(law)
    if rows is None:
        raise LawError("envelope needs a discrete environment law")
    lo = min(r.support()[0] for r, _ in rows)
    hi = max(r.support()[1] for r, _ in rows)
    if not (np.isfinite(lo) and np.isfinite(hi)):
        raise LawError("envelope needs bounded rows")

    def h(s):
        tails = [(1.0 - float(r.cdf(s)), w) for r, w in rows]
        pbar = sum(t * w for t, w in tails)
        b = max(t for t, w in tails if w > 0)
        v = pbar * y + 4 * math.sqrt(max(pbar * (1 - pbar), 0.0) * x * y) + b * x
        return v - (x + y) if s < 0 else v

    brk = sorted({float(b) for r, _ in rows for b in r.breakpoints()} | {0.0})
    pts = [p for p in brk if lo < p < hi]
    edges = [lo] + pts + [hi]
    return sum(integrate.quad(h, a, b, limit=200)[0] for a, b in zip(edges[:-1], edges[1:]) if b > a)


# ---------------------------------------------------------------------------
# tagged particle


@dataclass
class TaggedReport:
    speed: float
    se: float
    theory: float
    replicas: int
    truncation_rate: float
    speeds: np.ndarray = field(repr=False)
    origins: np.ndarray = field(repr=False)

    @property
    def passed(self) -> bool:
        close = abs(self.speed - self.theory) <= 3 * self.se if self.se > 0 else abs(self.speed - self.theory) < 1e-12
        return bool(close and self.truncation_rate < 0.01)


def _row_rates(law, t, seed, replica):
    env = realize(law, t, np.random.SeedSequence([seed, replica, 0]))
    if env.family != "bernoulli":
        raise LawError("tagged particle needs Bernoulli rows")
    return env.params


def initial_positions(u: float, W: int, rng: np.random.Generator) -> np.ndarray:
    """``z_{-W}(0) < ... < z_0(0) = 0`` with i.i.d. geometric gaps of mean ``u``."""
    gaps = np.ones(W, dtype=np.int64) if u == 1 else rng.geometric(1.0 / u, size=W).astype(np.int64)
    z = np.zeros(W + 1, dtype=np.int64)
    z[:-1] = -np.cumsum(gaps[::-1])[::-1]
    return z


def row_marks(uniforms: UniformField, row: int, p: float, lo: int, hi: int) -> np.ndarray:
    """Sorted sites ``x`` in ``(lo, hi]`` carrying a unit weight in time row ``row``."""
    if hi <= lo:
        return np.empty(0, dtype=np.int64)
    U = uniforms.block(lo + 1 + SITE_OFFSET, row, hi - lo, 1)[0]
    return np.flatnonzero(U > 1.0 - p).astype(np.int64) + lo + 1


def run_tagged(z0: np.ndarray, rates, uniforms: UniformField):
    """Evolve labels ``-W..0`` for ``len(rates)`` steps; returns ``(z, origin)``."""
    z = z0.copy()
    W = len(z) - 1
    origin = np.arange(-W, 1, dtype=np.int64)
    for s, p in enumerate(rates):
        marks = row_marks(uniforms, s, float(p), int(z[0]), int(z[-1]))
        K.particle_step(z, origin, marks, int(z[0]) + 1)
    return z, origin


def tagged_positions_direct(z0: np.ndarray, rates, uniforms: UniformField) -> np.ndarray:
    """``z_k(t) = min_i z_i(0) + Gamma((z_i(0), 0), k - i, t)`` from strict-x passage times.

    ``Gamma`` is the least ``l`` with the strict-x time over columns
    ``a+1 .. a+l`` and rows ``1..t`` at least ``k - i``.  Slow; for checks.
    """
    t = len(rates)
    lo, hi = int(z0[0]), int(z0[-1])
    grid = np.empty((hi - lo, t))
    for s, p in enumerate(rates):
        U = uniforms.block(lo + 1 + SITE_OFFSET, s, hi - lo, 1)[0]
        grid[:, s] = (U > 1.0 - p).astype(np.float64)
    out = z0.copy()
    for k in range(len(z0)):
        best = int(z0[k])
        for i in range(k):
            a = int(z0[i])
            sub = ExplicitField(grid[a - lo:, :])
            ncols = sub.n_cols
            trace = run_dp(sub, Geometry.STRICT_X, ncols, t, np.arange(ncols))
            prof = trace[t]  # value over columns a+1 .. a+l at index l-1
            hit = np.flatnonzero(prof >= k - i)
            if len(hit):
                best = min(best, a + int(hit[0]) + 1)
        out[k] = best
    return out


def tagged_particle_speed(
    law: EnvironmentLaw, u: float, t: int, W: int, replicas: int = 20, seed: int = 0, threads: int | None = None
) -> TaggedReport:
    """Speed ``-z_0(t)/t`` of the tagged particle from a stationary start.

    The infimum over labels is truncated to ``[-W, 0]``; a replica counts as
    truncated when the minimiser of particle 0 traces back to label ``-W``.
    """
    theory = tagged_speed_theory(law, u)

    def one(r):
        rng = np.random.default_rng(np.random.SeedSequence([seed, r, 1]))
        z0 = initial_positions(u, W, rng)
        rates = _row_rates(law, t, seed, r)
        z, origin = run_tagged(z0, rates, UniformField(seed, r))
        return -z[-1] / t, origin[-1]

    out = map_replicas(one, replicas, threads)
    speeds = np.array([s for s, _ in out])
    origins = np.array([o for _, o in out])
    mean, se = mean_se(speeds)
    trunc = float(np.mean(origins <= -W))
    return TaggedReport(mean, se, theory, replicas, trunc, speeds, origins)


# ---------------------------------------------------------------------------
# named laws used by the figures and the acceptance suite


def cubic_law() -> BernoulliRateLaw:
    """Bernoulli rates with ``P(p <= x) = 1 - ((0.9 - x)/0.5)^3`` on ``[0.4, 0.9]``."""
    from .measures import PowerDensity, ScalarLaw

    return BernoulliRateLaw(ScalarLaw(continuous=PowerDensity(0.4, 0.9, 3.0, "hi")))


__all__ = [
    "ExperimentConfig",
    "ExperimentReport",
    "PointEstimate",
    "mc_limit_estimate",
    "boundary_sweep",
    "interchange_test",
    "exponential_lpp_samples",
    "ks_critical",
    "coupling_bound",
    "coupling_gap_test",
    "block_coarsen",
    "block_comparison",
    "universality_envelope",
    "tagged_particle_speed",
    "tagged_positions_direct",
    "run_tagged",
    "initial_positions",
    "theory_value",
    "cubic_law",
    "map_replicas",
    "replica_field",
]
