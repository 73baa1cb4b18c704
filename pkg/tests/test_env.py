import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lpplab.env import (
    Bernoulli,
    BernoulliRateLaw,
    BoundedTable,
    Exponential,
    ExponentialRateLaw,
    FiniteMixture,
    LawError,
    PointMass,
    TruncatedBox,
    TwoPoint,
    extremal_two_point,
    from_rows,
    moments,
    quantile,
    realize,
    tilde_truncate,
    truncate_M,
    uniform,
)
from lpplab.experiments import cubic_law
from lpplab.measures import PowerDensity, ScalarLaw


def test_bernoulli_point_mass_moments():
    m = moments(PointMass(Bernoulli(0.5)))
    assert (m.mean, m.var, m.b) == (0.5, 0.25, 0.5)


def test_cubic_law_support_top_and_mean():
    law = cubic_law()
    assert law.b == 0.9
    assert math.isclose(moments(law).mean, 0.525, rel_tol=1e-12)
    # P(p <= x) = 1 - ((0.9 - x)/0.5)^3
    for x in (0.45, 0.6, 0.85):
        assert math.isclose(law.rates.cdf(x), 1 - ((0.9 - x) / 0.5) ** 3, rel_tol=1e-12)


def test_exponential_point_mass_moments():
    m = moments(PointMass(Exponential(2.0)))
    assert (m.mu_G, m.sigma2_G, m.c) == (0.5, 0.25, 2.0)


def test_realize_point_mass_rows_identical():
    env = realize(PointMass(Exponential(1.0)), 5, seed=11)
    assert len(env) == 5 and all(r == Exponential(1.0) for r in env.rows)


def test_realize_mixture_fraction():
    law = FiniteMixture((Bernoulli(0.3), Bernoulli(0.7)), (0.5, 0.5))
    env = realize(law, 10**4, seed=3)
    frac = np.mean([r.p == 0.7 for r in env.rows])
    assert 0.48 <= frac <= 0.52


def test_realize_deterministic():
    law = BernoulliRateLaw(ScalarLaw(continuous=PowerDensity(0.1, 0.8, 2.0)))
    a, b = realize(law, 200, 5), realize(law, 200, 5)
    assert a.rows == b.rows
    assert realize(law, 200, 6).rows != a.rows


def test_realize_rejects_empty():
    with pytest.raises(ValueError):
        realize(PointMass(Bernoulli(0.5)), 0, 1)


@pytest.mark.parametrize(
    "row,u,expected",
    [(Bernoulli(0.5), 0.3, 0.0), (Bernoulli(0.5), 0.7, 1.0), (Exponential(2.0), 1 - math.exp(-1), 0.5)],
)
def test_quantile_examples(row, u, expected):
    assert math.isclose(quantile(row, u), expected, abs_tol=1e-12)


@pytest.mark.parametrize("u", [0.0, 1.0, -0.1, 1.5])
def test_quantile_rejects_closed_endpoints(u):
    with pytest.raises(ValueError):
        quantile(Bernoulli(0.5), u)


def test_tilde_truncate_keeps_two_moments():
    g = tilde_truncate(Exponential(1.0), 3.0)
    assert math.isclose(g.mean(), 1.0, rel_tol=1e-12)
    assert math.isclose(g.second_moment(), 2.0, rel_tol=1e-12)
    assert g.support()[0] >= 0 and g.support()[1] <= 5.0 + 1e-12


def test_tilde_truncate_vanishes_for_large_tau():
    base = Exponential(1.0)
    xs = np.linspace(0, 30, 301)
    tv = [np.max(np.abs(tilde_truncate(base, tau).cdf(xs) - base.cdf(xs))) for tau in (5, 10, 20)]
    assert tv[0] > tv[1] > tv[2] and tv[2] < 1e-8


def test_tilde_truncate_needs_exponential():
    with pytest.raises(LawError):
        tilde_truncate(Bernoulli(0.5), 1.0)


def test_truncate_M_examples():
    t = truncate_M(Exponential(1.0), 10.0)
    assert float(t.cdf(10.0)) == 1.0
    xs = np.linspace(0, 9.99, 50)
    assert np.allclose(t.cdf(xs), Exponential(1.0).cdf(xs))
    assert truncate_M(Bernoulli(0.3), 2.0) == Bernoulli(0.3)
    assert math.isclose(truncate_M(Exponential(1.0), 1.0).mean(), 1 - math.exp(-1), rel_tol=1e-10)


def test_extremal_two_point():
    f1 = extremal_two_point(1.0)
    assert f1.mean() == 0.0 and f1.variance() == 1.0
    assert extremal_two_point(3.0).std() == 3.0
    assert quantile(extremal_two_point(2.0), 0.4) == -2.0


def test_uniform_table_matches_uniform():
    u = uniform(0.0, 2.0)
    assert math.isclose(u.mean(), 1.0) and math.isclose(u.variance(), 4 / 12)
    assert np.allclose(u.quantile_array(np.array([0.25, 0.5])), [0.5, 1.0])


def test_table_validation():
    with pytest.raises(LawError):
        BoundedTable((0, 1), (0.5,))
    with pytest.raises(LawError):
        BoundedTable((0, 1), (0.2, 0.9))
    with pytest.raises(LawError):
        BoundedTable((1, 0), (0.5, 1.0))


def test_law_validation():
    with pytest.raises(LawError):
        Bernoulli(1.5)
    with pytest.raises(LawError):
        FiniteMixture((Bernoulli(0.5),), (0.7,))
    with pytest.raises(LawError):
        TwoPoint(1.0, 1.0, 0.5)
    with pytest.raises(LawError):
        ExponentialRateLaw(ScalarLaw(((1.0, 1.0),)), nu=0.5, kappa=None)


def test_declared_tail_must_match_rates():
    rates = ScalarLaw(continuous=PowerDensity(1.0, 2.0, 1.5, "lo"))
    assert ExponentialRateLaw(rates, 0.5, 1.0).tail() == (0.5, 1.0)
    with pytest.raises(LawError):
        ExponentialRateLaw(rates, 0.5, 3.0)


def test_derived_tail():
    assert ExponentialRateLaw(ScalarLaw(((1.5, 0.5), (2.0, 0.5)))).tail() == (-1.0, 0.5)
    nu, kappa = ExponentialRateLaw(ScalarLaw(continuous=PowerDensity(1.0, 3.0, 0.5, "lo"))).tail()
    assert nu == -0.5 and math.isclose(kappa, 1 / math.sqrt(2))


def test_truncated_box_generic_moments():
    box = TruncatedBox(TwoPoint(-5.0, 5.0, 0.5), 2.0)
    assert math.isclose(box.mean(), 0.0, abs_tol=1e-9) and math.isclose(box.variance(), 4.0, rel_tol=1e-9)


def test_environment_weights_fast_paths_match_generic():
    rng = np.random.default_rng(0)
    U = rng.random((4, 7))
    rows = [Exponential(1.0), Exponential(2.0), Exponential(0.5), Exponential(3.0)]
    fast = from_rows(rows).weights(0, U)
    slow = np.array([r.quantile_array(U[k]) for k, r in enumerate(rows)])
    assert np.allclose(fast, slow)
    with pytest.raises(IndexError):
        from_rows(rows).weights(2, U)


@given(st.floats(0.01, 0.99), st.floats(1e-6, 1 - 1e-6))
def test_quantile_is_generalized_inverse(p, u):
    for row in (Bernoulli(p), Exponential(1 / p), TwoPoint(-1.0, 2.0, p), uniform(0.0, p)):
        q = quantile(row, u)
        assert float(row.cdf(q)) >= u - 1e-12
        assert float(row.cdf(q - 1e-9)) <= u + 1e-12 or q - 1e-9 < row.support()[0]


@given(st.floats(0.5, 20.0), st.floats(0.2, 5.0))
def test_tilde_truncate_moments_property(tau, rate):
    base = Exponential(rate)
    g = tilde_truncate(base, tau)
    assert math.isclose(g.mean(), base.mean(), rel_tol=1e-9)
    assert math.isclose(g.second_moment(), base.second_moment(), rel_tol=1e-9)
    assert 0 <= g.p_tilde <= 1 and g.upper >= tau
