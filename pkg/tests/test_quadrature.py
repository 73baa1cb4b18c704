import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from lpplab.env import ExponentialRateLaw
from lpplab.measures import PowerDensity, ScalarLaw, atoms_law, uniform_law
from lpplab.quad import INFINITE, half_line_integral, is_infinite


def test_smooth_integrand():
    v = half_line_integral(lambda d: math.exp(-d), 5.0)
    assert math.isclose(v, 1 - math.exp(-5), rel_tol=1e-12)


def test_integrable_singularity_at_zero():
    v = half_line_integral(lambda d: d**-0.5, 1.0)
    assert math.isclose(v, 2.0, rel_tol=1e-10)


def test_divergence_reported_as_infinite():
    assert is_infinite(half_line_integral(lambda d: 1.0 / d, 1.0))
    assert is_infinite(half_line_integral(lambda d: d**-1.5, 1.0))


def test_gap_regularizes_singularity():
    g = 1e-7
    v = half_line_integral(lambda d: 1.0 / (g + d), 1.0, gap=g)
    assert math.isclose(v, math.log((1 + g) / g), rel_tol=1e-10)


def test_uniform_mean_of_inverse_gap():
    # E[1/(g + d)] for d uniform on [0, 1]
    law = uniform_law(0.0, 1.0)
    for g in (1e-12, 1e-6, 0.3):
        v = law.expect(lambda x, d: 1.0 / (g + d), "lo", g)
        assert math.isclose(v, math.log1p(1 / g), rel_tol=1e-10)


def test_atom_at_singularity_is_infinite():
    law = atoms_law([(0.9, 0.5), (0.4, 0.5)])
    assert law.expect(lambda p, d: 1.0 / d, "hi", 0.0) == INFINITE


def test_power_density_cubic_moment():
    law = ScalarLaw(continuous=PowerDensity(0.4, 0.9, 3.0, "hi"))
    assert math.isclose(law.mean(), 0.525, rel_tol=1e-12)


@given(st.floats(0.3, 4.0), st.floats(0.1, 3.0), st.floats(1e-9, 1.0))
def test_power_density_inverse_gap_closed_form(k, L, g):
    # mass within d of lo is (d/L)^k; check E[1] and E[d] against closed forms
    law = ScalarLaw(continuous=PowerDensity(1.0, 1.0 + L, k, "lo"))
    assert math.isclose(law.expect(lambda x, d: 1.0, "lo", g), 1.0, rel_tol=1e-10)
    assert math.isclose(law.expect(lambda x, d: d, "lo", g), L * k / (k + 1), rel_tol=1e-10)


def test_tail_mass_convention():
    law = ExponentialRateLaw(ScalarLaw(continuous=PowerDensity(1.0, 2.0, 0.5, "lo")))
    assert math.isclose(law.mass_near_c(1e-4), 1e-2, rel_tol=1e-9)
    with pytest.raises(Exception):
        PowerDensity(1.0, 0.5)
