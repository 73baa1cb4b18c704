import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from lpplab.env import Bernoulli, PointMass, realize
from lpplab.passage import (
    Convention,
    Geometry,
    PathCountOverflow,
    brute_force_last_passage,
    enumerate_paths,
    is_admissible,
    last_passage,
    last_passage_many,
    path_count,
    scaled_estimate,
)
from lpplab.sampler import ExplicitField, UniformField, WeightField

GEOMS = list(Geometry)
CONVS = list(Convention)


def _valid(g, m, n):
    return not ((g is Geometry.STRICT_X and m < 1) or (g is Geometry.STRICT_Y and n < 1))


def test_all_ones_weak_weak():
    f = ExplicitField(np.ones((4, 4)))
    assert last_passage(f, "weak-weak", (3, 3), "exclude").value == 6
    assert last_passage(f, "weak-weak", (3, 3), "include").value == 7


def test_two_by_two_example():
    g = np.array([[1.0, 5.0], [2.0, 3.0]])  # g[i, j] = X(i, j)
    f = ExplicitField(g)
    assert last_passage(f, Geometry.WEAK_WEAK, (1, 1), Convention.INCLUDE).value == 9
    assert last_passage(f, Geometry.WEAK_WEAK, (1, 1), Convention.EXCLUDE).value == 6


def test_all_ones_strict_x():
    assert last_passage(ExplicitField(np.ones((5, 4))), Geometry.STRICT_X, (4, 3)).value == 4


def test_single_cell_include():
    assert last_passage(ExplicitField([[2.5]]), Geometry.WEAK_WEAK, (0, 0), Convention.INCLUDE).value == 2.5


def test_strict_y_one_row():
    g = np.array([[0.3, 9.0], [1.7, 9.0], [0.4, 9.0]])
    assert last_passage(ExplicitField(g), Geometry.STRICT_Y, (2, 1)).value == 1.7


def test_strict_strict_empty_chain():
    assert last_passage(ExplicitField(np.ones((3, 3))), Geometry.STRICT_STRICT, (0, 2)).value == 0.0


def test_strict_x_below_weak_weak_on_random_grids():
    rng = np.random.default_rng(1)
    for _ in range(100):
        g = rng.exponential(size=(5, 5))
        f = ExplicitField(g)
        sx = last_passage(f, Geometry.STRICT_X, (4, 4), Convention.INCLUDE).value
        ww = last_passage(f, Geometry.WEAK_WEAK, (4, 4), Convention.INCLUDE).value
        assert sx <= ww + 1e-12


@given(
    arrays(np.int64, st.tuples(st.integers(1, 5), st.integers(1, 5)), elements=st.integers(0, 20)),
    st.data(),
)
def test_dp_equals_enumeration_exactly(grid, data):
    a, b = grid.shape
    m = data.draw(st.integers(0, a - 1))
    n = data.draw(st.integers(0, b - 1))
    f = ExplicitField(grid.astype(float))
    for g in GEOMS:
        if not _valid(g, m, n):
            continue
        for c in CONVS:
            dp = last_passage(f, g, (m, n), c).value
            bf = brute_force_last_passage(grid.astype(float), g, (m, n), c)
            assert Fraction(dp) == Fraction(bf)


@given(arrays(np.float64, (4, 4), elements=st.floats(-3, 3)), st.integers(0, 3), st.integers(0, 3))
def test_path_value_and_admissibility(grid, m, n):
    f = ExplicitField(grid)
    for g in GEOMS:
        if not _valid(g, m, n):
            continue
        for c in CONVS:
            res = last_passage(f, g, (m, n), c, with_path=True)
            assert is_admissible(res.path, g, (m, n), c)
            total = sum(grid[i, j] for i, j in res.path)
            assert math.isclose(total, res.value, abs_tol=1e-12)
            assert math.isclose(res.value, brute_force_last_passage(grid, g, (m, n), c), abs_tol=1e-12)


@given(arrays(np.float64, (5, 5), elements=st.floats(0, 5)), st.integers(1, 4), st.integers(1, 4))
def test_include_is_exclude_plus_endpoint(grid, m, n):
    f = ExplicitField(grid)
    for g in GEOMS:
        a = last_passage(f, g, (m, n), Convention.INCLUDE).value
        b = last_passage(f, g, (m, n), Convention.EXCLUDE).value
        assert math.isclose(a, b + grid[m, n], abs_tol=1e-12)


@given(st.integers(0, 2**30), st.data())
def test_superadditivity(seed, data):
    rng = np.random.default_rng(seed)
    g = rng.exponential(size=(8, 8))
    m1, n1 = data.draw(st.integers(0, 7)), data.draw(st.integers(0, 7))
    m2, n2 = data.draw(st.integers(m1, 7)), data.draw(st.integers(n1, 7))
    full = last_passage(ExplicitField(g), Geometry.WEAK_WEAK, (m2, n2)).value
    first = last_passage(ExplicitField(g), Geometry.WEAK_WEAK, (m1, n1)).value
    second = last_passage(ExplicitField(g[m1:, n1:]), Geometry.WEAK_WEAK, (m2 - m1, n2 - n1)).value
    assert first + second <= full + 1e-12


def test_many_targets_match_single_targets():
    env = realize(PointMass(Bernoulli(0.4)), 60, 0)
    f = WeightField(env, UniformField(3))
    targets = [(10, 20), (40, 5), (1, 59), (0, 0), (25, 25)]
    for g in GEOMS:
        ts = [t for t in targets if _valid(g, *t)]
        many = last_passage_many(f, g, ts)
        for t, v in zip(ts, many):
            assert v == last_passage(f, g, t).value


def test_target_outside_environment():
    f = WeightField(realize(PointMass(Bernoulli(0.4)), 10, 0), UniformField(0))
    with pytest.raises(IndexError):
        last_passage(f, Geometry.WEAK_WEAK, (3, 11))
    with pytest.raises(ValueError):
        last_passage(f, Geometry.STRICT_X, (0, 3))
    with pytest.raises(ValueError):
        last_passage(f, Geometry.WEAK_WEAK, (-1, 3))


def test_path_counts():
    assert path_count(Geometry.WEAK_WEAK, (3, 3)) == 20
    for g in GEOMS:
        if _valid(g, 3, 2):
            assert len(list(enumerate_paths(g, (3, 2)))) <= path_count(g, (3, 2))
    with pytest.raises(PathCountOverflow):
        brute_force_last_passage(np.ones((15, 15)), Geometry.WEAK_WEAK, (14, 14))


def test_scaled_estimate_examples():
    ones = ExplicitField(np.ones((60, 60)))
    assert scaled_estimate(ones, Geometry.WEAK_WEAK, (1, 1), 50) == 2.0
    f = WeightField(realize(PointMass(Bernoulli(1.0)), 40, 0), UniformField(0))
    assert scaled_estimate(f, Geometry.STRICT_X, (1, 0.5), 60) == 1.0
    # 0.29 * 100 must floor to 29
    assert scaled_estimate(ones, Geometry.STRICT_X, (0.29, 0.5), 100) == 0.29
