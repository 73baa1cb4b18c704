import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lpplab.env import Bernoulli, Exponential, FiniteMixture, PointMass, from_rows, realize
from lpplab.sampler import (
    ExplicitField,
    UniformField,
    WeightField,
    block_coarsen,
    coupled_pair,
    uniform_at,
    uniforms_for_streams,
    weight_at,
)


def test_uniform_is_a_pure_function_of_the_site():
    f = UniformField(42, 3)
    assert uniform_at(f, 5, 9) == uniform_at(UniformField(42, 3), 5, 9)
    assert uniform_at(f, 5, 9) != uniform_at(UniformField(42, 4), 5, 9)
    assert uniform_at(f, 5, 9) != uniform_at(UniformField(43, 3), 5, 9)


def test_row_mean_within_clt_band():
    u = UniformField(7).block(0, 0, 10**6, 1)
    assert 0.4985 <= u.mean() <= 0.5015
    assert 0.0 < u.min() and u.max() < 1.0


def test_neighbouring_sites_uncorrelated():
    u = UniformField(1).block(0, 0, 2000, 200)
    r_col = np.corrcoef(u[:, :-1].ravel(), u[:, 1:].ravel())[0, 1]
    r_row = np.corrcoef(u[:-1].ravel(), u[1:].ravel())[0, 1]
    assert abs(r_col) < 0.01 and abs(r_row) < 0.01


@given(st.integers(0, 2**31), st.integers(0, 2**20), st.integers(0, 2**20), st.integers(1, 20), st.integers(1, 5))
def test_block_matches_random_access(seed, i0, j0, ncols, nrows):
    f = UniformField(seed)
    B = f.block(i0, j0, ncols, nrows)
    r, c = nrows - 1, ncols - 1
    assert B[r, c] == uniform_at(f, i0 + c, j0 + r)
    assert B[0, 0] == uniform_at(f, i0, j0)


def test_vectorized_streams_match_scalar():
    streams = np.array([0, 5, 5, 9])
    i = np.array([1, 2, 3, 4])
    j = np.array([7, 7, 8, 0])
    got = uniforms_for_streams(11, streams, i, j)
    want = [uniform_at(UniformField(11, int(s)), int(a), int(b)) for s, a, b in zip(streams, i, j)]
    assert np.array_equal(got, want)


def test_index_range_enforced():
    with pytest.raises(IndexError):
        uniform_at(UniformField(0), -1, 0)
    with pytest.raises(IndexError):
        UniformField(0).block(2**32 - 1, 0, 2, 1)


def test_bernoulli_one_environment_gives_unit_weights():
    env = realize(PointMass(Bernoulli(1.0)), 30, 0)
    W = WeightField(env, UniformField(5)).rows_block(0, 30, 40)
    assert np.all(W == 1.0)


def test_exponential_site_mean_across_streams():
    streams = np.arange(10**6)
    u = uniforms_for_streams(3, streams, np.full(10**6, 4), np.full(10**6, 2))
    x = -np.log1p(-u)
    assert 0.997 <= x.mean() <= 1.003


def test_quantile_coupling_scales_exponentials():
    envF = realize(PointMass(Exponential(1.0)), 20, 0)
    envG = realize(PointMass(Exponential(2.0)), 20, 0)
    F, G = coupled_pair(envF, envG, UniformField(9))
    assert np.allclose(F.rows_block(0, 20, 30), 2.0 * G.rows_block(0, 20, 30), rtol=1e-15)


def test_identical_environments_give_identical_fields():
    env = realize(FiniteMixture((Bernoulli(0.2), Exponential(1.0)), (0.5, 0.5)), 50, 1)
    F, G = coupled_pair(env, env, UniformField(2))
    assert np.array_equal(F.rows_block(0, 50, 30), G.rows_block(0, 50, 30))


def test_bernoulli_coupling_disagreement_frequency():
    n = 10**5
    F, G = coupled_pair(from_rows([Bernoulli(0.7)]), from_rows([Bernoulli(0.3)]), UniformField(4))
    a, b = F.rows_block(0, 1, n)[0], G.rows_block(0, 1, n)[0]
    assert np.all(a >= b)
    assert abs(np.mean(a != b) - 0.4) < 0.006


@given(st.floats(0.05, 0.95), st.floats(0.05, 0.95))
def test_rowwise_dominance_is_pointwise(p, q):
    hi, lo = max(p, q), min(p, q)
    F, G = coupled_pair(from_rows([Bernoulli(hi)] * 3), from_rows([Bernoulli(lo)] * 3), UniformField(8))
    assert np.all(F.rows_block(0, 3, 200) >= G.rows_block(0, 3, 200))


def test_weight_at_checks_rows():
    f = WeightField(realize(PointMass(Bernoulli(0.5)), 3, 0), UniformField(0))
    weight_at(f, 10, 2)
    with pytest.raises(IndexError):
        weight_at(f, 0, 3)


def test_block_coarsen_identity_and_sums():
    ones = ExplicitField(np.ones((6, 8)))
    assert block_coarsen(ones, 1) is ones
    assert np.all(block_coarsen(ones, 4).rows_block(0, 2, 6) == 4.0)
    assert np.all(block_coarsen(ones, 3, "horizontal").rows_block(0, 8, 2) == 3.0)
    with pytest.raises(ValueError):
        block_coarsen(ones, 0)
    with pytest.raises(ValueError):
        block_coarsen(ones, 2, "diagonal")


def test_block_coarsen_is_exact_block_sum():
    rng = np.random.default_rng(0)
    g = rng.random((5, 12))
    c = block_coarsen(ExplicitField(g), 3)
    assert c.n_rows == 4
    W = c.rows_block(0, 4, 5)
    for y in range(4):
        for x in range(5):
            assert W[y, x] == pytest.approx(g[x, 3 * y:3 * y + 3].sum(), rel=1e-15)


def test_block_coarsen_trims_remainder_rows():
    g = np.ones((2, 10))
    assert block_coarsen(ExplicitField(g), 4).n_rows == 2
