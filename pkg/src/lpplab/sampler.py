"""Counter-based uniforms and the weight fields built on them.

``u(seed, stream, i, j)`` is a keyed bijective hash of the site, so any
lattice site can be read without generating its predecessors.  Two weight
fields that share a :class:`UniformField` realize the monotone (quantile)
coupling ``X_F(z) = F_j^{-1}(u(z))``, ``X_G(z) = G_j^{-1}(u(z))``.

Weights are indexed ``(i, j)`` = (column, row); the environment row ``j``
fixes the law of every weight in that row.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .env import Environment

MASK64 = (1 << 64) - 1
MAX_INDEX = 1 << 32


def _u64(v: int) -> np.uint64:
    return np.uint64(int(v) & MASK64)


@dataclass(frozen=True)
class UniformField:
    seed: int
    stream: int = 0

    @property
    def keys(self):
        k1, k2 = K.field_keys(_u64(self.seed), _u64(self.stream))
        return np.uint64(k1), np.uint64(k2)

    def block(self, i0: int, j0: int, ncols: int, nrows: int) -> np.ndarray:
        """Uniforms for columns ``i0..i0+ncols-1`` and rows ``j0..j0+nrows-1`` as ``[row, col]``."""
        if i0 < 0 or j0 < 0 or i0 + ncols > MAX_INDEX or j0 + nrows > MAX_INDEX:
            raise IndexError("site indices must lie in [0, 2**32)")
        out = np.empty((nrows, ncols), dtype=np.float64)
        k1, k2 = self.keys
        K.fill_uniforms(k1, k2, i0, j0, out)
        return out


def uniform_at(field: UniformField, i: int, j: int) -> float:
    if not (0 <= i < MAX_INDEX and 0 <= j < MAX_INDEX):
        raise IndexError("site indices must lie in [0, 2**32)")
    k1, k2 = field.keys
    return float(K.uniform_scalar(k1, k2, i, j))


def uniforms_for_streams(seed: int, streams, i, j) -> np.ndarray:
    """Vectorized ``u(seed, streams[t], i[t], j[t])``."""
    streams = np.asarray(streams).ravel()
    i = np.asarray(i, dtype=np.int64).ravel()
    j = np.asarray(j, dtype=np.int64).ravel()
    uniq, inv = np.unique(streams, return_inverse=True)
    keys = np.array([UniformField(seed, int(s)).keys for s in uniq], dtype=np.uint64)
    out = np.empty(len(i), dtype=np.float64)
    K.uniforms_at(keys[inv, 0].copy(), keys[inv, 1].copy(), i, j, out)
    return out


class Field:
    """Anything that can produce a block of weights ``W[row, col]``."""

    n_rows: int | None = None

    def rows_block(self, j0: int, j1: int, ncols: int) -> np.ndarray:
        raise NotImplementedError

    def weight_at(self, i: int, j: int) -> float:
        return float(self.rows_block(j, j + 1, i + 1)[0, i])


@dataclass(frozen=True)
class WeightField(Field):
    environment: Environment
    uniforms: UniformField

    @property
    def n_rows(self) -> int:
        return len(self.environment)

    def rows_block(self, j0, j1, ncols):
        if j1 > self.n_rows:
            raise IndexError(f"row {j1 - 1} outside environment of length {self.n_rows}")
        U = self.uniforms.block(0, j0, ncols, j1 - j0)
        return self.environment.weights(j0, U)


def weight_at(field: Field, i: int, j: int) -> float:
    if isinstance(field, WeightField) and not 0 <= j < field.n_rows:
        raise IndexError(f"row {j} outside environment of length {field.n_rows}")
    return field.weight_at(i, j)


def coupled_pair(envF: Environment, envG: Environment, uniforms: UniformField):
    """Two weight fields reading the same uniforms."""
    if len(envF) != len(envG):
        raise ValueError("coupled environments need equal lengths")
    return WeightField(envF, uniforms), WeightField(envG, uniforms)


@dataclass(frozen=True)
class ExplicitField(Field):
    """A finite grid given as ``grid[i, j] = X(i, j)``."""

    grid: np.ndarray

    def __post_init__(self):
        g = np.array(self.grid, dtype=np.float64)
        g.setflags(write=False)
        object.__setattr__(self, "grid", g)

    @property
    def n_rows(self):
        return self.grid.shape[1]

    @property
    def n_cols(self):
        return self.grid.shape[0]

    def rows_block(self, j0, j1, ncols):
        if j1 > self.n_rows or ncols > self.n_cols:
            raise IndexError("target outside the explicit grid")
        return np.ascontiguousarray(self.grid[:ncols, j0:j1].T)


@dataclass(frozen=True)
class CoarseField(Field):
    """Block sums of a finer field.

    ``orientation="vertical"`` sums ``1 x r`` blocks ``{(x, r*y + k)}``;
    ``"horizontal"`` sums ``r x 1`` blocks ``{(r*x + k, y)}``.  Fine rows
    beyond the last full block are dropped.
    """

    fine: Field
    r: int
    orientation: str = "vertical"

    @property
    def n_rows(self):
        n = self.fine.n_rows
        if n is None:
            return None
        return n // self.r if self.orientation == "vertical" else n

    def rows_block(self, j0, j1, ncols):
        r = self.r
        if self.orientation == "vertical":
            W = self.fine.rows_block(r * j0, r * j1, ncols)
            return W.reshape(j1 - j0, r, ncols).sum(axis=1)
        W = self.fine.rows_block(j0, j1, r * ncols)
        return W.reshape(j1 - j0, ncols, r).sum(axis=2)


def block_coarsen(field: Field, r: int, orientation: str = "vertical") -> Field:
    if r < 1:
        raise ValueError("block size r must be >= 1")
    if orientation not in ("vertical", "horizontal"):
        raise ValueError("orientation must be 'vertical' or 'horizontal'")
    if r == 1:
        return field
    return CoarseField(field, int(r), orientation)
