"""Last-passage values for the four path geometries.

Conventions used throughout (target ``(m, n)``, endpoint excluded):

* weak-weak: up/right nearest-neighbour paths from ``(0, 0)``;
* strict-x: one point in each column ``0..m-1``, rows nondecreasing in ``[0, n]``;
* strict-y: the transpose, one point in each row ``0..n-1``, columns in ``[0, m]``;
* strict-strict: chains strictly increasing in both coordinates inside
  ``[0, m-1] x [0, n-1]``; the empty chain is admissible.

Including the endpoint adds ``X(m, n)``.  Values are computed row by row
with O(columns) memory; weights are regenerated from the field on the fly.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import _kernels as K
from .sampler import ExplicitField, Field

MAX_PATHS = 10**6
BLOCK_SITES = 1 << 20


class Geometry(str, Enum):
    WEAK_WEAK = "weak-weak"
    STRICT_X = "strict-x"
    STRICT_Y = "strict-y"
    STRICT_STRICT = "strict-strict"


class Convention(str, Enum):
    INCLUDE = "include"
    EXCLUDE = "exclude"


class PathCountOverflow(ValueError):
    pass


@dataclass(frozen=True)
class PassageResult:
    value: float
    target: tuple
    geometry: Geometry
    convention: Convention
    path: tuple | None = None


_KERNELS = {
    Geometry.WEAK_WEAK: K.dp_weak_weak,
    Geometry.STRICT_X: K.dp_strict_x,
    Geometry.STRICT_Y: K.dp_strict_y,
    Geometry.STRICT_STRICT: K.dp_strict_strict,
}


def _initial_state(geometry, ncols):
    if geometry is Geometry.WEAK_WEAK:
        s = np.full(ncols, -np.inf)
        s[0] = 0.0
        return s
    if geometry is Geometry.STRICT_X:
        return np.full(ncols, -np.inf)
    return np.zeros(ncols)


def _check_target(geometry, m, n):
    if m < 0 or n < 0:
        raise ValueError("target coordinates must be nonnegative")
    if geometry is Geometry.STRICT_X and m < 1:
        raise ValueError("strict-x targets need m >= 1")
    if geometry is Geometry.STRICT_Y and n < 1:
        raise ValueError("strict-y targets need n >= 1")


def _needs(geometry, m, n):
    """``(col, row)`` DP entries whose values give the excluded-endpoint time."""
    if geometry is Geometry.WEAK_WEAK:
        return [(m - 1, n), (m, n - 1)]
    if geometry is Geometry.STRICT_X:
        return [(m - 1, n)]
    if geometry is Geometry.STRICT_Y:
        return [(m, n - 1)]
    return [(m - 1, n - 1)]


def run_dp(field: Field, geometry: Geometry, ncols: int, nrows: int, trace_cols) -> np.ndarray:
    """Run the DP over ``nrows`` rows and ``ncols`` columns.

    Returns ``trace[row + 1, t]``: the DP value at column ``trace_cols[t]``
    after row ``row``; ``trace[0]`` is the initial state.
    """
    geometry = Geometry(geometry)
    kernel = _KERNELS[geometry]
    cols = np.asarray(trace_cols, dtype=np.int64)
    state = _initial_state(geometry, ncols)
    trace = np.empty((nrows + 1, len(cols)))
    trace[0] = state[cols]
    step = max(1, BLOCK_SITES // max(ncols, 1))
    for j0 in range(0, nrows, step):
        j1 = min(nrows, j0 + step)
        W = np.ascontiguousarray(field.rows_block(j0, j1, ncols), dtype=np.float64)
        kernel(state, W, cols, trace, j0 + 1)
    return trace


def last_passage_many(field: Field, geometry, targets, convention=Convention.EXCLUDE) -> np.ndarray:
    """Last-passage times for several targets from one DP sweep."""
    geometry = Geometry(geometry)
    convention = Convention(convention)
    targets = [(int(m), int(n)) for m, n in targets]
    for m, n in targets:
        _check_target(geometry, m, n)
    entries = {e for m, n in targets for e in _needs(geometry, m, n) if e[0] >= 0}
    need_rows = max((r for _, r in entries), default=-1) + 1
    if convention is Convention.INCLUDE:
        need_rows = max(need_rows, max(n for _, n in targets) + 1)
    if field.n_rows is not None and need_rows > field.n_rows:
        raise IndexError(f"target row {need_rows - 1} outside realized environment of {field.n_rows} rows")
    ncols = max(m for m, _ in targets) + 1
    cols = sorted({c for c, _ in entries})
    if not cols:
        cols = [0]
    col_index = {c: k for k, c in enumerate(cols)}
    max_row = max((r for _, r in entries), default=-1)
    nrows_dp = max_row + 1
    trace = run_dp(field, geometry, max(ncols, max(cols) + 1), nrows_dp, cols)

    def lookup(c, r):
        if c < 0:
            return -np.inf if geometry is Geometry.WEAK_WEAK else 0.0
        return trace[r + 1, col_index[c]]

    out = np.empty(len(targets))
    for k, (m, n) in enumerate(targets):
        vals = [lookup(c, r) for c, r in _needs(geometry, m, n)]
        v = max(vals)
        if geometry is Geometry.WEAK_WEAK and m == 0 and n == 0:
            v = 0.0
        if convention is Convention.INCLUDE:
            v = v + field.weight_at(m, n)
        out[k] = v
    return out


def last_passage(
    field: Field, geometry, target, convention=Convention.EXCLUDE, with_path: bool = False
) -> PassageResult:
    geometry = Geometry(geometry)
    convention = Convention(convention)
    m, n = int(target[0]), int(target[1])
    path = None
    if with_path:
        grid = _explicit_grid(field, m, n)
        value, path = _table_path(grid, geometry, (m, n), convention)
    else:
        value = float(last_passage_many(field, geometry, [(m, n)], convention)[0])
    return PassageResult(value, (m, n), geometry, convention, path)


def scaled_estimate(field: Field, geometry, direction, n: int, convention=Convention.EXCLUDE) -> float:
    """``T(floor(n x), floor(n y)) / n``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    x, y = direction
    target = (_floor(n * x), _floor(n * y))
    return last_passage(field, geometry, target, convention).value / n


def _floor(v: float) -> int:
    # guard against products like 0.29 * 100 = 28.999999999999996
    return int(math.floor(v + 1e-9))


# ---------------------------------------------------------------------------
# full-table DP with path extraction (small grids)


def _explicit_grid(field, m, n):
    if isinstance(field, ExplicitField):
        return field.grid
    return field.rows_block(0, n + 1, m + 1).T


def _table_path(grid, geometry, target, convention):
    X = np.asarray(grid, dtype=np.float64)
    m, n = target
    _check_target(geometry, m, n)
    if m >= X.shape[0] or n >= X.shape[1]:
        raise IndexError("target outside the explicit grid")
    ninf = -np.inf
    if geometry is Geometry.WEAK_WEAK:
        T = np.full((m + 1, n + 1), ninf)
        for j in range(n + 1):
            for i in range(m + 1):
                left = T[i - 1, j] if i > 0 else ninf
                down = T[i, j - 1] if j > 0 else ninf
                best = max(left, down)
                T[i, j] = (0.0 if (i == 0 and j == 0) else best) + X[i, j]
        # T[0,0] was computed as 0.0 + X[0,0], matching the rolling kernel
        if m == 0 and n == 0:
            path = []
        else:
            left = T[m - 1, n] if m > 0 else ninf
            down = T[m, n - 1] if n > 0 else ninf
            i, j = (m - 1, n) if left >= down else (m, n - 1)
            path = [(i, j)]
            while (i, j) != (0, 0):
                left = T[i - 1, j] if i > 0 else ninf
                down = T[i, j - 1] if j > 0 else ninf
                i, j = (i - 1, j) if left >= down else (i, j - 1)
                path.append((i, j))
            path.reverse()
    elif geometry is Geometry.STRICT_X:
        P = np.full((m, n + 1), ninf)
        for j in range(n + 1):
            for i in range(m):
                cand = (P[i - 1, j] if i > 0 else 0.0) + X[i, j]
                up = P[i, j - 1] if j > 0 else ninf
                P[i, j] = up if up >= cand else cand
        path = []
        i, j = m - 1, n
        while i >= 0:
            cand = (P[i - 1, j] if i > 0 else 0.0) + X[i, j]
            if P[i, j] == cand:
                path.append((i, j))
                i -= 1
            else:
                j -= 1
        path.reverse()
    elif geometry is Geometry.STRICT_Y:
        Q = np.full((m + 1, n), ninf)
        for j in range(n):
            for i in range(m + 1):
                cand = (Q[i, j - 1] if j > 0 else 0.0) + X[i, j]
                left = Q[i - 1, j] if i > 0 else ninf
                Q[i, j] = left if left >= cand else cand
        path = []
        i, j = m, n - 1
        while j >= 0:
            cand = (Q[i, j - 1] if j > 0 else 0.0) + X[i, j]
            if Q[i, j] == cand:
                path.append((i, j))
                j -= 1
            else:
                i -= 1
        path.reverse()
    else:
        S = np.zeros((m + 1, n + 1))  # shifted by one: S[i+1, j+1] = S(i, j)
        for j in range(n):
            for i in range(m):
                up, left = S[i + 1, j], S[i, j + 1]
                v = up if up >= left else left
                cand = S[i, j] + X[i, j]
                S[i + 1, j + 1] = cand if cand > v else v
        path = []
        i, j = m - 1, n - 1
        while i >= 0 and j >= 0:
            s = S[i + 1, j + 1]
            if s == S[i, j + 1]:
                i -= 1
            elif s == S[i + 1, j]:
                j -= 1
            else:
                path.append((i, j))
                i -= 1
                j -= 1
        path.reverse()
    value = 0.0
    for p in path:
        value += X[p]
    if convention is Convention.INCLUDE:
        value = value + X[m, n]
        path = path + [(m, n)]
    return value, tuple(path)


def is_admissible(path, geometry, target, convention=Convention.EXCLUDE) -> bool:
    """Check a point sequence against the geometry's path rules."""
    geometry = Geometry(geometry)
    m, n = target
    pts = list(path)
    if Convention(convention) is Convention.INCLUDE:
        if not pts or pts[-1] != (m, n):
            return False
        pts = pts[:-1]
    if geometry is Geometry.WEAK_WEAK:
        if m == 0 and n == 0:
            return pts == []
        if not pts or pts[0] != (0, 0):
            return False
        for (a, b), (c, d) in zip(pts, pts[1:]):
            if (c - a, d - b) not in ((1, 0), (0, 1)):
                return False
        a, b = pts[-1]
        return (m - a, n - b) in ((1, 0), (0, 1))
    if geometry is Geometry.STRICT_X:
        return [p[0] for p in pts] == list(range(m)) and all(
            0 <= p[1] <= q[1] <= n for p, q in zip(pts, pts[1:] + [(m, n)])
        )
    if geometry is Geometry.STRICT_Y:
        return [p[1] for p in pts] == list(range(n)) and all(
            0 <= p[0] <= q[0] <= m for p, q in zip(pts, pts[1:] + [(m, n)])
        )
    return all(
        0 <= p[0] < q[0] and 0 <= p[1] < q[1] for p, q in zip(pts, pts[1:] + [(m, n)])
    )


# ---------------------------------------------------------------------------
# exhaustive oracle


def path_count(geometry, target) -> int:
    """Number of admissible excluded-endpoint paths; equals C(m+n, m) for every geometry."""
    m, n = target
    return math.comb(m + n, m)


def enumerate_paths(geometry, target):
    geometry = Geometry(geometry)
    m, n = target
    if geometry is Geometry.WEAK_WEAK:
        if m == 0 and n == 0:
            yield ()
            return
        for ups in itertools.combinations(range(m + n), n):
            i = j = 0
            pts = [(0, 0)]
            upset = set(ups)
            for step in range(m + n - 1):
                if step in upset:
                    j += 1
                else:
                    i += 1
                pts.append((i, j))
            yield tuple(pts)
    elif geometry is Geometry.STRICT_X:
        for ys in itertools.combinations_with_replacement(range(n + 1), m):
            yield tuple(zip(range(m), ys))
    elif geometry is Geometry.STRICT_Y:
        for xs in itertools.combinations_with_replacement(range(m + 1), n):
            yield tuple(zip(xs, range(n)))
    else:
        for k in range(min(m, n) + 1):
            for xs in itertools.combinations(range(m), k):
                for ys in itertools.combinations(range(n), k):
                    yield tuple(zip(xs, ys))


def brute_force_last_passage(grid, geometry, target, convention=Convention.EXCLUDE) -> float:
    """Maximum over every admissible path; weights summed in path order."""
    geometry = Geometry(geometry)
    convention = Convention(convention)
    X = np.asarray(grid, dtype=np.float64)
    m, n = int(target[0]), int(target[1])
    _check_target(geometry, m, n)
    if m >= X.shape[0] or n >= X.shape[1]:
        raise IndexError("target outside the explicit grid")
    count = path_count(geometry, (m, n))
    if count > MAX_PATHS:
        raise PathCountOverflow(f"{count} admissible paths exceed the cap of {MAX_PATHS}")
    best = -np.inf
    for pts in enumerate_paths(geometry, (m, n)):
        s = 0.0
        for p in pts:
            s += X[p]
        if s > best:
            best = s
    if convention is Convention.INCLUDE:
        best = best + X[m, n]
    return float(best)
