"""Compiled inner loops: counter-based uniforms and rolling last-passage DP.

All kernels release the GIL so replicas can run on a thread pool.
"""
import numba as nb
import numpy as np

GOLDEN = np.uint64(0x9E3779B97F4A7C15)
MIX1 = np.uint64(0xBF58476D1CE4E5B9)
MIX2 = np.uint64(0x94D049BB133111EB)
SALT1 = np.uint64(0x243F6A8885A308D3)
SALT2 = np.uint64(0x13198A2E03707344)
SALT3 = np.uint64(0xA4093822299F31D0)
S30 = np.uint64(30)
S27 = np.uint64(27)
S31 = np.uint64(31)
S32 = np.uint64(32)
S11 = np.uint64(11)
TWO_M53 = 2.0**-53
HALF_ULP = 2.0**-54

_opts = dict(cache=True, nogil=True)


@nb.njit(inline="always")
def _mix(z):
    # splitmix64 finalizer: a bijection on 64-bit words
    z = (z ^ (z >> S30)) * MIX1
    z = (z ^ (z >> S27)) * MIX2
    return z ^ (z >> S31)


@nb.njit(**_opts)
def field_keys(seed, stream):
    k1 = _mix(seed ^ SALT1)
    k1 = _mix(k1 + stream * GOLDEN + SALT2)
    k2 = _mix(k1 ^ SALT3)
    return k1, k2


@nb.njit(inline="always")
def _uniform(k1, k2, i, j):
    n = (j << S32) | i
    x = _mix((n * GOLDEN) ^ k1)
    x = _mix(x + k2)
    # top 53 bits, centred in their cell: never 0 or 1
    return np.float64(x >> S11) * TWO_M53 + HALF_ULP


@nb.njit(**_opts)
def uniform_scalar(k1, k2, i, j):
    return _uniform(k1, k2, np.uint64(i), np.uint64(j))


@nb.njit(**_opts)
def fill_uniforms(k1, k2, i0, j0, out):
    """``out[r, c] = u(i0 + c, j0 + r)``."""
    rows, cols = out.shape
    for r in range(rows):
        j = np.uint64(j0 + r)
        for c in range(cols):
            out[r, c] = _uniform(k1, k2, np.uint64(i0 + c), j)


@nb.njit(**_opts)
def uniforms_at(k1s, k2s, i, j, out):
    """Elementwise ``u`` with per-element keys (flat arrays of equal length)."""
    for t in range(out.shape[0]):
        out[t] = _uniform(k1s[t], k2s[t], np.uint64(i[t]), np.uint64(j[t]))


# ---------------------------------------------------------------------------
# DP over rows.  ``state`` holds the previous row's values and is updated in
# place; ``trace[row0 + r, t] = state[cols[t]]`` after row r is done.


@nb.njit(**_opts)
def dp_weak_weak(state, W, cols, trace, row0):
    nrows, ncols = W.shape
    for r in range(nrows):
        left = -np.inf
        for i in range(ncols):
            up = state[i]
            v = (up if up >= left else left) + W[r, i]
            state[i] = v
            left = v
        for t in range(cols.shape[0]):
            trace[row0 + r, t] = state[cols[t]]


@nb.njit(**_opts)
def dp_strict_x(state, W, cols, trace, row0):
    # P(i, j) = max(P(i, j-1), P(i-1, j) + X(i, j)),  P(-1, j) = 0
    nrows, ncols = W.shape
    for r in range(nrows):
        left = 0.0
        for i in range(ncols):
            cand = left + W[r, i]
            up = state[i]
            v = up if up >= cand else cand
            state[i] = v
            left = v
        for t in range(cols.shape[0]):
            trace[row0 + r, t] = state[cols[t]]


@nb.njit(**_opts)
def dp_strict_y(state, W, cols, trace, row0):
    # Q(i, j) = max(Q(i-1, j), Q(i, j-1) + X(i, j)),  Q(i, -1) = 0
    nrows, ncols = W.shape
    for r in range(nrows):
        left = -np.inf
        for i in range(ncols):
            cand = state[i] + W[r, i]
            v = left if left >= cand else cand
            state[i] = v
            left = v
        for t in range(cols.shape[0]):
            trace[row0 + r, t] = state[cols[t]]


@nb.njit(**_opts)
def dp_strict_strict(state, W, cols, trace, row0):
    # S(i, j) = max(S(i-1, j), S(i, j-1), S(i-1, j-1) + X(i, j)), zero boundary
    nrows, ncols = W.shape
    for r in range(nrows):
        left = 0.0
        diag = 0.0
        for i in range(ncols):
            up = state[i]
            cand = diag + W[r, i]
            v = up if up >= left else left
            if cand > v:
                v = cand
            diag = up
            state[i] = v
            left = v
        for t in range(cols.shape[0]):
            trace[row0 + r, t] = state[cols[t]]


# ---------------------------------------------------------------------------
# tagged particle: one time step of the leftward exclusion dynamics


@nb.njit(**_opts)
def particle_step(z, origin, marks, base):
    """Advance positions ``z`` (increasing) by one time step.

    ``marks`` are the sorted positions of unit weights in the new row,
    restricted to sites ``>= base``.  The new position of particle k is the
    smaller of its old position and the ``(k - i)``-th mark strictly to the
    right of particle i, minimised over i < k.  ``origin`` records which
    initial label the minimiser traces back to (larger label on ties).
    """
    n = z.shape[0]
    nm = marks.shape[0]
    best = np.iinfo(np.int64).max  # running min over i < k of (marks at or left of z_i) - i
    best_org = -1
    ptr = 0
    new_z = np.empty_like(z)
    new_org = np.empty_like(origin)
    for k in range(n):
        cand = np.iinfo(np.int64).max
        if best != np.iinfo(np.int64).max:
            idx = best + k - 1  # 0-based index of the (k - i)-th mark right of z_i
            if 0 <= idx < nm:
                cand = marks[idx]
        if cand < z[k]:
            new_z[k] = cand
            new_org[k] = best_org
        else:
            new_z[k] = z[k]
            new_org[k] = origin[k]
        while ptr < nm and marks[ptr] <= z[k]:
            ptr += 1
        d = ptr - k
        if d <= best:
            best = d
            best_org = origin[k]
    z[:] = new_z
    origin[:] = new_org
