"""Hot numeric kernels: Bethe residual, Jacobian, and damped Newton.

Two interchangeable backends live here:

* loop kernels compiled with ``numba.njit`` (the default when numba imports),
* vectorized pure-numpy fallbacks.

Selection is made once at import time from the env flag ``LAME_BETHE_NUMBA``
(set it to ``0``/``off`` to force the numpy path).  Both backends implement
the same arithmetic; ``benchmarks/bench_kernels.py`` times them side by side.

Sign convention: the residual is the gradient of log Phi, so a critical
point is a zero of the residual vector.
"""

from __future__ import annotations

import os

import numpy as np

NUMBA_ENV = "LAME_BETHE_NUMBA"
THREADS_ENV = "LAME_BETHE_THREADS"

try:
    import numba as _nb

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    _nb = None
    HAVE_NUMBA = False


def _env_wants_numba():
    val = os.environ.get(NUMBA_ENV, "").strip().lower()
    return val not in ("0", "off", "false", "no")


USING_NUMBA = HAVE_NUMBA and _env_wants_numba()

# Newton status codes
OK = 0
NO_CONVERGENCE = 1
SINGULAR_JACOBIAN = 2
STALLED = 3
NOT_FINITE = 4


def make_layout(ws):
    """Flatten a WeightSystem into kernel-ready arrays.

    Returns (z, a, color, W): singular points, (Lambda_s, alpha_i) matrix,
    per-variable color indices, and the pairwise interaction weights
    (+2 within a color, -1 between adjacent colors, 0 otherwise).
    """
    z = ws.z_array()
    a = ws.pair_matrix()
    color = np.repeat(np.arange(ws.r, dtype=np.int64),
                      np.array(ws.l, dtype=np.int64))
    l = color.size
    W = np.zeros((l, l), dtype=np.float64)
    for i in range(l):
        for j in range(l):
            if i == j:
                continue
            d = abs(int(color[i]) - int(color[j]))
            if d == 0:
                W[i, j] = 2.0
            elif d == 1:
                W[i, j] = -1.0
    return z, a, color, W


# ---------------------------------------------------------------------------
# pure-numpy backend
# ---------------------------------------------------------------------------

def residual_np(t, z, a, color, W):
    l = t.size
    if l == 0:
        return np.zeros(0, dtype=np.complex128)
    A = a[:, color].T                       # (l, n) coefficients per variable
    den = t[:, None] - z[None, :]
    den = np.where(A == 0, 1.0, den)        # skip vanishing-coefficient terms
    res = -(A / den).sum(axis=1)
    D = t[:, None] - t[None, :]
    np.fill_diagonal(D, 1.0)
    res += (W / D).sum(axis=1)
    return res


def jacobian_np(t, z, a, color, W):
    l = t.size
    if l == 0:
        return np.zeros((0, 0), dtype=np.complex128)
    A = a[:, color].T
    den = t[:, None] - z[None, :]
    den = np.where(A == 0, 1.0, den)
    diag_z = (A / den ** 2).sum(axis=1)
    D = t[:, None] - t[None, :]
    np.fill_diagonal(D, 1.0)
    off = W / D ** 2
    J = off.astype(np.complex128)
    idx = np.arange(l)
    J[idx, idx] = diag_z - off.sum(axis=1)
    return J


def newton_np(t0, z, a, color, W, tol, max_iter, max_halve):
    """Damped Newton on the residual; halve the step until the norm drops."""
    t = t0.astype(np.complex128).copy()
    res = residual_np(t, z, a, color, W)
    rnorm = float(np.abs(res).max()) if res.size else 0.0
    if not np.isfinite(rnorm):
        return t, rnorm, 0, NOT_FINITE
    it = 0
    while rnorm > tol and it < max_iter:
        J = jacobian_np(t, z, a, color, W)
        try:
            step = np.linalg.solve(J, res)
        except np.linalg.LinAlgError:
            return t, rnorm, it, SINGULAR_JACOBIAN
        if not np.all(np.isfinite(step)):
            return t, rnorm, it, SINGULAR_JACOBIAN
        lam = 1.0
        improved = False
        for _ in range(max_halve):
            tn = t - lam * step
            rn = residual_np(tn, z, a, color, W)
            rnn = float(np.abs(rn).max())
            if np.isfinite(rnn) and rnn < rnorm:
                t, res, rnorm = tn, rn, rnn
                improved = True
                break
            lam *= 0.5
        if not improved:
            return t, rnorm, it, STALLED
        it += 1
    return t, rnorm, it, (OK if rnorm <= tol else NO_CONVERGENCE)


# ---------------------------------------------------------------------------
# loop backend (njit-compiled when numba is active)
# ---------------------------------------------------------------------------

def _residual_loops(t, z, a, color, W):
    l = t.size
    n = z.size
    out = np.zeros(l, dtype=np.complex128)
    for idx in range(l):
        i = color[idx]
        acc = 0.0 + 0.0j
        for s in range(n):
            c = a[s, i]
            if c != 0:
                acc -= c / (t[idx] - z[s])
        for jdx in range(l):
            w = W[idx, jdx]
            if w != 0.0:
                acc += w / (t[idx] - t[jdx])
        out[idx] = acc
    return out


def _jacobian_loops(t, z, a, color, W):
    l = t.size
    n = z.size
    J = np.zeros((l, l), dtype=np.complex128)
    for idx in range(l):
        i = color[idx]
        diag = 0.0 + 0.0j
        for s in range(n):
            c = a[s, i]
            if c != 0:
                d = t[idx] - z[s]
                diag += c / (d * d)
        for jdx in range(l):
            w = W[idx, jdx]
            if w != 0.0:
                d = t[idx] - t[jdx]
                v = w / (d * d)
                J[idx, jdx] = v
                diag -= v
        J[idx, idx] = diag
    return J


def _solve_loops(A, b):
    """Gaussian elimination with partial pivoting; returns (x, ok)."""
    n = A.shape[0]
    M = A.copy()
    x = b.copy()
    for k in range(n):
        p = k
        best = abs(M[k, k])
        for i in range(k + 1, n):
            v = abs(M[i, k])
            if v > best:
                best = v
                p = i
        if best == 0.0:
            return x, False
        if p != k:
            for j in range(n):
                tmp = M[k, j]
                M[k, j] = M[p, j]
                M[p, j] = tmp
            tmp = x[k]
            x[k] = x[p]
            x[p] = tmp
        for i in range(k + 1, n):
            f = M[i, k] / M[k, k]
            for j in range(k, n):
                M[i, j] -= f * M[k, j]
            x[i] -= f * x[k]
    for i in range(n - 1, -1, -1):
        s = x[i]
        for j in range(i + 1, n):
            s -= M[i, j] * x[j]
        x[i] = s / M[i, i]
    return x, True


def _maxabs_loops(v):
    best = 0.0
    for i in range(v.size):
        x = abs(v[i])
        if x > best or x != x:
            best = x
    return best


def _make_newton_loops(residual_fn, jacobian_fn, solve_fn, maxabs_fn):
    def newton(t0, z, a, color, W, tol, max_iter, max_halve):
        t = t0.copy()
        res = residual_fn(t, z, a, color, W)
        rnorm = maxabs_fn(res)
        if not np.isfinite(rnorm):
            return t, rnorm, 0, NOT_FINITE
        it = 0
        while rnorm > tol and it < max_iter:
            J = jacobian_fn(t, z, a, color, W)
            step, ok = solve_fn(J, res)
            if not ok:
                return t, rnorm, it, SINGULAR_JACOBIAN
            finite = True
            for i in range(step.size):
                if not np.isfinite(step[i].real) or not np.isfinite(step[i].imag):
                    finite = False
            if not finite:
                return t, rnorm, it, SINGULAR_JACOBIAN
            lam = 1.0
            improved = False
            for _ in range(max_halve):
                tn = t - lam * step
                rn = residual_fn(tn, z, a, color, W)
                rnn = maxabs_fn(rn)
                if np.isfinite(rnn) and rnn < rnorm:
                    t = tn
                    res = rn
                    rnorm = rnn
                    improved = True
                    break
                lam *= 0.5
            if not improved:
                return t, rnorm, it, STALLED
            it += 1
        if rnorm <= tol:
            return t, rnorm, it, OK
        return t, rnorm, it, NO_CONVERGENCE

    return newton


if USING_NUMBA:
    _residual_nb = _nb.njit(cache=True)(_residual_loops)
    _jacobian_nb = _nb.njit(cache=True)(_jacobian_loops)
    _solve_nb = _nb.njit(cache=True)(_solve_loops)
    _maxabs_nb = _nb.njit(cache=True)(_maxabs_loops)
    _newton_nb = _nb.njit(cache=True)(
        _make_newton_loops(_residual_nb, _jacobian_nb, _solve_nb, _maxabs_nb))

    residual = _residual_nb
    jacobian = _jacobian_nb
    newton = _newton_nb
else:
    residual = residual_np
    jacobian = jacobian_np
    newton = newton_np

residual_nb = residual if USING_NUMBA else None
jacobian_nb = jacobian if USING_NUMBA else None
newton_nb = newton if USING_NUMBA else None


def apply_thread_cap():
    """Honor LAME_BETHE_THREADS as a cap on numba's thread pool."""
    if not USING_NUMBA:
        return
    val = os.environ.get(THREADS_ENV, "").strip()
    if not val:
        return
    try:
        cap = max(1, int(val))
    except ValueError:
        return
    try:
        _nb.set_num_threads(min(cap, _nb.get_num_threads()))
    except ValueError:  # pragma: no cover - thread layer quirks
        pass


def warmup():
    """Trigger JIT compilation on a tiny instance (no-op on the numpy path)."""
    z = np.array([-1.0 + 0j, 1.0 + 0j])
    a = np.array([[1.0 + 0j], [1.0 + 0j]])
    color = np.zeros(1, dtype=np.int64)
    W = np.zeros((1, 1))
    t = np.array([0.1 + 0.1j])
    residual(t, z, a, color, W)
    jacobian(t, z, a, color, W)
    newton(t, z, a, color, W, 1e-10, 50, 40)
