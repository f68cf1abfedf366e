"""Monte Carlo inner loops, with a numba path and a pure-numpy fallback.

The numba path is used when numba imports and ``QNDSIM_DISABLE_NUMBA`` is not
set to a true value.  Both paths consume the same pre-drawn standard normals,
so they agree to floating-point rounding for a given seed.
"""

import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is optional
    numba = None

NUMBA_AVAILABLE = numba is not None
NUMBA_ENABLED = NUMBA_AVAILABLE and os.environ.get("QNDSIM_DISABLE_NUMBA", "").lower() not in (
    "1",
    "true",
    "yes",
)


def _njit(fn):
    if not NUMBA_AVAILABLE:
        return fn
    return numba.njit(cache=True, nogil=True)(fn)


def _resolve(backend):
    if backend is None:
        return "numba" if NUMBA_ENABLED else "numpy"
    if backend not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {backend!r}")
    if backend == "numba" and not NUMBA_AVAILABLE:
        raise RuntimeError("numba backend requested but numba is not installed")
    return backend


# ---------------------------------------------------------------- feed-forward


def _feedforward_numpy(z_q, z_o, mu_q, L_q, ff_meas, mu_o, K, L_o, ff_out):
    q = mu_q + z_q @ L_q.T
    s = q.copy()
    for k in range(s.shape[1]):
        s[:, k] += s[:, :k] @ ff_meas[k, :k]
    out = mu_o + (q - mu_q) @ K.T + z_o @ L_o.T + s @ ff_out.T
    return s, out


@_njit
def _feedforward_loop(z_q, z_o, mu_q, L_q, ff_meas, mu_o, K, L_o, ff_out):
    n, k = z_q.shape
    m = z_o.shape[1]
    s = np.empty((n, k))
    out = np.empty((n, m))
    dq = np.empty(k)
    for t in range(n):
        for a in range(k):
            acc = 0.0
            for b in range(a + 1):
                acc += L_q[a, b] * z_q[t, b]
            dq[a] = acc
            # outcome = sampled quadrature + displacements from earlier outcomes
            val = mu_q[a] + acc
            for b in range(a):
                val += ff_meas[a, b] * s[t, b]
            s[t, a] = val
        for i in range(m):
            val = mu_o[i]
            for a in range(k):
                val += K[i, a] * dq[a] + ff_out[i, a] * s[t, a]
            for j in range(m):
                val += L_o[i, j] * z_o[t, j]
            out[t, i] = val
    return s, out


def feedforward_trajectories(z_q, z_o, mu_q, L_q, ff_meas, mu_o, K, L_o, ff_out, backend=None):
    """Sample measurement outcomes and feed-forward-corrected outputs.

    Per trajectory ``t``:

    * ``q = mu_q + L_q z_q[t]`` are the measured quadratures before any
      displacement (``L_q`` lower triangular);
    * ``s_a = q_a + sum_{b<a} ff_meas[a, b] s_b`` are the recorded outcomes;
    * ``out = mu_o + K (q - mu_q) + L_o z_o[t] + ff_out s`` are the output
      quadratures after all displacements.

    Returns ``(s, out)`` with shapes ``(N, k)`` and ``(N, m)``.
    """
    args = [np.ascontiguousarray(a, dtype=np.float64) for a in (z_q, z_o, mu_q, L_q, ff_meas, mu_o, K, L_o, ff_out)]
    if _resolve(backend) == "numba":
        return _feedforward_loop(*args)
    return _feedforward_numpy(*args)


# ---------------------------------------------------------------- statistics


@_njit
def _sample_cov_loop(x):
    n, d = x.shape
    mean = np.zeros(d)
    for t in range(n):
        for i in range(d):
            mean[i] += x[t, i]
    mean /= n
    cov = np.zeros((d, d))
    for t in range(n):
        for i in range(d):
            di = x[t, i] - mean[i]
            for j in range(i, d):
                cov[i, j] += di * (x[t, j] - mean[j])
    for i in range(d):
        for j in range(i, d):
            cov[i, j] /= n - 1
            cov[j, i] = cov[i, j]
    return mean, cov


def sample_moments(x, backend=None):
    """Sample mean and unbiased (``N - 1``) covariance of the rows of ``x``."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    if x.shape[0] < 2:
        raise ValueError("need at least two samples")
    if _resolve(backend) == "numba":
        return _sample_cov_loop(x)
    return x.mean(axis=0), np.atleast_2d(np.cov(x, rowvar=False, ddof=1))
