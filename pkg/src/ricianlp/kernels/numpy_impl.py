"""Vectorized numpy versions of the loop kernels in :mod:`.numba_impl`."""
import math

import numpy as np

SERIES_LIMIT = 15.0
_EPS = 1e-17
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


def _series(x, nu):
    q = 0.25 * x * x
    term = np.ones_like(x) if nu == 0 else 0.5 * x
    total = term.copy()
    for k in range(1, 200):
        term = term * q / (k * (k + nu))
        total += term
        if np.all(term <= _EPS * total):
            break
    return total


def _scaled_asymptotic(x, nu):
    mu = 4.0 * nu * nu
    term = np.ones_like(x)
    total = np.ones_like(x)
    active = np.ones(x.shape, dtype=bool)
    for k in range(1, 80):
        nxt = term * ((2 * k - 1) ** 2 - mu) / (8.0 * k * x)
        active &= np.abs(nxt) < np.abs(term)
        if not active.any():
            break
        term = np.where(active, nxt, term)
        total = np.where(active, total + nxt, total)
        active &= np.abs(nxt) >= _EPS * np.abs(total)
    return total * _INV_SQRT_2PI / np.sqrt(x)


def _scaled(x, nu):
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    small = x <= SERIES_LIMIT
    if small.any():
        xs = x[small]
        out[small] = _series(xs, nu) * np.exp(-xs)
    if (~small).any():
        out[~small] = _scaled_asymptotic(x[~small], nu)
    return out


def i0_series(x):
    return _series(np.asarray(x, dtype=float), 0)


def i0e_array(x):
    return _scaled(x, 0)


def i1e_array(x):
    return _scaled(x, 1)


def log_kernel_grid(R, s, K):
    a = 1.0 + s[:, None]
    z = 2.0 * np.sqrt(K * s[:, None] * R[None, :]) / a
    return -np.log(a) - (R[None, :] + K * s[:, None]) / a + np.log(i0e_array(z)) + z


def _dlog_kernel_grid(R, s, K):
    a = 1.0 + s[:, None]
    z = 2.0 * np.sqrt(K * s[:, None] * R[None, :]) / a
    safe = np.where(z < 1e-8, 1.0, z)
    ratio = np.where(z < 1e-8, 0.5, i1e_array(safe) / (safe * i0e_array(safe)))
    return -1.0 / a - (K - R[None, :]) / a**2 + ratio * 2.0 * K * R[None, :] * (1.0 - s[:, None]) / a**3


def mixture_log_ratio(R, s, p, K):
    live = p > 0.0
    u = log_kernel_grid(R, s[live], K) + R[None, :]
    pl = p[live][:, None]
    umax = u.max(axis=0)
    delta = np.sum(pl * np.expm1(np.minimum(u, 1.0)), axis=0)
    small = (umax < 1.0) & (np.abs(delta) < 0.5)
    lse = umax + np.log(np.sum(pl * np.exp(u - umax), axis=0))
    L = np.where(small, np.log1p(np.where(small, delta, 0.0)), lse)
    f = np.where(small, np.exp(-R) * (1.0 + delta), np.exp(L - R))
    return L, f


def kernel_expectations(R, w, s_eval, K, L, with_grad):
    lg = log_kernel_grid(R, s_eval, K)
    t = w[None, :] * np.exp(lg) * L[None, :]
    val = t.sum(axis=1)
    if with_grad:
        grad = (t * _dlog_kernel_grid(R, s_eval, K)).sum(axis=1)
    else:
        grad = np.zeros(s_eval.size)
    return val, grad


def plane_mixture_mi(cr, ci, var, p, u, wu, ntheta):
    m = cr.size
    out = np.zeros(m)
    theta = 2.0 * np.pi * np.arange(ntheta) / ntheta
    live = np.flatnonzero(p > 0.0)
    for i in live:
        rho = np.sqrt(var[i] * u)[:, None]
        yr = cr[i] + rho * np.cos(theta)[None, :]
        yi = ci[i] + rho * np.sin(theta)[None, :]
        d = np.stack([
            np.zeros_like(yr) if j == i else
            np.log(var[i] / var[j]) - ((yr - cr[j]) ** 2 + (yi - ci[j]) ** 2) / var[j] + u[:, None]
            for j in live
        ])
        pl = p[live][:, None, None]
        dmax = np.maximum(d.max(axis=0), 0.0)
        others = (live != i)[:, None, None]
        delta = np.sum(np.where(others, pl * np.expm1(np.minimum(d, 1.0)), 0.0), axis=0)
        small = (dmax < 1.0) & (np.abs(delta) < 0.5)
        lse = dmax + np.log(np.sum(pl * np.exp(d - dmax), axis=0))
        lr = -np.where(small, np.log1p(np.where(small, delta, 0.0)), lse)
        out[i] = np.sum(wu * lr.mean(axis=1))
    return out


def mixture_mi_terms(R, w, s, p, K):
    L, f = mixture_log_ratio(R, s, p, K)
    val, grad = kernel_expectations(R, w, s, K, L, True)
    return float(np.dot(w, f * L)), val, grad
