"""Loop kernels compiled with numba.

Every function here has a vectorized twin in :mod:`ricianlp.kernels.numpy_impl`
with the same signature and the same arithmetic.
"""
import math

import numpy as np
from numba import njit

SERIES_LIMIT = 15.0
_EPS = 1e-17
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


@njit(cache=True)
def i0_series(x):
    q = 0.25 * x * x
    term = 1.0
    total = 1.0
    k = 1
    while k < 200:
        term *= q / (k * k)
        total += term
        if term < _EPS * total:
            break
        k += 1
    return total


@njit(cache=True)
def i1_series(x):
    q = 0.25 * x * x
    term = 0.5 * x
    total = term
    k = 1
    while k < 200:
        term *= q / (k * (k + 1))
        total += term
        if term <= _EPS * total:
            break
        k += 1
    return total


@njit(cache=True)
def _scaled_asymptotic(x, nu):
    # e^{-x} I_nu(x) ~ (2 pi x)^{-1/2} sum_k t_k, truncated at the smallest term
    mu = 4.0 * nu * nu
    term = 1.0
    total = 1.0
    k = 1
    while k < 80:
        nxt = term * ((2 * k - 1) ** 2 - mu) / (8.0 * k * x)
        if abs(nxt) >= abs(term):
            break
        term = nxt
        total += term
        if abs(term) < _EPS * abs(total):
            break
        k += 1
    return total * _INV_SQRT_2PI / math.sqrt(x)


@njit(cache=True)
def i0e(x):
    if x <= SERIES_LIMIT:
        return i0_series(x) * math.exp(-x)
    return _scaled_asymptotic(x, 0.0)


@njit(cache=True)
def i1e(x):
    if x <= SERIES_LIMIT:
        return i1_series(x) * math.exp(-x)
    return _scaled_asymptotic(x, 1.0)


@njit(cache=True)
def i0e_array(x):
    out = np.empty(x.size)
    for k in range(x.size):
        out[k] = i0e(x[k])
    return out


@njit(cache=True)
def i1e_array(x):
    out = np.empty(x.size)
    for k in range(x.size):
        out[k] = i1e(x[k])
    return out


@njit(cache=True)
def log_kernel(R, s, K):
    """log g(R, r) with s = r^2."""
    a = 1.0 + s
    z = 2.0 * math.sqrt(K * s * R) / a
    return -math.log(a) - (R + K * s) / a + math.log(i0e(z)) + z


@njit(cache=True)
def dlog_kernel(R, s, K):
    """d/ds log g(R, r) with s = r^2."""
    a = 1.0 + s
    z = 2.0 * math.sqrt(K * s * R) / a
    if z < 1e-8:
        ratio = 0.5
    else:
        ratio = i1e(z) / (z * i0e(z))
    return -1.0 / a - (K - R) / (a * a) + ratio * 2.0 * K * R * (1.0 - s) / (a * a * a)


@njit(cache=True)
def log_kernel_grid(R, s, K):
    out = np.empty((s.size, R.size))
    for j in range(s.size):
        for k in range(R.size):
            out[j, k] = log_kernel(R[k], s[j], K)
    return out


@njit(cache=True)
def mixture_log_ratio(R, s, p, K):
    """Return L = log(f_R e^R) and f_R on the nodes R for the radial mixture."""
    n = R.size
    m = s.size
    L = np.empty(n)
    f = np.empty(n)
    u = np.empty(m)
    for k in range(n):
        Rk = R[k]
        umax = -np.inf
        for j in range(m):
            if p[j] > 0.0:
                u[j] = log_kernel(Rk, s[j], K) + Rk
                if u[j] > umax:
                    umax = u[j]
            else:
                u[j] = -np.inf
        done = False
        if umax < 1.0:
            delta = 0.0
            for j in range(m):
                if p[j] > 0.0:
                    delta += p[j] * math.expm1(u[j])
            if abs(delta) < 0.5:
                L[k] = math.log1p(delta)
                f[k] = math.exp(-Rk) * (1.0 + delta)
                done = True
        if not done:
            acc = 0.0
            for j in range(m):
                if p[j] > 0.0:
                    acc += p[j] * math.exp(u[j] - umax)
            L[k] = umax + math.log(acc)
            f[k] = math.exp(L[k] - Rk)
    return L, f


@njit(cache=True)
def kernel_expectations(R, w, s_eval, K, L, with_grad):
    """Integrals of g(., s_e) * L and of d/ds g(., s_e) * L for each s_e."""
    ne = s_eval.size
    val = np.zeros(ne)
    grad = np.zeros(ne)
    for e in range(ne):
        se = s_eval[e]
        acc = 0.0
        gacc = 0.0
        for k in range(R.size):
            g = math.exp(log_kernel(R[k], se, K))
            t = w[k] * g * L[k]
            acc += t
            if with_grad:
                gacc += t * dlog_kernel(R[k], se, K)
        val[e] = acc
        grad[e] = gacc
    return val, grad


@njit(cache=True)
def plane_mixture_mi(cr, ci, var, p, u, wu, ntheta):
    """Per-component E_i[log f_i(y) - log f_y(y)] for a complex Gaussian mixture.

    Component i is integrated on a polar grid centred at its mean with
    radius sqrt(var_i * u): Gauss-Laguerre in u, trapezoid in the angle.
    """
    m = cr.size
    out = np.zeros(m)
    d = np.empty(m)
    two_pi = 2.0 * math.pi
    for i in range(m):
        if p[i] <= 0.0:
            continue
        si = math.sqrt(var[i])
        acc = 0.0
        for a in range(u.size):
            rho = si * math.sqrt(u[a])
            inner = 0.0
            for b in range(ntheta):
                th = two_pi * b / ntheta
                yr = cr[i] + rho * math.cos(th)
                yi = ci[i] + rho * math.sin(th)
                dmax = 0.0
                for j in range(m):
                    if j == i:
                        d[j] = 0.0
                    elif p[j] > 0.0:
                        dr = yr - cr[j]
                        di = yi - ci[j]
                        d[j] = math.log(var[i] / var[j]) - (dr * dr + di * di) / var[j] + u[a]
                        if d[j] > dmax:
                            dmax = d[j]
                    else:
                        d[j] = -np.inf
                done = False
                if dmax < 1.0:
                    delta = 0.0
                    for j in range(m):
                        if p[j] > 0.0 and j != i:
                            delta += p[j] * math.expm1(d[j])
                    if abs(delta) < 0.5:
                        inner -= math.log1p(delta)
                        done = True
                if not done:
                    s = 0.0
                    for j in range(m):
                        if p[j] > 0.0:
                            s += p[j] * math.exp(d[j] - dmax)
                    inner -= dmax + math.log(s)
            acc += wu[a] * inner / ntheta
        out[i] = acc
    return out


@njit(cache=True)
def mixture_mi_terms(R, w, s, p, K):
    """One pass over the nodes for the mixture divergence and its sensitivities.

    Returns ``D = sum_k w_k f_k L_k`` together with ``val_j = sum_k w_k g_jk L_k``
    and ``grad_j = sum_k w_k g_jk dlog g_jk/ds L_k`` for every component.
    """
    m = s.size
    n = R.size
    lg = np.empty((m, n))
    dl = np.empty((m, n))
    for j in range(m):
        a = 1.0 + s[j]
        for k in range(n):
            z = 2.0 * math.sqrt(K * s[j] * R[k]) / a
            e0 = i0e(z)
            lg[j, k] = -math.log(a) - (R[k] + K * s[j]) / a + math.log(e0) + z
            ratio = 0.5 if z < 1e-8 else i1e(z) / (z * e0)
            dl[j, k] = -1.0 / a - (K - R[k]) / (a * a) + ratio * 2.0 * K * R[k] * (1.0 - s[j]) / (a * a * a)
    div = 0.0
    val = np.zeros(m)
    grad = np.zeros(m)
    for k in range(n):
        Rk = R[k]
        umax = -np.inf
        for j in range(m):
            if p[j] > 0.0 and lg[j, k] + Rk > umax:
                umax = lg[j, k] + Rk
        Lk = 0.0
        fk = 0.0
        done = False
        if umax < 1.0:
            delta = 0.0
            for j in range(m):
                if p[j] > 0.0:
                    delta += p[j] * math.expm1(lg[j, k] + Rk)
            if abs(delta) < 0.5:
                Lk = math.log1p(delta)
                fk = math.exp(-Rk) * (1.0 + delta)
                done = True
        if not done:
            acc = 0.0
            for j in range(m):
                if p[j] > 0.0:
                    acc += p[j] * math.exp(lg[j, k] + Rk - umax)
            Lk = umax + math.log(acc)
            fk = math.exp(Lk - Rk)
        div += w[k] * fk * Lk
        for j in range(m):
            t = w[k] * math.exp(lg[j, k]) * Lk
            val[j] += t
            grad[j] += t * dl[j, k]
    return div, val, grad
