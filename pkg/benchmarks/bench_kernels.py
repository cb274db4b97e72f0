"""Time the numba kernels against the numpy fallback.

Usage::

    python benchmarks/bench_kernels.py [--repeat 20] [--components 6]

Compilation is triggered once before timing. Each row reports the best
wall time per call for both backends and the speedup, after checking that
the two agree.
"""
import argparse
import timeit

import numpy as np

from ricianlp.kernels import get_backend
from ricianlp.mutual_info import radial_nodes
from ricianlp.numerics.quadrature import laguerre_rule


def workloads(n_comp, rng):
    s = np.ascontiguousarray(np.sort(rng.uniform(0.0, 8.0, n_comp)))
    s[0] = 0.0
    p = rng.dirichlet(np.ones(n_comp))
    K = 2.0
    R, w = radial_nodes(float(s.max()), K)
    s_eval = np.ascontiguousarray(np.linspace(0.0, 10.0, 400))
    x = np.ascontiguousarray(np.linspace(0.0, 800.0, 20000))
    u, wu = laguerre_rule(80)
    n_plane = 4 * n_comp
    amp = np.sqrt(np.repeat(s, 4))
    phase = np.exp(2j * np.pi * (np.arange(n_plane) % 4 + 0.5) / 4)
    c = 0.8 * amp * phase
    var = np.ascontiguousarray(0.36 * amp**2 + 1.0)
    q = np.repeat(p, 4) / 4

    def L_of(mod):
        return mod.mixture_log_ratio(R, s, p, K)[0]

    return {
        "i0e_array": lambda mod: mod.i0e_array(x),
        "mixture_log_ratio": lambda mod: mod.mixture_log_ratio(R, s, p, K),
        "kernel_expectations": lambda mod: mod.kernel_expectations(R, w, s_eval, K, L_of(mod), True),
        "mixture_mi_terms": lambda mod: mod.mixture_mi_terms(R, w, s, p, K),
        "plane_mixture_mi": lambda mod: mod.plane_mixture_mi(
            np.ascontiguousarray(c.real), np.ascontiguousarray(c.imag), var, q, u, wu, 96
        ),
    }


def _flat(out):
    if isinstance(out, tuple):
        return np.concatenate([np.atleast_1d(np.asarray(o, dtype=float)).ravel() for o in out])
    return np.asarray(out, dtype=float).ravel()


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=20)
    ap.add_argument("--components", type=int, default=6)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    fast, slow = get_backend("numba"), get_backend("numpy")
    jobs = workloads(args.components, np.random.default_rng(args.seed))
    print(f"{'kernel':<22}{'numba [ms]':>12}{'numpy [ms]':>12}{'speedup':>10}{'max diff':>12}")
    for name, job in jobs.items():
        a, b = _flat(job(fast)), _flat(job(slow))  # warms the JIT
        diff = float(np.max(np.abs(a - b) / np.maximum(1.0, np.abs(b))))
        t_fast = min(timeit.repeat(lambda: job(fast), number=1, repeat=args.repeat))
        t_slow = min(timeit.repeat(lambda: job(slow), number=1, repeat=args.repeat))
        print(f"{name:<22}{1e3 * t_fast:>12.3f}{1e3 * t_slow:>12.3f}{t_slow / t_fast:>10.1f}{diff:>12.2e}")


if __name__ == "__main__":
    main()
