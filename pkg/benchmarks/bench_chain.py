"""Time the compiled chain kernel against the pure-Python fallback.

Both backends consume identical pre-generated randomness, so the work per
iteration matches and the ratio is a clean implementation comparison.

Usage: python3 benchmarks/bench_chain.py [--n 400] [--p 20] [--iterations 50000]
"""

import argparse
import math
import time

import numpy as np

from shrinklab._core import chain_py
from shrinklab._core.hs_table import horseshoe_table
from shrinklab.model_core import IIDGaussian, ModelConfig, generate_dataset
from shrinklab.posterior import _family_params
from shrinklab.priors import GDP, GaussianOracle, HorseshoeLike, Laplace, StudentT

try:
    from shrinklab._core import _chain
except ImportError:
    _chain = None

PRIORS = {
    "gaussian_oracle": GaussianOracle(v=0.5),
    "laplace": Laplace(s=0.3),
    "student_t": StudentT(s=0.3, d0=3.0),
    "gdp": GDP(alpha=3.0, eta=0.3),
    "horseshoe_like": HorseshoeLike(a0=1.0, b0=2.0, xi=0.1),
}


def chain_args(prior, n, p, iterations, seed):
    config = ModelConfig(
        n=n,
        p=p,
        q=min(2, p),
        sigma2=1.0,
        beta_nonzero=(1.0, -0.5)[: min(2, p)],
        design_kind=IIDGaussian(),
        seed=seed,
    )
    ds = generate_dataset(config)
    family, const_term, p1, p2, p3 = _family_params(prior)
    if isinstance(prior, HorseshoeLike):
        hs_knots, hs_coeffs, z_eff, w_min = horseshoe_table(prior.a0, prior.b0)
    else:
        hs_knots, hs_coeffs, z_eff, w_min = np.zeros(2), np.zeros((4, 1)), math.inf, 0.0
    rng = np.random.default_rng(seed + 1)
    return (
        np.ascontiguousarray(ds.X.T @ ds.X),
        np.ascontiguousarray(ds.X.T @ ds.y),
        float(ds.y @ ds.y),
        1.0,
        family,
        const_term,
        p1,
        p2,
        p3,
        np.linalg.lstsq(ds.X, ds.y, rcond=None)[0],
        iterations,
        iterations // 5,
        0.1,
        True,
        rng.standard_normal((iterations, p)),
        rng.random(iterations),
        np.ascontiguousarray(hs_knots),
        np.ascontiguousarray(hs_coeffs),
        z_eff,
        w_min,
    )


def best_of(fn, args, repeats):
    times = []
    for _ in range(repeats):
        start = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - start)
    return min(times)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--n", type=int, default=400)
    parser.add_argument("--p", type=int, default=20)
    parser.add_argument("--iterations", type=int, default=50_000)
    parser.add_argument("--repeats", type=int, default=3)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    if _chain is None:
        print("compiled kernel not built; showing the fallback alone")
    print(
        f"n={args.n} p={args.p} iterations={args.iterations} "
        f"(best of {args.repeats})"
    )
    header = f"{'family':<16} {'python (s)':>11} {'cython (s)':>11} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for name, prior in PRIORS.items():
        inputs = chain_args(prior, args.n, args.p, args.iterations, args.seed)
        py_time = best_of(chain_py.run_chain, inputs, args.repeats)
        if _chain is None:
            print(f"{name:<16} {py_time:>11.3f} {'-':>11} {'-':>8}")
            continue
        cy_time = best_of(_chain.run_chain, inputs, args.repeats)
        print(f"{name:<16} {py_time:>11.3f} {cy_time:>11.3f} {py_time / cy_time:>7.1f}x")


if __name__ == "__main__":
    main()
