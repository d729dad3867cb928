"""Compare the compiled and pure-Python simplex pivot kernels.

    python3 benchmarks/bench_simplex_kernel.py [--repeats 3]

Solves the same random dense LPs and CCP subproblems with both kernels,
checks that they take identical pivot sequences, and prints wall times.
"""
import argparse
import time

import numpy as np

from slmp.ccp import CcpConfig, init_weights
from slmp.data import make_moons
from slmp.lp import DcProgram, build_subproblem, revised_simplex
from slmp.lp import _simplex_kernel_py

try:
    from slmp.lp._simplex_kernel import run_phase as compiled
except ImportError:
    compiled = None


def random_lp(m, n, seed):
    r = np.random.default_rng(seed)
    A = r.uniform(0, 1, size=(m, n))
    return -r.uniform(0.5, 1, size=n), A, np.ones(m), np.zeros(n), None


def subproblem(M, K, seed):
    d = make_moons(M, 0.2, seed)
    prog = DcProgram.from_data(d.X, d.positive)
    lp = build_subproblem(prog, init_weights(d, CcpConfig(K=K, seed=seed)))
    return lp.objective, lp.A.toarray(), lp.b, lp.lower, lp.upper


def best_time(problem, kernel, repeats):
    best, res = np.inf, None
    for _ in range(repeats):
        t = time.perf_counter()
        res = revised_simplex(*problem, run_phase=kernel)
        best = min(best, time.perf_counter() - t)
    return best, res


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args()
    if compiled is None:
        raise SystemExit("compiled kernel not built; run `pip install -e . --no-build-isolation` first")
    problems = [(f"dense {m}x{n}", random_lp(m, n, 0)) for m, n in ((50, 30), (150, 100), (300, 200))]
    problems += [(f"ccp M={M} K={K}", subproblem(M, K, 0)) for M, K in ((20, 2), (40, 3))]
    print(f"{'problem':<18}{'rows':>6}{'pivots':>8}{'compiled s':>12}{'python s':>10}{'speedup':>9}")
    for name, prob in problems:
        tc, rc = best_time(prob, compiled, args.repeats)
        tp, rp = best_time(prob, _simplex_kernel_py.run_phase, args.repeats)
        assert (rc.status, rc.pivots) == (rp.status, rp.pivots), name
        print(f"{name:<18}{len(prob[2]):>6}{rc.pivots:>8}{tc:>12.4f}{tp:>10.4f}{tp / tc:>9.1f}")


if __name__ == "__main__":
    main()
