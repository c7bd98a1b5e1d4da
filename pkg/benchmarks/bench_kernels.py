"""Compare the compiled kernels with the numpy fallback.

Two measurements:

* each kernel on float64 inputs, calling the dispatching wrapper in
  :mod:`lgi.kernels` and the fallback in :mod:`lgi._kernels_py` directly;
* an end-to-end float pipeline (synthesis, canonical frame, generating
  function) run once in this process and once in a child process with
  ``LGI_PURE=1``.

Usage::

    python benchmarks/bench_kernels.py [--repeat 5] [--order 30]
"""

import argparse
import json
import os
import subprocess
import sys
import timeit

import numpy as np

from lgi import _kernels_py as pure
from lgi import kernels

PIPELINE = """
import json, time
import numpy as np
from lgi import BACKEND
from lgi.curves import graph_from_frame
from lgi.frame import canonical_frame
from lgi.invariants import generating_function
from lgi.synthesis import random_polynomial_spec, synthesize_interval, synthesize_local

rng = np.random.default_rng(0)
specs = [random_polynomial_spec(m, rng) for m in (1, 2, 3) for _ in range(4)]
best = float("inf")
for _ in range({repeat}):
    start = time.perf_counter()
    for spec in specs:
        m = spec.m
        g = graph_from_frame(synthesize_local(spec, 0.0, 2 * m * m + 2 * m + 2))
        canonical_frame(g)
        generating_function(g)
        synthesize_interval(spec, 0.0, 1.0)
    best = min(best, time.perf_counter() - start)
print(json.dumps({{"backend": BACKEND, "seconds": best}}))
"""


def kernel_cases(order, rng):
    a = rng.standard_normal((order + 1, 6, 6))
    b = rng.standard_normal((order + 1, 6, 6))
    v = rng.standard_normal((order + 1, 6))
    w = rng.standard_normal((order + 1, 6))
    a2 = rng.standard_normal((order + 1, order + 1))
    b2 = rng.standard_normal((order + 1, order + 1))
    x0 = np.eye(6)
    return {
        "cauchy_mul (6-vectors)": lambda k: k.cauchy_mul(v, w, order),
        "cauchy_matmul (6 x 6)": lambda k: k.cauchy_matmul(a, b, order),
        "cauchy_mul2 (bivariate)": lambda k: k.cauchy_mul2(a2, b2, order, order),
        "taylor_linear (6 x 6)": lambda k: k.taylor_linear(x0, a, order),
    }


def best_time(fn, repeat):
    number = 5
    return min(timeit.repeat(fn, number=number, repeat=repeat)) / number


def run_pipeline(repeat, pure_mode):
    env = dict(os.environ)
    if pure_mode:
        env["LGI_PURE"] = "1"
    else:
        env.pop("LGI_PURE", None)
    proc = subprocess.run(
        [sys.executable, "-c", PIPELINE.format(repeat=repeat)],
        capture_output=True,
        text=True,
        env=env,
        check=True,
    )
    return json.loads(proc.stdout)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--order", type=int, default=30, help="jet order of the kernel inputs")
    args = parser.parse_args(argv)

    print(f"compiled backend available: {kernels.BACKEND == 'cython'}")
    print(f"{'kernel':28s} {'compiled [ms]':>14s} {'numpy [ms]':>12s} {'speedup':>8s}")
    rng = np.random.default_rng(0)
    for name, call in kernel_cases(args.order, rng).items():
        fast = best_time(lambda: call(kernels), args.repeat)
        slow = best_time(lambda: call(pure), args.repeat)
        assert np.allclose(call(kernels), call(pure), rtol=1e-12, atol=1e-9), name
        print(f"{name:28s} {fast * 1e3:14.3f} {slow * 1e3:12.3f} {slow / fast:8.1f}x")

    compiled = run_pipeline(args.repeat, pure_mode=False)
    fallback = run_pipeline(args.repeat, pure_mode=True)
    print(
        f"{'pipeline (12 curves)':28s} {compiled['seconds'] * 1e3:14.1f} {fallback['seconds'] * 1e3:12.1f} "
        f"{fallback['seconds'] / compiled['seconds']:8.1f}x   [{compiled['backend']} vs {fallback['backend']}]"
    )


if __name__ == "__main__":
    main()
