"""Compare the compiled and pure-Python candidate-scoring backends.

Usage::

    python benchmarks/bench_kernels.py [--repeat 5] [--sizes 100,300]

For each graph size it times one batched ``candidate_spectra`` call at a
few selection depths and a full greedy A-optimal selection of ``3k``
vertices, and checks the two backends return the same results.
"""

import argparse
import time

import numpy as np

from gsp_sampling import kernels
from gsp_sampling.graph import generate_er, shift_operator
from gsp_sampling.sampling import greedy_select, resolve_rtol
from gsp_sampling.spectral import band, eigendecompose


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def bench(n, repeat):
    k = max(1, n // 10)
    b = band(eigendecompose(shift_operator(generate_er(n, 0.8, 0), "combinatorial"), "combinatorial"), k)
    rtol = resolve_rtol(b)
    perm = np.random.default_rng(0).permutation(n)
    rows = []
    for depth in (k // 2, k, 3 * k):
        sel, cand = perm[:depth], perm[depth:]
        res = {}
        for name in kernels.BACKENDS:
            t, out = best_of(lambda: kernels.candidate_spectra(b.u_k, sel, cand, rtol, backend=name), repeat)
            res[name] = (t, out)
        rows.append((f"candidate_spectra |S|={depth}", res))
    res = {}
    for name in kernels.BACKENDS:
        res[name] = best_of(lambda: greedy_select(b, "A", 3 * k, backend=name), max(1, repeat // 2))
    rows.append((f"greedy_select A, m={3 * k}", res))
    return k, rows


def agree(a, b):
    if isinstance(a, tuple) and isinstance(a[0], np.ndarray):
        return np.array_equal(a[0], b[0]) and all(
            np.allclose(x, y, rtol=1e-8, atol=1e-12) for x, y in zip(a[1:], b[1:])
        )
    return a == b


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--sizes", default="100,300")
    args = ap.parse_args()
    if "compiled" not in kernels.BACKENDS:
        print("compiled backend not available; timing the Python backend only")
    for n in (int(x) for x in args.sizes.split(",")):
        k, rows = bench(n, args.repeat)
        print(f"\nN={n}, k={k}")
        for label, res in rows:
            py_t = res["python"][0]
            line = f"  {label:<32} python {py_t * 1e3:9.2f} ms"
            if "compiled" in res:
                c_t, c_out = res["compiled"]
                same = "same" if agree(res["python"][1], c_out) else "DIFFERENT"
                line += f"   compiled {c_t * 1e3:9.2f} ms   speedup {py_t / c_t:5.2f}x   results {same}"
            print(line)


if __name__ == "__main__":
    main()
