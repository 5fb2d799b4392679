"""Time the compiled kernels against the numpy fallback on the workloads the suites use.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Each row checks that both backends return the same answer before timing them.
"""
import argparse
import timeit

import numpy as np

from grail import kernels, metrics


def workloads(rng):
    D4 = np.array([[0, 1, 2, 2], [1, 0, 2, 3], [2, 2, 0, 1], [2, 3, 1, 0]], dtype=float)
    D8 = rng.integers(1, 5, size=(8, 8)).astype(float)
    D8 = np.minimum(D8, D8.T)
    np.fill_diagonal(D8, 0)
    X = np.array([[float(x) for x in mu] for mu in metrics.distributions(3, 8)])
    D3 = np.array([[0, 1, 2], [1, 0, 2], [2, 2, 0]], dtype=float)
    (_, F), = metrics.potentials(D3)
    idx = rng.integers(0, len(X), size=(2, 20000))
    a = rng.random(200000) * 3
    b = a - rng.random(200000)
    need = rng.random(200000)
    rho = rng.random(200000) + 0.1
    return [
        ("leq_slack  n=2e5", "leq_slack", (a, b)),
        ("hausdorff  |A|=4, all masks", "hausdorff_table", (D4, np.arange(16))),
        ("hausdorff  |A|=8, all masks", "hausdorff_table", (D8, np.arange(256))),
        ("w1 rows    20000 pairs", "w1_dual_rows", (F, np.ascontiguousarray(X[idx[0]]), np.ascontiguousarray(X[idx[1]]))),
        (f"w1 table   {len(X)} distributions", "w1_dual_table", (F, X)),
        ("min_scale  n=2e5", "min_scale", (need, rho)),
    ]


def same(x, y):
    if isinstance(x, tuple):
        return all(same(a, b) for a, b in zip(x, y))
    return np.allclose(np.asarray(x, float), np.asarray(y, float), equal_nan=True)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    backends = kernels.backends()
    rng = np.random.default_rng(0)
    names = sorted(backends)
    print(f"{'workload':34s}" + "".join(f"{n:>12s}" for n in names) + ("     speedup" if len(names) > 1 else ""))
    for label, fn, inputs in workloads(rng):
        results = {n: getattr(backends[n], fn)(*inputs) for n in names}
        ref = results[names[0]]
        if not all(same(ref, results[n]) for n in names):
            raise SystemExit(f"backends disagree on {label}")
        times = {}
        for n in names:
            f = getattr(backends[n], fn)
            number = 3
            times[n] = min(timeit.repeat(lambda: f(*inputs), number=number, repeat=args.repeat)) / number
        row = f"{label:34s}" + "".join(f"{times[n] * 1e3:10.3f}ms" for n in names)
        if "cython" in times and "python" in times:
            row += f"{times['python'] / times['cython']:11.1f}x"
        print(row)
    print(f"active backend: {kernels.BACKEND}")


if __name__ == "__main__":
    main()
