"""Compare the compiled kernels with the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""
import argparse
import timeit

import numpy as np

from thermoflow import _pykernels

try:
    from thermoflow import _ckernels
except ImportError:  # extension not built
    _ckernels = None


def _curve(rng, k):
    w = rng.dirichlet(np.ones(k))
    p = rng.dirichlet(np.ones(k))
    order = np.argsort(-p / w, kind="stable")
    x = np.concatenate(([0.0], np.cumsum(w[order])))
    y = np.concatenate(([0.0], np.cumsum(p[order])))
    x[-1] = 1.0
    return x, y


def cases(rng):
    small = _curve(rng, 6) + _curve(rng, 6)
    large = _curve(rng, 20_000) + _curve(rng, 20_000)
    k = 5000
    w = rng.dirichlet(np.ones(k))
    p = rng.dirichlet(np.ones(k))
    order = np.argsort(-p / w, kind="stable")
    flat = (p[order], w[order], np.ones(k), 0.05)
    return {
        "curve_gap d=6": ("curve_gap", small, 20_000),
        "curve_gap d=20000": ("curve_gap", large, 50),
        "flattest_sorted d=6": ("flattest_sorted", (p[:6] / p[:6].sum(), w[:6] / w[:6].sum(), np.ones(6), 0.01), 20_000),
        "flattest_sorted k=5000": ("flattest_sorted", flat, 200),
        "compositions n=40 d=4": ("compositions", (40, 4), 50),
    }


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    impls = {"numpy": _pykernels}
    if _ckernels is not None:
        impls["cython"] = _ckernels
    rng = np.random.default_rng(0)
    print(f"{'case':28s}" + "".join(f"{name:>14s}" for name in impls) + f"{'speedup':>10s}")
    for label, (fn, argv, number) in cases(rng).items():
        times = {}
        for name, mod in impls.items():
            f = getattr(mod, fn)
            best = min(timeit.repeat(lambda: f(*argv), number=number, repeat=args.repeat))
            times[name] = best / number
        row = f"{label:28s}" + "".join(f"{times[n] * 1e6:12.2f}us" for n in impls)
        if "cython" in times:
            row += f"{times['numpy'] / times['cython']:9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
