"""Benchmark the compiled enumeration kernels against the numpy fallback.

Run with ``python -m quantprox.benchmark``.  Both backends are imported
directly, so the comparison works regardless of which backend the package
selected at import time.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from ._kernels import BACKEND, _fallback

try:
    from ._kernels import _speedups
except ImportError:  # pragma: no cover
    _speedups = None


def _reference_instance(seed=7, m=4, n=4):
    rng = np.random.default_rng(seed)
    px = 0.5 * rng.dirichlet(np.ones(m)) + 0.5 / m
    dist = rng.random((m, n))
    dist[np.arange(min(m, n)), np.arange(min(m, n))] = 0.0
    d = float(np.quantile(dist, 0.4))
    inc = np.ascontiguousarray(dist <= d, dtype=np.uint8)
    return px, inc


def _time(fn, *args, repeat=1):
    best = np.inf
    value = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        value = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, value


def run(steps=400, search_letters=9, trials=1):
    px, inc = _reference_instance()
    rows = []

    backends = [("python", _fallback)]
    if _speedups is not None:
        backends.append(("cython", _speedups))

    results = {}
    for name, impl in backends:
        t, (val, _) = _time(impl.grid_min_guaranteed, inc, px, steps, repeat=trials)
        results.setdefault("grid_min_guaranteed", {})[name] = (t, val)

        target = 0.9
        t, (val, _) = _time(impl.grid_min_excess, inc, px, target, max(steps // 4, 50), repeat=trials)
        results.setdefault("grid_min_excess", {})[name] = (t, val)

    # exhaustive search: m letters with 3 choices each
    rng = np.random.default_rng(11)
    m = search_letters
    n = 6
    px_big = rng.dirichlet(np.ones(m))
    choices = [np.sort(rng.choice(n, size=3, replace=False)).astype(np.int64) for _ in range(m)]
    flat = np.concatenate(choices)
    offsets = np.cumsum([0] + [c.size for c in choices]).astype(np.int64)
    for name, impl in backends:
        t, (val, _) = _time(impl.exhaustive_min_entropy_map, flat, offsets, px_big, n, repeat=trials)
        results.setdefault("exhaustive_map", {})[name] = (t, val)

    eps = 0.1
    yin, yout = [], []
    offs = [0]
    for x in range(7):
        inside = [int(v) for v in rng.choice(n, size=2, replace=False)]
        outside = [y for y in range(n) if y not in inside]
        for y in inside:
            yin.append(y)
            yout.append(-1)
        for a in inside:
            for b in outside:
                yin.append(a)
                yout.append(b)
        offs.append(len(yin))
    px7 = rng.dirichlet(np.ones(7))
    for name, impl in backends:
        t, (val, _) = _time(
            impl.vertex_min_entropy,
            np.asarray(yin, dtype=np.int64),
            np.asarray(yout, dtype=np.int64),
            np.asarray(offs, dtype=np.int64),
            px7,
            eps,
            n,
            repeat=trials,
        )
        results.setdefault("vertex_search", {})[name] = (t, val)

    print(f"active backend: {BACKEND}")
    header = f"{'kernel':<22}{'python [s]':>12}{'cython [s]':>12}{'speedup':>9}  values agree"
    print(header)
    print("-" * len(header))
    for kernel, by_backend in results.items():
        tp, vp = by_backend["python"]
        if "cython" in by_backend:
            tc, vc = by_backend["cython"]
            agree = "yes" if abs(vp - vc) < 1e-9 else f"NO ({vp} vs {vc})"
            print(f"{kernel:<22}{tp:>12.4f}{tc:>12.4f}{tp / tc:>9.1f}x  {agree}")
        else:
            print(f"{kernel:<22}{tp:>12.4f}{'-':>12}{'-':>9}  (compiled backend missing)")
    return results


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--steps", type=int, default=400, help="grid resolution for the oracle benchmark")
    parser.add_argument("--search-letters", type=int, default=9)
    args = parser.parse_args(argv)
    run(steps=args.steps, search_letters=args.search_letters)


if __name__ == "__main__":
    main()
