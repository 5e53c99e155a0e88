"""Time the compiled string kernels against their pure-Python twins.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--words 200]

Both backends get identical inputs; outputs are compared before timing.
"""
import argparse
import random
import time

import numpy as np

from morphan import kernels
from morphan.kernels import codepoints


def _word(rng, alphabet, lo, hi):
    return "".join(rng.choice(alphabet) for _ in range(rng.randint(lo, hi)))


def make_cases(n, seed=0):
    rng = random.Random(seed)
    cases = []
    for _ in range(n):
        stem, other = _word(rng, "abcdefgh", 4, 9), _word(rng, "abcdefgh", 4, 9)
        suffix = _word(rng, "xyz", 1, 3)
        cases.append((stem, stem + suffix, other, other + suffix))
    return cases


def _best(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def bench(cases, repeat, rho):
    enc = [tuple(codepoints(w) for w in q) for q in cases]
    u = np.random.default_rng(0).random((rho, 2 * max(len(b) + len(c) for _, b, c, _ in cases)))
    jobs = {
        "shuffle_intersect": lambda impl: [impl.shuffle_intersect(*q) for q in enc],
        f"alea_trials (rho={rho})": lambda impl: [
            impl.alea_trials(a, b, c, np.ascontiguousarray(u[:, :2 * (len(b) + len(c))])) for a, b, c, _ in enc[:20]],
        "common_extension": lambda impl: [impl.common_extension(a, b) for a, b, _, _ in enc],
    }
    backends = kernels.BACKENDS
    rows = []
    for name, job in jobs.items():
        outs = {k: job(impl) for k, impl in backends.items()}
        if "compiled" in outs:
            for x, y in zip(outs["python"], outs["compiled"]):
                x, y = (x if isinstance(x, tuple) else (x,)), (y if isinstance(y, tuple) else (y,))
                assert all(np.array_equal(p, q) for p, q in zip(x, y)), f"{name}: backends disagree"
        times = {k: _best(lambda: job(impl), repeat) for k, impl in backends.items()}
        rows.append((name, times))
    return rows


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--words", type=int, default=200)
    ap.add_argument("--rho", type=int, default=1000)
    args = ap.parse_args(argv)
    if "compiled" not in kernels.BACKENDS:
        print("compiled extension not built; timing the Python backend only")
    rows = bench(make_cases(args.words), args.repeat, args.rho)
    print(f"{'kernel':<28}{'python s':>12}{'compiled s':>12}{'speedup':>10}")
    for name, t in rows:
        py, co = t["python"], t.get("compiled")
        extra = f"{co:>12.4f}{py / co:>9.1f}x" if co else f"{'-':>12}{'-':>10}"
        print(f"{name:<28}{py:>12.4f}{extra}")


if __name__ == "__main__":
    main()
