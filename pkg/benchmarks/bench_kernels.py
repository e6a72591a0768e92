"""Compare the compiled and NumPy sweep kernels.

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""
import argparse
import time

import numpy as np

from hetsteer import kernels
from hetsteer.steering import SweepGrid


def random_ops(k: int, rng) -> np.ndarray:
    g = rng.normal(size=(4, k, k)) + 1j * rng.normal(size=(4, k, k))
    return g + g.conj().transpose(0, 2, 1)


def best_of(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--sizes", default="2,5,60,200")
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    betas = SweepGrid.polar(3.0, 200, 64).betas()
    names = kernels.available()
    print(f"grid 200x64 ({betas.size} outcomes), best of {args.repeat}")
    print(f"{'support':>8} " + " ".join(f"{n:>10}" for n in names) + ("   speedup" if len(names) > 1 else ""))
    for k in (int(s) for s in args.sizes.split(",")):
        f = random_ops(k, rng)
        t = {n: best_of(lambda: kernels.get(n)(f, betas), args.repeat) for n in names}
        cells = " ".join(f"{t[n] * 1e3:>8.2f}ms" for n in names)
        extra = f"   {t['python'] / t['cython']:7.2f}x" if "cython" in t else ""
        print(f"{k:>8} {cells}{extra}")


if __name__ == "__main__":
    main()
