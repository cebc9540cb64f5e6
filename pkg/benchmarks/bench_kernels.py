"""Compare the numba kernels with the pure-numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Part one times the momentum-integral kernel directly on a fixed batch of
Matsubara terms. Part two times a full pressure curve in two fresh
interpreters, one with THERMOCASIMIR_PURE_NUMPY=1, so each backend is
chosen the way a user would choose it.
"""

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from thermocasimir import _kernels as K

CURVE = """
import time
from thermocasimir import Drude, PlatePair, pressure, _kernels
m = Drude(omega_p=8.97, gamma=0.035)
pressure(PlatePair(m, m, 500.0, 300.0))  # compile or warm up
t = time.perf_counter()
vals = [pressure(PlatePair(m, m, 160.0 + 30.0 * i, 300.0)) for i in range(20)]
print(_kernels.backend(), time.perf_counter() - t, repr(sum(vals)))
"""


def batch(n=2000):
    z = np.linspace(0.0, 60.0, n)
    e = 1.0 + 80.0**2 / (0.01 + z * (z + 0.035))
    k2 = (e - 1.0) * z * z
    return z, e, k2, e, k2


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    args_ = batch()
    print(f"kernel batch of {args_[0].size} terms, best of {args.repeat}")
    ref = K.term_integrals(K.PRESSURE, *args_, use_numba=False)
    t_np = best_of(lambda: K.term_integrals(K.PRESSURE, *args_, use_numba=False), args.repeat)
    print(f"  numpy  {t_np * 1e3:9.2f} ms")
    if K.HAS_NUMBA:
        got = K.term_integrals(K.PRESSURE, *args_, use_numba=True)
        t_nb = best_of(lambda: K.term_integrals(K.PRESSURE, *args_, use_numba=True), args.repeat)
        dev = float(np.max(np.abs(got / ref - 1.0)))
        print(f"  numba  {t_nb * 1e3:9.2f} ms   speedup {t_np / t_nb:5.1f}x   max rel diff {dev:.1e}")
    else:
        print("  numba  not installed")

    print("pressure curve, 20 separations 160-730 nm at 300 K")
    for flag in ("0", "1"):
        env = dict(os.environ, THERMOCASIMIR_PURE_NUMPY=flag)
        out = subprocess.run([sys.executable, "-c", CURVE], env=env, capture_output=True, text=True, check=True)
        backend, seconds, total = out.stdout.split()
        print(f"  {backend:6s} {float(seconds):9.3f} s   sum {float(total):.15e}")


if __name__ == "__main__":
    main()
