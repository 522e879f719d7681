"""Compiled vs numpy kernels on the kmax = 4 torus (512 modes).

Run:  python benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import math
import timeit

import numpy as np

from voigtlab import kernels
from voigtlab.spectral_domain import build_torus_basis
from voigtlab.triads import triad_table


def bench(fn, repeat):
    times = timeit.repeat(fn, number=1, repeat=repeat)
    return min(times), float(np.median(times))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=20)
    ap.add_argument("--kmax", type=int, default=4)
    args = ap.parse_args()

    d = build_torus_basis(2.0 * math.pi, args.kmax)
    t = triad_table(d)
    u = np.random.default_rng(0).standard_normal(d.mode_count)
    batch = np.random.default_rng(1).standard_normal((32, d.mode_count))
    series = np.random.default_rng(2).standard_normal(100_000)
    print(f"modes {d.mode_count}, triad entries {len(t)}, compiled available: "
          f"{kernels.compiled is not None}")

    cases = {
        "triad_apply": lambda k: k.triad_apply(t.q, t.i, t.j, t.coef, u, t.mode_count),
        "triad_apply_batch(32)": lambda k: k.triad_apply_batch(t.q, t.i, t.j, t.coef, batch,
                                                               t.mode_count),
        "triad_jacobian": lambda k: k.triad_jacobian(t.q, t.i, t.j, t.coef, u, t.mode_count),
        "kahan_cumsum(1e5)": lambda k: k.kahan_cumsum(series),
    }
    backends = [("python", kernels.python)]
    if kernels.compiled is not None:
        backends.append(("cython", kernels.compiled))

    print(f"{'kernel':<24}" + "".join(f"{name + ' min [ms]':>20}" for name, _ in backends)
          + ("   speedup" if len(backends) == 2 else ""))
    for label, case in cases.items():
        mins = []
        for _, mod in backends:
            ref = case(kernels.python)
            got = case(mod)
            assert np.allclose(got, ref, rtol=1e-12, atol=1e-12), label
            mins.append(bench(lambda: case(mod), args.repeat)[0])
        line = f"{label:<24}" + "".join(f"{m * 1e3:>20.3f}" for m in mins)
        if len(mins) == 2:
            line += f"   {mins[0] / mins[1]:7.1f}x"
        print(line)


if __name__ == "__main__":
    main()
