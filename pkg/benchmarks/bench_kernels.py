"""Compare the compiled and pure-Python Gibbs kernels.

    python benchmarks/bench_kernels.py [--repeat 5] [--levels 2]

Times entropy evaluation and entropy-to-temperature inversion for each
available backend, and checks that both backends agree.
"""
import argparse
import math
import timeit

import numpy as np

from thermorecycle.bath import LOG_T_RANGE
from thermorecycle.kernels import available_backends


def workloads(mod, levels, targets, temps):
    lo, hi = LOG_T_RANGE

    def entropy():
        for T in temps:
            mod.gibbs_entropy(levels, T)

    def inversion():
        for s in targets:
            mod.log_temperature_of_entropy(levels, s, lo, hi)

    return {"gibbs_entropy": (entropy, len(temps)), "entropy_inversion": (inversion, len(targets))}


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--levels", type=int, default=2, help="number of equally spaced bath levels")
    args = ap.parse_args(argv)

    levels = np.arange(args.levels, dtype=float)
    targets = np.linspace(0.01, math.log(args.levels) - 1e-3, 200)
    temps = np.geomspace(0.05, 20.0, 2000)

    backends = available_backends()
    if "cython" not in backends:
        print("compiled backend not built; timing the Python fallback only")

    lo, hi = LOG_T_RANGE
    if len(backends) == 2:
        a = [backends["python"].log_temperature_of_entropy(levels, s, lo, hi) for s in targets]
        b = [backends["cython"].log_temperature_of_entropy(levels, s, lo, hi) for s in targets]
        print(f"max |ln T| disagreement: {max(abs(x - y) for x, y in zip(a, b)):.3e}")

    results = {}
    for name, mod in backends.items():
        for task, (fn, n_calls) in workloads(mod, levels, targets, temps).items():
            best = min(timeit.repeat(fn, number=1, repeat=args.repeat))
            results[(name, task)] = best
            print(f"{name:>7s}  {task:<18s} {1e6 * best / n_calls:10.2f} us/call")
    if len(backends) == 2:
        for task in ("gibbs_entropy", "entropy_inversion"):
            ratio = results[("python", task)] / results[("cython", task)]
            print(f"speedup {task}: {ratio:.1f}x")


if __name__ == "__main__":
    main()
